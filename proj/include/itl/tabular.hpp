#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "itl/errors.hpp"
#include "itl/random.hpp"

namespace itl {

enum class FeatureKind { Numeric, Categorical };

struct Feature {
    std::string name;
    FeatureKind kind = FeatureKind::Numeric;
    std::vector<std::string> categories;  // nonempty iff categorical
};

/// Ordered feature declarations; schema order defines column order for all
/// matrix views built from it.
class FeatureSchema {
public:
    FeatureSchema() = default;
    explicit FeatureSchema(std::vector<Feature> features);

    std::size_t size() const { return features_.size(); }
    const Feature& at(std::size_t i) const { return features_.at(i); }
    const std::vector<Feature>& features() const { return features_; }

    std::optional<std::size_t> index_of(std::string_view name) const;

    /// Index of `value` in the feature's category list, or -1 if unknown.
    int category_index(std::size_t feature, std::string_view value) const;

    bool operator==(const FeatureSchema& other) const;

    nlohmann::json to_json() const;
    static FeatureSchema from_json(const nlohmann::json& j);

private:
    std::vector<Feature> features_;
};

/// Schema file payload: feature declarations plus the optional label column.
struct SchemaFile {
    FeatureSchema schema;
    std::optional<std::string> label_column;
};

SchemaFile load_schema_file(const std::string& path);
SchemaFile parse_schema_json(const nlohmann::json& j);

/// Rows store numeric values directly and categorical values as the category
/// index within the schema's declared list.
class Dataset {
public:
    Dataset() = default;
    Dataset(FeatureSchema schema, std::vector<std::vector<double>> rows,
            std::optional<std::vector<int>> labels = std::nullopt);

    const FeatureSchema& schema() const { return schema_; }
    std::size_t size() const { return rows_.size(); }
    std::size_t num_features() const { return schema_.size(); }
    bool has_labels() const { return labels_.has_value(); }
    const std::vector<int>& labels() const;
    int label(std::size_t row) const { return labels().at(row); }

    const std::vector<double>& row(std::size_t i) const { return rows_.at(i); }
    double value(std::size_t row, std::size_t feature) const { return rows_.at(row).at(feature); }

    /// Subset by row indices (labels carried along when present).
    Dataset select(const std::vector<std::size_t>& indices) const;

    /// Row-wise concatenation; schemas must match. Labels kept only if both sides have them.
    static Dataset concat(const Dataset& a, const Dataset& b);

    void write_csv(const std::string& path, const std::string& label_column = "label") const;

private:
    FeatureSchema schema_;
    std::vector<std::vector<double>> rows_;
    std::optional<std::vector<int>> labels_;
};

Dataset load_csv(const std::string& path, const FeatureSchema& schema,
                 const std::optional<std::string>& label_column = std::nullopt);

/// Maps an encoded column back to its schema feature; `category` is the
/// one-hot slot for categoricals and -1 for numerics.
struct ColumnRef {
    std::size_t feature;
    int category;
};

/// Immutable fit artifacts: standardization statistics, raw numeric ranges,
/// and the encoded-column layout. Reused verbatim for any dataset encoded
/// against it.
class EncodingState {
public:
    explicit EncodingState(const Dataset& fit_set);

    const FeatureSchema& schema() const { return schema_; }
    std::size_t encoded_width() const { return column_map_.size(); }
    const std::vector<ColumnRef>& column_map() const { return column_map_; }
    std::size_t column_start(std::size_t feature) const { return col_start_.at(feature); }
    std::size_t column_count(std::size_t feature) const;

    double mean(std::size_t feature) const { return means_.at(feature); }
    double stddev(std::size_t feature) const { return stds_.at(feature); }
    double range(std::size_t feature) const { return range_max_.at(feature) - range_min_.at(feature); }

    /// Standardize one numeric raw value (zero-variance features map to 0).
    double encode_numeric(std::size_t feature, double raw) const;

    Eigen::VectorXd encode_row(const std::vector<double>& raw) const;

    nlohmann::json to_json() const;
    static std::shared_ptr<const EncodingState> from_json(const nlohmann::json& j);

private:
    EncodingState() = default;

    FeatureSchema schema_;
    std::vector<double> means_, stds_;           // indexed by feature (0 for categoricals)
    std::vector<double> range_min_, range_max_;  // raw numeric ranges from the fit set
    std::vector<ColumnRef> column_map_;
    std::vector<std::size_t> col_start_;
};

struct EncodedMatrix {
    Eigen::MatrixXd values;  // n x p
    std::shared_ptr<const EncodingState> state;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

/// Fit standardization/one-hot layout on `ds` and encode it.
EncodedMatrix fit_encoding(const Dataset& ds);

/// Encode `ds` with previously fit statistics; never refits.
EncodedMatrix encode_with(const Dataset& ds, std::shared_ptr<const EncodingState> state);

enum class Metric { Euclidean, Gower };

Metric metric_from_string(std::string_view s);
const char* metric_name(Metric m);

/// Distance between two encoded rows. Gower needs the encoding state to
/// attribute columns to features and recover raw numeric ranges.
double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Metric metric,
                const EncodingState* state = nullptr);

/// Per-feature empirical value pools observed in a reference dataset.
class MarginalTable {
public:
    static MarginalTable from_dataset(const Dataset& ds);

    const FeatureSchema& schema() const { return schema_; }

    /// Sorted raw value pool (numeric features).
    const std::vector<double>& numeric_pool(std::size_t feature) const;

    /// Per-category occurrence counts (categorical features).
    const std::vector<std::size_t>& category_counts(std::size_t feature) const;

    /// Draw one raw value (numeric) or category index (categorical) from the
    /// feature's empirical distribution.
    double sample(std::size_t feature, RandomEngine& rng) const;

private:
    struct Entry {
        std::vector<double> pool;           // numeric
        std::vector<std::size_t> counts;    // categorical
        std::size_t total = 0;
    };

    FeatureSchema schema_;
    std::vector<Entry> entries_;
};

inline MarginalTable marginals(const Dataset& ds) { return MarginalTable::from_dataset(ds); }

}  // namespace itl
