#include "itl/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace itl {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::MissingColumn: return "MissingColumn";
        case Errc::UnknownCategory: return "UnknownCategory";
        case Errc::NonNumericValue: return "NonNumericValue";
        case Errc::EmptyFile: return "EmptyFile";
        case Errc::EmptyDataset: return "EmptyDataset";
        case Errc::SchemaMismatch: return "SchemaMismatch";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::KTooLarge: return "KTooLarge";
        case Errc::EmptyData: return "EmptyData";
        case Errc::SingleCluster: return "SingleCluster";
        case Errc::NoClusters: return "NoClusters";
        case Errc::NonFiniteInput: return "NonFiniteInput";
        case Errc::TooFewInstances: return "TooFewInstances";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::UntrainedNet: return "UntrainedNet";
        case Errc::AllZeroWeights: return "AllZeroWeights";
        case Errc::SingularSystem: return "SingularSystem";
        case Errc::SingleClassData: return "SingleClassData";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::ZeroPerturbation: return "ZeroPerturbation";
        case Errc::InvalidSpec: return "InvalidSpec";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::IoError: return "IoError";
        case Errc::StageFailure: return "StageFailure";
    }
    return "UnknownError";
}

// ---------------------------------------------------------------------------
// FeatureSchema

FeatureSchema::FeatureSchema(std::vector<Feature> features) : features_(std::move(features)) {
    std::unordered_set<std::string> names;
    for (const auto& f : features_) {
        if (!names.insert(f.name).second)
            fail(Errc::InvalidSpec, "duplicate feature name '" + f.name + "'");
        if (f.kind == FeatureKind::Categorical && f.categories.empty())
            fail(Errc::InvalidSpec, "categorical feature '" + f.name + "' declares no categories");
        if (f.kind == FeatureKind::Numeric && !f.categories.empty())
            fail(Errc::InvalidSpec, "numeric feature '" + f.name + "' declares categories");
    }
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < features_.size(); ++i)
        if (features_[i].name == name) return i;
    return std::nullopt;
}

int FeatureSchema::category_index(std::size_t feature, std::string_view value) const {
    const auto& cats = features_.at(feature).categories;
    for (std::size_t i = 0; i < cats.size(); ++i)
        if (cats[i] == value) return static_cast<int>(i);
    return -1;
}

bool FeatureSchema::operator==(const FeatureSchema& other) const {
    if (features_.size() != other.features_.size()) return false;
    for (std::size_t i = 0; i < features_.size(); ++i) {
        const auto& a = features_[i];
        const auto& b = other.features_[i];
        if (a.name != b.name || a.kind != b.kind || a.categories != b.categories) return false;
    }
    return true;
}

nlohmann::json FeatureSchema::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : features_) {
        nlohmann::json jf{{"name", f.name},
                          {"kind", f.kind == FeatureKind::Numeric ? "numeric" : "categorical"}};
        if (f.kind == FeatureKind::Categorical) jf["categories"] = f.categories;
        arr.push_back(std::move(jf));
    }
    return nlohmann::json{{"features", arr}};
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
    return parse_schema_json(j).schema;
}

SchemaFile parse_schema_json(const nlohmann::json& j) {
    if (!j.contains("features") || !j["features"].is_array())
        fail(Errc::InvalidConfig, "schema document must contain a \"features\" array");
    std::vector<Feature> features;
    for (const auto& jf : j["features"]) {
        Feature f;
        if (!jf.contains("name") || !jf.contains("kind"))
            fail(Errc::InvalidConfig, "schema feature entries need \"name\" and \"kind\"");
        f.name = jf["name"].get<std::string>();
        const std::string kind = jf["kind"].get<std::string>();
        if (kind == "numeric") {
            f.kind = FeatureKind::Numeric;
        } else if (kind == "categorical") {
            f.kind = FeatureKind::Categorical;
            if (jf.contains("categories"))
                f.categories = jf["categories"].get<std::vector<std::string>>();
        } else {
            fail(Errc::InvalidConfig, "unknown feature kind '" + kind + "'");
        }
        features.push_back(std::move(f));
    }
    SchemaFile out{FeatureSchema(std::move(features)), std::nullopt};
    if (j.contains("label_column")) out.label_column = j["label_column"].get<std::string>();
    return out;
}

SchemaFile load_schema_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::IoError, "cannot open schema file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::InvalidConfig, "schema file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_schema_json(j);
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(FeatureSchema schema, std::vector<std::vector<double>> rows,
                 std::optional<std::vector<int>> labels)
    : schema_(std::move(schema)), rows_(std::move(rows)), labels_(std::move(labels)) {
    const std::size_t d = schema_.size();
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].size() != d)
            fail(Errc::SchemaMismatch, "row " + std::to_string(r) + " has " +
                                           std::to_string(rows_[r].size()) + " values, expected " +
                                           std::to_string(d));
        for (std::size_t f = 0; f < d; ++f) {
            const Feature& feat = schema_.at(f);
            if (feat.kind == FeatureKind::Categorical) {
                const double v = rows_[r][f];
                const int idx = static_cast<int>(v);
                if (v != static_cast<double>(idx) || idx < 0 ||
                    idx >= static_cast<int>(feat.categories.size()))
                    fail(Errc::UnknownCategory, "feature '" + feat.name + "' row " +
                                                    std::to_string(r) + " has invalid category index");
            }
        }
    }
    if (labels_) {
        if (labels_->size() != rows_.size())
            fail(Errc::LengthMismatch, "labels length " + std::to_string(labels_->size()) +
                                           " != row count " + std::to_string(rows_.size()));
        for (int y : *labels_)
            if (y != 0 && y != 1) fail(Errc::InvalidSpec, "labels must be 0 or 1");
    }
}

const std::vector<int>& Dataset::labels() const {
    if (!labels_) fail(Errc::InvalidSpec, "dataset has no labels");
    return *labels_;
}

Dataset Dataset::select(const std::vector<std::size_t>& indices) const {
    std::vector<std::vector<double>> rows;
    rows.reserve(indices.size());
    std::optional<std::vector<int>> labels;
    if (labels_) labels.emplace();
    for (std::size_t i : indices) {
        rows.push_back(rows_.at(i));
        if (labels_) labels->push_back(labels_->at(i));
    }
    return Dataset(schema_, std::move(rows), std::move(labels));
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
    if (!(a.schema_ == b.schema_)) fail(Errc::SchemaMismatch, "concat: schemas differ");
    std::vector<std::vector<double>> rows = a.rows_;
    rows.insert(rows.end(), b.rows_.begin(), b.rows_.end());
    std::optional<std::vector<int>> labels;
    if (a.labels_ && b.labels_) {
        labels = *a.labels_;
        labels->insert(labels->end(), b.labels_->begin(), b.labels_->end());
    }
    return Dataset(a.schema_, std::move(rows), std::move(labels));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto end_field = [&]() {
        fields.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&]() {
        end_field();
        records.push_back(fields);
        fields.clear();
    };
    while (i < n) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            // swallow; record ends on the following '\n'
        } else if (c == '\n') {
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
        ++i;
    }
    if (field_started || !field.empty() || !fields.empty()) end_record();
    return records;
}

double parse_double_or_fail(const std::string& s, std::size_t row, const std::string& feature) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    double v = 0.0;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e)
        fail(Errc::NonNumericValue, "row " + std::to_string(row) + ", feature '" + feature +
                                        "': cannot parse '" + s + "' as a number");
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const FeatureSchema& schema,
                 const std::optional<std::string>& label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::IoError, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto records = parse_csv(buf.str());
    if (records.empty()) fail(Errc::EmptyFile, "'" + path + "' has no header row");

    const auto& header = records.front();
    std::unordered_map<std::string, std::size_t> col_of;
    for (std::size_t c = 0; c < header.size(); ++c) col_of[header[c]] = c;

    std::vector<std::size_t> feature_cols(schema.size());
    for (std::size_t f = 0; f < schema.size(); ++f) {
        auto it = col_of.find(schema.at(f).name);
        if (it == col_of.end())
            fail(Errc::MissingColumn, "'" + path + "' lacks column '" + schema.at(f).name + "'");
        feature_cols[f] = it->second;
    }
    std::optional<std::size_t> label_col;
    if (label_column) {
        auto it = col_of.find(*label_column);
        if (it == col_of.end())
            fail(Errc::MissingColumn, "'" + path + "' lacks label column '" + *label_column + "'");
        label_col = it->second;
    }
    {
        std::unordered_set<std::string> known;
        for (std::size_t f = 0; f < schema.size(); ++f) known.insert(schema.at(f).name);
        if (label_column) known.insert(*label_column);
        for (const auto& h : header)
            if (!known.count(h))
                fail(Errc::SchemaMismatch, "'" + path + "' has unexpected column '" + h + "'");
    }

    if (records.size() == 1) fail(Errc::EmptyFile, "'" + path + "' has a header but no data rows");

    std::vector<std::vector<double>> rows;
    std::optional<std::vector<int>> labels;
    if (label_col) labels.emplace();
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != header.size())
            fail(Errc::SchemaMismatch, "row " + std::to_string(r) + " has " +
                                           std::to_string(rec.size()) + " fields, expected " +
                                           std::to_string(header.size()));
        std::vector<double> row(schema.size());
        for (std::size_t f = 0; f < schema.size(); ++f) {
            const Feature& feat = schema.at(f);
            const std::string& cell = rec[feature_cols[f]];
            if (feat.kind == FeatureKind::Numeric) {
                row[f] = parse_double_or_fail(cell, r, feat.name);
            } else {
                const int idx = schema.category_index(f, cell);
                if (idx < 0)
                    fail(Errc::UnknownCategory,
                         "feature '" + feat.name + "' row " + std::to_string(r) +
                             ": category '" + cell + "' not declared in schema");
                row[f] = static_cast<double>(idx);
            }
        }
        rows.push_back(std::move(row));
        if (label_col) {
            const double y = parse_double_or_fail(rec[*label_col], r, *label_column);
            if (y != 0.0 && y != 1.0)
                fail(Errc::InvalidSpec, "row " + std::to_string(r) + ": label must be 0 or 1");
            labels->push_back(static_cast<int>(y));
        }
    }
    return Dataset(schema, std::move(rows), std::move(labels));
}

void Dataset::write_csv(const std::string& path, const std::string& label_column) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::IoError, "cannot write '" + path + "'");
    for (std::size_t f = 0; f < schema_.size(); ++f) {
        if (f) out << ',';
        out << schema_.at(f).name;
    }
    if (labels_) out << ',' << label_column;
    out << '\n';
    char buf[64];
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        for (std::size_t f = 0; f < schema_.size(); ++f) {
            if (f) out << ',';
            const Feature& feat = schema_.at(f);
            if (feat.kind == FeatureKind::Numeric) {
                std::snprintf(buf, sizeof(buf), "%.17g", rows_[r][f]);
                out << buf;
            } else {
                out << feat.categories[static_cast<std::size_t>(rows_[r][f])];
            }
        }
        if (labels_) out << ',' << (*labels_)[r];
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// EncodingState

EncodingState::EncodingState(const Dataset& fit_set) {
    if (fit_set.size() == 0) fail(Errc::EmptyDataset, "cannot fit encoding on an empty dataset");
    schema_ = fit_set.schema();
    const std::size_t d = schema_.size();
    const std::size_t n = fit_set.size();
    means_.assign(d, 0.0);
    stds_.assign(d, 0.0);
    range_min_.assign(d, 0.0);
    range_max_.assign(d, 0.0);
    col_start_.assign(d, 0);

    for (std::size_t f = 0; f < d; ++f) {
        const Feature& feat = schema_.at(f);
        col_start_[f] = column_map_.size();
        if (feat.kind == FeatureKind::Numeric) {
            double mean = 0.0;
            double lo = fit_set.value(0, f), hi = lo;
            for (std::size_t r = 0; r < n; ++r) {
                const double v = fit_set.value(r, f);
                mean += v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double dlt = fit_set.value(r, f) - mean;
                var += dlt * dlt;
            }
            var /= static_cast<double>(n);  // population variance
            means_[f] = mean;
            stds_[f] = std::sqrt(var);
            range_min_[f] = lo;
            range_max_[f] = hi;
            column_map_.push_back({f, -1});
        } else {
            for (std::size_t c = 0; c < feat.categories.size(); ++c)
                column_map_.push_back({f, static_cast<int>(c)});
        }
    }
}

std::size_t EncodingState::column_count(std::size_t feature) const {
    const Feature& feat = schema_.at(feature);
    return feat.kind == FeatureKind::Numeric ? 1 : feat.categories.size();
}

double EncodingState::encode_numeric(std::size_t feature, double raw) const {
    const double s = stds_.at(feature);
    return s > 0.0 ? (raw - means_.at(feature)) / s : 0.0;
}

Eigen::VectorXd EncodingState::encode_row(const std::vector<double>& raw) const {
    if (raw.size() != schema_.size())
        fail(Errc::SchemaMismatch, "row width " + std::to_string(raw.size()) +
                                       " != schema size " + std::to_string(schema_.size()));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(encoded_width()));
    for (std::size_t f = 0; f < schema_.size(); ++f) {
        const Feature& feat = schema_.at(f);
        const std::size_t c0 = col_start_[f];
        if (feat.kind == FeatureKind::Numeric) {
            out[static_cast<Eigen::Index>(c0)] = encode_numeric(f, raw[f]);
        } else {
            const int idx = static_cast<int>(raw[f]);
            if (raw[f] != static_cast<double>(idx) || idx < 0 ||
                idx >= static_cast<int>(feat.categories.size()))
                fail(Errc::SchemaMismatch,
                     "feature '" + feat.name + "': category index out of range");
            out[static_cast<Eigen::Index>(c0 + static_cast<std::size_t>(idx))] = 1.0;
        }
    }
    return out;
}

nlohmann::json EncodingState::to_json() const {
    return nlohmann::json{{"schema", schema_.to_json()},
                          {"means", means_},
                          {"stds", stds_},
                          {"range_min", range_min_},
                          {"range_max", range_max_}};
}

std::shared_ptr<const EncodingState> EncodingState::from_json(const nlohmann::json& j) {
    auto st = std::shared_ptr<EncodingState>(new EncodingState());
    st->schema_ = FeatureSchema::from_json(j.at("schema"));
    st->means_ = j.at("means").get<std::vector<double>>();
    st->stds_ = j.at("stds").get<std::vector<double>>();
    st->range_min_ = j.at("range_min").get<std::vector<double>>();
    st->range_max_ = j.at("range_max").get<std::vector<double>>();
    const std::size_t d = st->schema_.size();
    if (st->means_.size() != d || st->stds_.size() != d || st->range_min_.size() != d ||
        st->range_max_.size() != d)
        fail(Errc::InvalidConfig, "encoding state arrays do not match schema size");
    st->col_start_.assign(d, 0);
    for (std::size_t f = 0; f < d; ++f) {
        const Feature& feat = st->schema_.at(f);
        st->col_start_[f] = st->column_map_.size();
        if (feat.kind == FeatureKind::Numeric) {
            st->column_map_.push_back({f, -1});
        } else {
            for (std::size_t c = 0; c < feat.categories.size(); ++c)
                st->column_map_.push_back({f, static_cast<int>(c)});
        }
    }
    return st;
}

EncodedMatrix fit_encoding(const Dataset& ds) {
    auto state = std::make_shared<const EncodingState>(ds);
    EncodedMatrix m = encode_with(ds, state);
    return m;
}

EncodedMatrix encode_with(const Dataset& ds, std::shared_ptr<const EncodingState> state) {
    if (!state) fail(Errc::InvalidConfig, "null encoding state");
    if (!(ds.schema() == state->schema()))
        fail(Errc::SchemaMismatch, "dataset schema does not match encoding state");
    EncodedMatrix out;
    out.state = state;
    out.values.resize(static_cast<Eigen::Index>(ds.size()),
                      static_cast<Eigen::Index>(state->encoded_width()));
    for (std::size_t r = 0; r < ds.size(); ++r)
        out.values.row(static_cast<Eigen::Index>(r)) = state->encode_row(ds.row(r)).transpose();
    return out;
}

// ---------------------------------------------------------------------------
// Distances

Metric metric_from_string(std::string_view s) {
    if (s == "euclidean") return Metric::Euclidean;
    if (s == "gower") return Metric::Gower;
    fail(Errc::InvalidConfig, "unknown metric '" + std::string(s) + "'");
}

const char* metric_name(Metric m) {
    return m == Metric::Euclidean ? "euclidean" : "gower";
}

double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Metric metric,
                const EncodingState* state) {
    if (a.size() != b.size())
        fail(Errc::DimensionMismatch, "encoded rows have widths " + std::to_string(a.size()) +
                                          " and " + std::to_string(b.size()));
    if (metric == Metric::Euclidean) return (a - b).norm();

    if (state == nullptr) fail(Errc::InvalidConfig, "gower distance requires an encoding state");
    if (static_cast<std::size_t>(a.size()) != state->encoded_width())
        fail(Errc::DimensionMismatch, "encoded rows do not match the encoding state width");
    const FeatureSchema& schema = state->schema();
    double total = 0.0;
    for (std::size_t f = 0; f < schema.size(); ++f) {
        const Feature& feat = schema.at(f);
        const std::size_t c0 = state->column_start(f);
        if (feat.kind == FeatureKind::Numeric) {
            const double range = state->range(f);
            if (range > 0.0) {
                const double raw_diff =
                    std::abs(a[static_cast<Eigen::Index>(c0)] - b[static_cast<Eigen::Index>(c0)]) *
                    state->stddev(f);
                total += std::min(1.0, raw_diff / range);
            }
        } else {
            const std::size_t len = feat.categories.size();
            bool same = true;
            for (std::size_t c = 0; c < len; ++c) {
                if (a[static_cast<Eigen::Index>(c0 + c)] != b[static_cast<Eigen::Index>(c0 + c)]) {
                    same = false;
                    break;
                }
            }
            total += same ? 0.0 : 1.0;
        }
    }
    return total / static_cast<double>(schema.size());
}

// ---------------------------------------------------------------------------
// MarginalTable

MarginalTable MarginalTable::from_dataset(const Dataset& ds) {
    if (ds.size() == 0) fail(Errc::EmptyDataset, "cannot build marginals from an empty dataset");
    MarginalTable t;
    t.schema_ = ds.schema();
    t.entries_.resize(t.schema_.size());
    for (std::size_t f = 0; f < t.schema_.size(); ++f) {
        Entry& e = t.entries_[f];
        const Feature& feat = t.schema_.at(f);
        if (feat.kind == FeatureKind::Numeric) {
            e.pool.reserve(ds.size());
            for (std::size_t r = 0; r < ds.size(); ++r) e.pool.push_back(ds.value(r, f));
            std::sort(e.pool.begin(), e.pool.end());
            e.total = e.pool.size();
        } else {
            e.counts.assign(feat.categories.size(), 0);
            for (std::size_t r = 0; r < ds.size(); ++r)
                ++e.counts[static_cast<std::size_t>(ds.value(r, f))];
            e.total = ds.size();
        }
    }
    return t;
}

const std::vector<double>& MarginalTable::numeric_pool(std::size_t feature) const {
    const Entry& e = entries_.at(feature);
    if (schema_.at(feature).kind != FeatureKind::Numeric)
        fail(Errc::InvalidConfig, "feature " + std::to_string(feature) + " is not numeric");
    return e.pool;
}

const std::vector<std::size_t>& MarginalTable::category_counts(std::size_t feature) const {
    const Entry& e = entries_.at(feature);
    if (schema_.at(feature).kind != FeatureKind::Categorical)
        fail(Errc::InvalidConfig, "feature " + std::to_string(feature) + " is not categorical");
    return e.counts;
}

double MarginalTable::sample(std::size_t feature, RandomEngine& rng) const {
    const Entry& e = entries_.at(feature);
    if (schema_.at(feature).kind == FeatureKind::Numeric)
        return e.pool[rng.uniform_index(e.pool.size())];
    std::size_t t = rng.uniform_index(e.total);
    for (std::size_t c = 0; c < e.counts.size(); ++c) {
        if (t < e.counts[c]) return static_cast<double>(c);
        t -= e.counts[c];
    }
    return static_cast<double>(e.counts.size() - 1);
}

}  // namespace itl
