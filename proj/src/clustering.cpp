#include "itl/clustering.hpp"

#include <algorithm>
#include <limits>

namespace itl {

namespace {

double row_distance(const EncodedMatrix& data, std::size_t a, std::size_t b, Metric metric) {
    return distance(data.values.row(static_cast<Eigen::Index>(a)).transpose(),
                    data.values.row(static_cast<Eigen::Index>(b)).transpose(), metric,
                    data.state.get());
}

// Nearest medoid; distance ties break toward the lowest medoid row index,
// except that a medoid row always claims its own cluster (distance 0, and the
// medoid-membership invariant must hold even with duplicate points).
std::size_t nearest_medoid(const EncodedMatrix& data, std::size_t row,
                           const std::vector<std::size_t>& medoids, Metric metric,
                           double* out_dist = nullptr) {
    for (std::size_t k = 0; k < medoids.size(); ++k) {
        if (medoids[k] == row) {
            if (out_dist) *out_dist = 0.0;
            return k;
        }
    }
    std::size_t best_cluster = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    std::size_t best_row = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k < medoids.size(); ++k) {
        const double d = row_distance(data, row, medoids[k], metric);
        if (d < best_dist || (d == best_dist && medoids[k] < best_row)) {
            best_dist = d;
            best_cluster = k;
            best_row = medoids[k];
        }
    }
    if (out_dist) *out_dist = best_dist;
    return best_cluster;
}

}  // namespace

double clustering_cost(const EncodedMatrix& data, const std::vector<std::size_t>& medoids,
                       Metric metric) {
    double cost = 0.0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
        double d = 0.0;
        nearest_medoid(data, r, medoids, metric, &d);
        cost += d;
    }
    return cost;
}

ClusteringResult kmedoids_from(const EncodedMatrix& data, std::vector<std::size_t> medoids,
                               Metric metric, std::size_t max_iters) {
    const std::size_t n = data.rows();
    if (n == 0) fail(Errc::EmptyData, "cannot cluster an empty matrix");
    const std::size_t k = medoids.size();
    if (k == 0 || k > n)
        fail(Errc::KTooLarge, "k = " + std::to_string(k) + " with n = " + std::to_string(n));
    if (max_iters < 1) fail(Errc::InvalidConfig, "max_iters must be >= 1");
    {
        std::vector<std::size_t> sorted = medoids;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.back() >= n)
            fail(Errc::InvalidConfig, "initial medoids must be distinct row indices");
    }

    ClusteringResult res;
    res.assignment.assign(n, 0);

    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        // Assignment phase.
        for (auto& m : members) m.clear();
        double cost = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double d = 0.0;
            const std::size_t c = nearest_medoid(data, r, medoids, metric, &d);
            res.assignment[r] = c;
            members[c].push_back(r);
            cost += d;
        }
        res.cost_trace.push_back(cost);
        res.iterations = iter + 1;

        // Swap phase: per cluster, pick the member with minimal distance sum
        // to all cluster members. Ties keep the lowest row index.
        bool changed = false;
        for (std::size_t c = 0; c < k; ++c) {
            const auto& group = members[c];
            if (group.empty()) continue;  // empty cluster keeps its medoid
            std::size_t best = group.front();
            double best_sum = std::numeric_limits<double>::infinity();
            for (std::size_t cand : group) {
                double sum = 0.0;
                for (std::size_t other : group) sum += row_distance(data, cand, other, metric);
                if (sum < best_sum || (sum == best_sum && cand < best)) {
                    best_sum = sum;
                    best = cand;
                }
            }
            if (best != medoids[c]) {
                medoids[c] = best;
                changed = true;
            }
        }
        if (!changed) break;
    }

    // Final assignment against the converged medoids.
    double cost = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double d = 0.0;
        res.assignment[r] = nearest_medoid(data, r, medoids, metric, &d);
        cost += d;
    }
    res.medoid_indices = std::move(medoids);
    res.total_cost = cost;
    if (res.cost_trace.empty() || cost != res.cost_trace.back()) res.cost_trace.push_back(cost);
    return res;
}

ClusteringResult kmedoids(const EncodedMatrix& data, std::size_t k, Metric metric,
                          std::uint64_t seed, std::size_t max_iters) {
    const std::size_t n = data.rows();
    if (n == 0) fail(Errc::EmptyData, "cannot cluster an empty matrix");
    if (k == 0 || k > n)
        fail(Errc::KTooLarge, "k = " + std::to_string(k) + " with n = " + std::to_string(n));
    RandomEngine rng(seed);
    auto init = rng.sample_without_replacement(n, k);
    std::sort(init.begin(), init.end());
    return kmedoids_from(data, std::move(init), metric, max_iters);
}

ClusteringResult kmedoids_restarts(const EncodedMatrix& data, std::size_t k, Metric metric,
                                   std::uint64_t seed, std::size_t restarts,
                                   std::size_t max_iters) {
    if (restarts < 1) fail(Errc::InvalidConfig, "restarts must be >= 1");
    ClusteringResult best;
    bool have = false;
    for (std::size_t r = 0; r < restarts; ++r) {
        ClusteringResult cur =
            kmedoids(data, k, metric, derive_seed(seed, "restart/" + std::to_string(r)), max_iters);
        if (!have || cur.total_cost < best.total_cost) {
            best = std::move(cur);
            have = true;
        }
    }
    return best;
}

double silhouette(const EncodedMatrix& data, const ClusteringResult& result, Metric metric) {
    const std::size_t n = data.rows();
    const std::size_t k = result.k();
    if (k < 2) fail(Errc::SingleCluster, "silhouette needs at least 2 clusters");
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t r = 0; r < n; ++r) ++sizes.at(result.assignment[r]);
    for (std::size_t c = 0; c < k; ++c)
        if (sizes[c] == 0) fail(Errc::SingleCluster, "cluster " + std::to_string(c) + " is empty");

    double total = 0.0;
    std::vector<double> mean_dist(k);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = result.assignment[i];
        if (sizes[own] == 1) continue;  // singleton contributes 0
        std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            mean_dist[result.assignment[j]] += row_distance(data, i, j, metric);
        }
        const double a = mean_dist[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own) continue;
            b = std::min(b, mean_dist[c] / static_cast<double>(sizes[c]));
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

KSelection choose_k(const EncodedMatrix& data, const std::vector<std::size_t>& candidates,
                    Metric metric, std::uint64_t seed, std::size_t restarts) {
    if (candidates.empty()) fail(Errc::InvalidConfig, "no K candidates given");
    KSelection sel;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k : candidates) {
        if (k < 2) fail(Errc::InvalidConfig, "K candidates must be >= 2");
        ClusteringResult res =
            kmedoids_restarts(data, k, metric, derive_seed(seed, "k/" + std::to_string(k)), restarts);
        const double score = silhouette(data, res, metric);
        sel.scores.emplace_back(k, score);
        if (score > best_score || (score == best_score && k < sel.k)) {
            best_score = score;
            sel.k = k;
        }
    }
    return sel;
}

nlohmann::json ClusteringResult::to_json() const {
    return nlohmann::json{{"medoids", medoid_indices},
                          {"assignment", assignment},
                          {"cost", total_cost},
                          {"k", medoid_indices.size()}};
}

ClusteringResult ClusteringResult::from_json(const nlohmann::json& j) {
    ClusteringResult r;
    r.medoid_indices = j.at("medoids").get<std::vector<std::size_t>>();
    r.assignment = j.at("assignment").get<std::vector<std::size_t>>();
    r.total_cost = j.at("cost").get<double>();
    return r;
}

}  // namespace itl
