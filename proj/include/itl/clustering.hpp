#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "itl/tabular.hpp"

namespace itl {

struct ClusteringResult {
    std::vector<std::size_t> medoid_indices;  // K row indices into the clustered data
    std::vector<std::size_t> assignment;      // per-row cluster id in [0, K)
    double total_cost = 0.0;                  // sum of within-cluster distances to medoids
    std::size_t iterations = 0;
    std::vector<double> cost_trace;           // cost after each assignment phase

    std::size_t k() const { return medoid_indices.size(); }

    nlohmann::json to_json() const;
    static ClusteringResult from_json(const nlohmann::json& j);
};

/// Objective value for an arbitrary medoid set: every row pays its distance
/// to the nearest medoid. Summation runs in row order.
double clustering_cost(const EncodedMatrix& data, const std::vector<std::size_t>& medoids,
                       Metric metric);

/// Alternating assign/swap from a caller-supplied initialization. Each swap
/// phase re-centers every cluster on the member minimizing the sum of
/// distances to its cluster mates; stops when no medoid moves.
ClusteringResult kmedoids_from(const EncodedMatrix& data, std::vector<std::size_t> initial_medoids,
                               Metric metric, std::size_t max_iters = 100);

/// Seeded-initialization K-medoids. Initial medoids are K distinct row
/// indices drawn with the seeded generator.
ClusteringResult kmedoids(const EncodedMatrix& data, std::size_t k, Metric metric,
                          std::uint64_t seed, std::size_t max_iters = 100);

/// Mean silhouette over all points. Singleton clusters contribute 0, as do
/// points with a == b == 0.
double silhouette(const EncodedMatrix& data, const ClusteringResult& result, Metric metric);

struct KSelection {
    std::size_t k = 0;
    std::vector<std::pair<std::size_t, double>> scores;  // (candidate, silhouette)
};

/// Evaluate each candidate K with `restarts` seeded runs (keeping the
/// best-cost clustering), then pick the silhouette argmax; ties go to the
/// smaller K.
KSelection choose_k(const EncodedMatrix& data, const std::vector<std::size_t>& candidates,
                    Metric metric, std::uint64_t seed, std::size_t restarts = 10);

/// Best-cost clustering across `restarts` seeded runs.
ClusteringResult kmedoids_restarts(const EncodedMatrix& data, std::size_t k, Metric metric,
                                   std::uint64_t seed, std::size_t restarts,
                                   std::size_t max_iters = 100);

}  // namespace itl
