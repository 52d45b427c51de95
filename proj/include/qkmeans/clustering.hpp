#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qkmeans/dataset.hpp"
#include "qkmeans/distance.hpp"
#include "qkmeans/encoding.hpp"

namespace qkm {

enum class InitMethod { QKMeansPlusPlus, RandomSample };

enum class DistanceMode { QuantumExact, QuantumSampled, ClassicalEuclidean };

[[nodiscard]] constexpr bool is_quantum(DistanceMode mode) noexcept {
    return mode != DistanceMode::ClassicalEuclidean;
}

struct FitConfig {
    std::size_t n_clusters = 2;
    std::size_t max_iter = 30;
    double tol = 1e-4;
    InitMethod init = InitMethod::QKMeansPlusPlus;
    DistanceMode distance_mode = DistanceMode::QuantumExact;
    Encoding encoding = Encoding::Amplitude;
    BatchConfig batch;
    std::uint64_t seed = 0;
};

struct ClusterModel {
    std::size_t n_features = 0;
    /// Row-major K x F, in the original feature space.
    std::vector<double> cluster_centers;
    std::vector<int> labels;
    /// L1 center shift of each iteration.
    std::vector<double> inertia_history;
    std::size_t n_iter = 0;
    bool converged = false;
    /// Job accounting of each assignment step (quantum modes only).
    std::vector<BatchStats> batch_history;

    [[nodiscard]] std::size_t n_clusters() const noexcept {
        return n_features ? cluster_centers.size() / n_features : 0;
    }
    [[nodiscard]] std::span<const double> center(std::size_t k) const {
        return {cluster_centers.data() + k * n_features, n_features};
    }
};

/// Row-major N x K distances from every row of `data` to every center.
/// `stats` receives the job accounting when the mode is quantum.
[[nodiscard]] std::vector<double> distance_matrix(const DataSet& data, std::span<const double> centers,
                                                  DistanceMode mode, Encoding encoding,
                                                  const BatchConfig& batch, BatchStats* stats = nullptr);

/**
 * Greedy farthest-point seeding. The first center is `data.row(first_index)`;
 * each following one is the unused row with the largest distance to its
 * closest chosen center (lowest index wins ties).
 */
[[nodiscard]] std::vector<double> farthest_point_centers(const DataSet& data, std::size_t n_clusters,
                                                         std::size_t first_index, DistanceMode mode,
                                                         Encoding encoding = Encoding::Amplitude,
                                                         const BatchConfig& batch = {});

/// qk-means++: farthest_point_centers with a uniformly drawn first row.
[[nodiscard]] std::vector<double> qkmeans_plusplus_init(const DataSet& data, std::size_t n_clusters,
                                                        DistanceMode mode, std::uint64_t seed,
                                                        Encoding encoding = Encoding::Amplitude,
                                                        const BatchConfig& batch = {});

/// Lloyd-style qk-means. Throws std::invalid_argument when N < K or the data
/// is empty or non-finite.
[[nodiscard]] ClusterModel fit(const DataSet& data, const FitConfig& config);

/// Nearest center for each row; ties go to the lowest center index.
[[nodiscard]] std::vector<int> predict(const ClusterModel& model, const DataSet& data, DistanceMode mode,
                                       Encoding encoding = Encoding::Amplitude, const BatchConfig& batch = {});

/// Classical k-means with Euclidean distances and the same init, tie and
/// empty-cluster rules as fit().
[[nodiscard]] ClusterModel classical_kmeans_oracle(const DataSet& data, std::size_t n_clusters,
                                                   std::uint64_t seed, std::size_t max_iter = 30,
                                                   double tol = 1e-4);

} // namespace qkm
