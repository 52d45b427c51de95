#pragma once

#include <cstddef>
#include <span>

#include "qkmeans/distance.hpp"

namespace qkm {

/// N samples, K clusters, F features, I iterations, C circuits per job.
struct ComplexityParams {
    double n_samples = 1;
    double n_clusters = 1;
    double n_features = 1;
    double n_iterations = 1;
    double circuits_per_job = 900;

    void validate() const;
};

/// N * K * F * I
[[nodiscard]] double classical_cost(const ComplexityParams& p);

/// N * K * log2(max(F, 2)) * I / C
[[nodiscard]] double quantum_cost(const ComplexityParams& p);

/// ceil(N * K / C)
[[nodiscard]] std::size_t expected_jobs_per_iteration(std::size_t n_samples, std::size_t n_clusters,
                                                      std::size_t circuits_per_job);

/// True iff every entry of `history` submitted exactly ceil(N * K / C) jobs.
[[nodiscard]] bool verify_job_counts(std::span<const BatchStats> history, std::size_t n_samples,
                                     std::size_t n_clusters, std::size_t circuits_per_job);

} // namespace qkm
