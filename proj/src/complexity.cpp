#include "qkmeans/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkm {

void ComplexityParams::validate() const {
    for (double v : {n_samples, n_clusters, n_features, n_iterations, circuits_per_job}) {
        if (!(v >= 1.0) || !std::isfinite(v)) throw std::invalid_argument("complexity parameters must be >= 1");
    }
}

double classical_cost(const ComplexityParams& p) {
    p.validate();
    return p.n_samples * p.n_clusters * p.n_features * p.n_iterations;
}

double quantum_cost(const ComplexityParams& p) {
    p.validate();
    return p.n_samples * p.n_clusters * std::log2(std::max(p.n_features, 2.0)) * p.n_iterations /
           p.circuits_per_job;
}

std::size_t expected_jobs_per_iteration(std::size_t n_samples, std::size_t n_clusters, std::size_t circuits_per_job) {
    if (circuits_per_job == 0) throw std::invalid_argument("circuits_per_job must be >= 1");
    const std::size_t circuits = n_samples * n_clusters;
    return (circuits + circuits_per_job - 1) / circuits_per_job;
}

bool verify_job_counts(std::span<const BatchStats> history, std::size_t n_samples, std::size_t n_clusters,
                       std::size_t circuits_per_job) {
    const std::size_t expected = expected_jobs_per_iteration(n_samples, n_clusters, circuits_per_job);
    return std::all_of(history.begin(), history.end(),
                       [&](const BatchStats& s) { return s.jobs_submitted == expected; });
}

} // namespace qkm
