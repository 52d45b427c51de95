#include "qkmeans/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "qkmeans/rng.hpp"

namespace qkm {

namespace {

// Seed streams under a batch seed. Init steps and iterations never collide.
constexpr std::uint64_t kInitStream = 0x1000;
constexpr std::uint64_t kIterationStream = 0x2000;

void check_fit_input(const DataSet& data, std::size_t n_clusters) {
    if (data.empty()) throw std::invalid_argument("dataset is empty");
    if (n_clusters == 0) throw std::invalid_argument("n_clusters must be >= 1");
    if (data.size() < n_clusters) throw std::invalid_argument("fewer samples than clusters");
    for (double v : data.values()) {
        if (!std::isfinite(v)) throw std::invalid_argument("dataset contains a non-finite feature");
    }
}

std::vector<EncodedPoint> encode_rows(std::span<const double> rows, std::size_t n_features, Encoding encoding) {
    std::vector<EncodedPoint> out;
    out.reserve(rows.size() / n_features);
    for (std::size_t off = 0; off < rows.size(); off += n_features) {
        out.push_back(encode(rows.subspan(off, n_features), encoding));
    }
    return out;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t f = 0; f < a.size(); ++f) sum += (a[f] - b[f]) * (a[f] - b[f]);
    return std::sqrt(sum);
}

std::vector<int> argmin_rows(std::span<const double> distances, std::size_t k) {
    std::vector<int> labels(distances.size() / k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto row = distances.subspan(i * k, k);
        labels[i] = static_cast<int>(std::min_element(row.begin(), row.end()) - row.begin());
    }
    return labels;
}

BatchConfig stream(const BatchConfig& batch, std::uint64_t index) {
    BatchConfig out = batch;
    out.seed = derive_seed(batch.seed, index);
    return out;
}

} // namespace

std::vector<double> distance_matrix(const DataSet& data, std::span<const double> centers, DistanceMode mode,
                                    Encoding encoding, const BatchConfig& batch, BatchStats* stats) {
    const std::size_t f = data.n_features();
    if (f == 0 || centers.size() % f != 0 || centers.empty()) {
        throw std::invalid_argument("center dimension does not match the dataset");
    }
    const std::size_t k = centers.size() / f;

    if (!is_quantum(mode)) {
        std::vector<double> out(data.size() * k);
        for (std::size_t i = 0; i < data.size(); ++i) {
            for (std::size_t c = 0; c < k; ++c) out[i * k + c] = euclidean(data.row(i), centers.subspan(c * f, f));
        }
        return out;
    }

    const auto points = encode_rows(data.values(), f, encoding);
    const auto encoded_centers = encode_rows(centers, f, encoding);
    const auto exec = mode == DistanceMode::QuantumExact ? ExecutionMode::Exact : ExecutionMode::Sampled;
    auto result = batch_distance_matrix(points, encoded_centers, batch, exec);
    if (stats) *stats = result.stats;
    return std::move(result.distances);
}

std::vector<double> farthest_point_centers(const DataSet& data, std::size_t n_clusters, std::size_t first_index,
                                           DistanceMode mode, Encoding encoding, const BatchConfig& batch) {
    check_fit_input(data, n_clusters);
    if (first_index >= data.size()) throw std::invalid_argument("first center index out of range");

    const std::size_t f = data.n_features();
    std::vector<double> centers;
    centers.reserve(n_clusters * f);
    std::vector<bool> used(data.size(), false);
    std::vector<double> closest(data.size(), std::numeric_limits<double>::infinity());

    std::size_t chosen = first_index;
    for (std::size_t step = 0;; ++step) {
        used[chosen] = true;
        const auto row = data.row(chosen);
        centers.insert(centers.end(), row.begin(), row.end());
        if (step + 1 == n_clusters) break;

        const auto d = distance_matrix(data, row, mode, encoding, stream(batch, kInitStream + step));
        std::size_t best = data.size();
        double best_distance = -1.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            closest[i] = std::min(closest[i], d[i]);
            if (!used[i] && closest[i] > best_distance) {
                best_distance = closest[i];
                best = i;
            }
        }
        chosen = best;
    }
    return centers;
}

std::vector<double> qkmeans_plusplus_init(const DataSet& data, std::size_t n_clusters, DistanceMode mode,
                                          std::uint64_t seed, Encoding encoding, const BatchConfig& batch) {
    check_fit_input(data, n_clusters);
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    return farthest_point_centers(data, n_clusters, pick(rng), mode, encoding, batch);
}

ClusterModel fit(const DataSet& data, const FitConfig& config) {
    check_fit_input(data, config.n_clusters);
    if (config.max_iter == 0) throw std::invalid_argument("max_iter must be >= 1");
    if (!(config.tol >= 0.0)) throw std::invalid_argument("tol must be nonnegative");
    if (config.encoding == Encoding::Angle && data.n_features() != 2 && is_quantum(config.distance_mode)) {
        throw std::invalid_argument("angle encoding needs two features");
    }

    const std::size_t n = data.size();
    const std::size_t f = data.n_features();
    const std::size_t k = config.n_clusters;

    ClusterModel model;
    model.n_features = f;
    if (config.init == InitMethod::QKMeansPlusPlus) {
        model.cluster_centers =
            qkmeans_plusplus_init(data, k, config.distance_mode, config.seed, config.encoding, config.batch);
    } else {
        Rng rng(config.seed);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t c = 0; c < k; ++c) {
            const auto row = data.row(order[c]);
            model.cluster_centers.insert(model.cluster_centers.end(), row.begin(), row.end());
        }
    }

    std::vector<double> next(k * f);
    std::vector<std::size_t> counts(k);
    while (!model.converged && model.n_iter < config.max_iter) {
        BatchStats stats;
        const auto d = distance_matrix(data, model.cluster_centers, config.distance_mode, config.encoding,
                                       stream(config.batch, kIterationStream + model.n_iter), &stats);
        if (is_quantum(config.distance_mode)) model.batch_history.push_back(stats);
        model.labels = argmin_rows(d, k);

        std::fill(next.begin(), next.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(model.labels[i]);
            ++counts[c];
            const auto row = data.row(i);
            for (std::size_t j = 0; j < f; ++j) next[c * f + j] += row[j];
        }

        // Empty clusters take the points farthest from their own centers.
        std::vector<std::size_t> by_own_distance;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) {
                for (std::size_t j = 0; j < f; ++j) next[c * f + j] /= static_cast<double>(counts[c]);
                continue;
            }
            if (by_own_distance.empty()) {
                by_own_distance.resize(n);
                std::iota(by_own_distance.begin(), by_own_distance.end(), std::size_t{0});
                std::stable_sort(by_own_distance.begin(), by_own_distance.end(), [&](std::size_t a, std::size_t b) {
                    return d[a * k + static_cast<std::size_t>(model.labels[a])] >
                           d[b * k + static_cast<std::size_t>(model.labels[b])];
                });
            }
            const std::size_t donor = by_own_distance.front();
            by_own_distance.erase(by_own_distance.begin());
            const auto row = data.row(donor);
            std::copy(row.begin(), row.end(), next.begin() + static_cast<std::ptrdiff_t>(c * f));
        }

        double shift = 0.0;
        for (std::size_t j = 0; j < next.size(); ++j) shift += std::abs(next[j] - model.cluster_centers[j]);
        model.inertia_history.push_back(shift);
        model.cluster_centers = next;
        ++model.n_iter;
        if (shift < config.tol) model.converged = true;
    }
    return model;
}

std::vector<int> predict(const ClusterModel& model, const DataSet& data, DistanceMode mode, Encoding encoding,
                         const BatchConfig& batch) {
    if (data.n_features() != model.n_features) throw std::invalid_argument("feature dimension mismatch");
    if (data.empty()) return {};
    const auto d = distance_matrix(data, model.cluster_centers, mode, encoding, batch);
    return argmin_rows(d, model.n_clusters());
}

ClusterModel classical_kmeans_oracle(const DataSet& data, std::size_t n_clusters, std::uint64_t seed,
                                     std::size_t max_iter, double tol) {
    FitConfig config;
    config.n_clusters = n_clusters;
    config.max_iter = max_iter;
    config.tol = tol;
    config.distance_mode = DistanceMode::ClassicalEuclidean;
    config.seed = seed;
    return fit(data, config);
}

} // namespace qkm
