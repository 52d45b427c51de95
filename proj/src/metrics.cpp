#include "qkmeans/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "qkmeans/rng.hpp"

namespace qkm {

namespace {

struct Contingency {
    std::size_t rows = 0; // predicted clusters
    std::size_t cols = 0; // true classes
    std::vector<std::size_t> cells;
};

std::vector<std::size_t> compress(std::span<const int> labels, std::size_t& distinct) {
    std::map<int, std::size_t> ids;
    std::vector<std::size_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[i] = ids.try_emplace(labels[i], ids.size()).first->second;
    }
    distinct = ids.size();
    return out;
}

Contingency contingency(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) throw std::invalid_argument("label arrays differ in length");
    if (predicted.empty()) throw std::invalid_argument("label arrays are empty");
    Contingency t;
    const auto p = compress(predicted, t.rows);
    const auto q = compress(truth, t.cols);
    t.cells.assign(t.rows * t.cols, 0);
    for (std::size_t i = 0; i < p.size(); ++i) ++t.cells[p[i] * t.cols + q[i]];
    return t;
}

constexpr double pairs(std::size_t n) { return n < 2 ? 0.0 : 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

} // namespace

double assignment_fidelity(std::span<const int> predicted, std::span<const int> truth) {
    const auto t = contingency(predicted, truth);
    // Maximum-weight matching by DP over subsets of classes; square the
    // problem with empty rows/columns.
    const std::size_t m = std::max(t.rows, t.cols);
    if (m > 20) throw std::invalid_argument("too many clusters for exact matching");
    auto weight = [&](std::size_t r, std::size_t c) -> std::size_t {
        return r < t.rows && c < t.cols ? t.cells[r * t.cols + c] : 0;
    };
    std::vector<std::size_t> best(std::size_t{1} << m, 0);
    for (std::size_t mask = 0; mask < best.size(); ++mask) {
        const auto row = static_cast<std::size_t>(std::popcount(mask));
        if (row >= m) continue;
        for (std::size_t c = 0; c < m; ++c) {
            if (mask & (std::size_t{1} << c)) continue;
            auto& slot = best[mask | (std::size_t{1} << c)];
            slot = std::max(slot, best[mask] + weight(row, c));
        }
    }
    return static_cast<double>(best.back()) / static_cast<double>(predicted.size());
}

double fowlkes_mallows(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() == truth.size() && predicted.size() < 2) throw std::invalid_argument("need at least two labels");
    const auto t = contingency(predicted, truth);
    double tp = 0.0;
    std::vector<std::size_t> row_sum(t.rows, 0), col_sum(t.cols, 0);
    for (std::size_t r = 0; r < t.rows; ++r) {
        for (std::size_t c = 0; c < t.cols; ++c) {
            const auto n = t.cells[r * t.cols + c];
            tp += pairs(n);
            row_sum[r] += n;
            col_sum[c] += n;
        }
    }
    double together_pred = 0.0, together_true = 0.0;
    for (auto n : row_sum) together_pred += pairs(n);
    for (auto n : col_sum) together_true += pairs(n);
    if (together_pred == 0.0 || together_true == 0.0) return 0.0;
    return tp / std::sqrt(together_pred * together_true);
}

double score(Metric metric, std::span<const int> predicted, std::span<const int> truth) {
    return metric == Metric::AssignmentFidelity ? assignment_fidelity(predicted, truth)
                                                : fowlkes_mallows(predicted, truth);
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t n_splits, std::uint64_t seed) {
    if (n_splits < 2) throw std::invalid_argument("n_splits must be >= 2");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    Rng rng(seed);
    std::vector<std::size_t> fold(labels.size());
    std::size_t dealt = 0;
    for (auto& [label, members] : by_class) {
        if (members.size() < n_splits) {
            throw std::invalid_argument(fmt::format("class {} has {} samples, fewer than {} splits", label,
                                                    members.size(), n_splits));
        }
        std::shuffle(members.begin(), members.end(), rng);
        for (auto i : members) fold[i] = dealt++ % n_splits;
    }
    return fold;
}

ScoreReport cross_validate(const DataSet& data, const FitConfig& config, std::size_t n_splits, Metric metric,
                           std::uint64_t seed, HalfWidth half_width) {
    if (!data.has_labels()) throw std::invalid_argument("cross-validation needs truth labels");
    if (data.size() < n_splits) throw std::invalid_argument("fewer samples than splits");
    const auto fold = stratified_folds(data.labels(), n_splits, seed);

    ScoreReport report;
    report.metric = metric;
    for (std::size_t s = 0; s < n_splits; ++s) {
        std::vector<std::size_t> train, test;
        for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == s ? test : train).push_back(i);
        const DataSet train_set = data.subset(train);
        const DataSet test_set = data.subset(test);

        FitConfig fold_config = config;
        fold_config.seed = derive_seed(seed, 2 * s);
        fold_config.batch.seed = derive_seed(config.batch.seed ^ seed, 2 * s);
        const auto model = fit(train_set, fold_config);

        BatchConfig predict_batch = config.batch;
        predict_batch.seed = derive_seed(config.batch.seed ^ seed, 2 * s + 1);
        const auto predicted = predict(model, test_set, config.distance_mode, config.encoding, predict_batch);
        report.per_fold.push_back(score(metric, predicted, test_set.labels()));
    }

    const double n = static_cast<double>(n_splits);
    report.mean = std::accumulate(report.per_fold.begin(), report.per_fold.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : report.per_fold) ss += (v - report.mean) * (v - report.mean);
    const double std_dev = std::sqrt(ss / (n - 1.0));
    report.half_width = half_width == HalfWidth::FoldStdDev ? std_dev : 1.96 * std_dev / std::sqrt(n);
    return report;
}

std::string format_score_row(std::size_t qubit, const std::string& dataset_case, const ScoreReport& report) {
    return fmt::format("{}, {}, {:.4f} ±{:.4f}", qubit, dataset_case, report.mean, report.half_width);
}

} // namespace qkm
