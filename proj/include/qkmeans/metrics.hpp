#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qkmeans/clustering.hpp"
#include "qkmeans/dataset.hpp"

namespace qkm {

enum class Metric { AssignmentFidelity, FowlkesMallows };

/// How the "±" term of a ScoreReport is computed.
enum class HalfWidth {
    /// Sample standard deviation across folds.
    FoldStdDev,
    /// 1.96 * std / sqrt(n_splits).
    NormalCI95,
};

struct ScoreReport {
    Metric metric = Metric::AssignmentFidelity;
    std::vector<double> per_fold;
    double mean = 0.0;
    double half_width = 0.0;
};

/**
 * Fraction of points whose cluster maps to their true class under the best
 * one-to-one matching of clusters to classes. Unmatched clusters count as
 * wrong. Throws std::invalid_argument on empty or mismatched input.
 */
[[nodiscard]] double assignment_fidelity(std::span<const int> predicted, std::span<const int> truth);

/// TP / sqrt((TP + FP)(TP + FN)) over point pairs; 0 when a denominator term is 0.
/// Needs at least two labels.
[[nodiscard]] double fowlkes_mallows(std::span<const int> predicted, std::span<const int> truth);

[[nodiscard]] double score(Metric metric, std::span<const int> predicted, std::span<const int> truth);

/// Test-fold index of every row: stratified by label, shuffled with `seed`,
/// classes dealt round-robin so fold sizes differ by at most one.
[[nodiscard]] std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t n_splits,
                                                        std::uint64_t seed);

/// Stratified k-fold: fit on the training rows, predict the held-out rows and
/// score them against the truth labels.
[[nodiscard]] ScoreReport cross_validate(const DataSet& data, const FitConfig& config, std::size_t n_splits,
                                         Metric metric, std::uint64_t seed,
                                         HalfWidth half_width = HalfWidth::FoldStdDev);

/// `<qubit>, <single|both>, <mean> ±<half_width>`
[[nodiscard]] std::string format_score_row(std::size_t qubit, const std::string& dataset_case,
                                           const ScoreReport& report);

} // namespace qkm
