#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qkm {

/// Row-major N x F feature matrix with optional ground-truth labels.
class DataSet {
public:
    DataSet() = default;
    DataSet(std::size_t n_features, std::vector<double> values, std::vector<int> labels = {});

    [[nodiscard]] std::size_t size() const noexcept { return n_features_ ? values_.size() / n_features_ : 0; }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] std::size_t n_features() const noexcept { return n_features_; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * n_features_, n_features_};
    }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] bool has_labels() const noexcept { return !labels_.empty(); }
    [[nodiscard]] std::span<const int> labels() const noexcept { return labels_; }

    /// Rows at `indices`, in that order, labels included.
    [[nodiscard]] DataSet subset(std::span<const std::size_t> indices) const;

private:
    std::size_t n_features_ = 0;
    std::vector<double> values_;
    std::vector<int> labels_;
};

/**
 * Affine map y = rotation * (x - mean) / scale + offset.
 *
 * Fitted so that classical geometry is preserved up to one common scale
 * factor, every feature ends up strictly positive, and the origin sits on the
 * hyperplane through the data mean orthogonal to the principal axis. The last
 * property makes |overlap| comparisons between two balanced clusters agree with
 * Euclidean ones.
 */
struct FeatureTransform {
    std::vector<double> mean;
    double scale = 1.0;
    /// Row-major F x F orthogonal matrix.
    std::vector<double> rotation;
    double offset = 0.0;

    [[nodiscard]] std::size_t n_features() const noexcept { return mean.size(); }
    void apply(std::span<const double> in, std::span<double> out) const;
    [[nodiscard]] DataSet apply(const DataSet& data) const;
};

/// Minimum coordinate after the positive shift, in units of the pooled
/// standard deviation.
inline constexpr double kDefaultShiftMargin = 1.0;

[[nodiscard]] FeatureTransform fit_standardize_shift(const DataSet& data,
                                                     double margin = kDefaultShiftMargin);

} // namespace qkm
