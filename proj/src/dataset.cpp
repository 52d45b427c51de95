#include "qkmeans/dataset.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qkm {

DataSet::DataSet(std::size_t n_features, std::vector<double> values, std::vector<int> labels)
    : n_features_(n_features), values_(std::move(values)), labels_(std::move(labels)) {
    if (n_features_ == 0 && !values_.empty()) throw std::invalid_argument("feature count must be >= 1");
    if (n_features_ && values_.size() % n_features_ != 0) {
        throw std::invalid_argument("value count is not a multiple of the feature count");
    }
    if (!labels_.empty() && labels_.size() != size()) {
        throw std::invalid_argument("label count does not match row count");
    }
}

DataSet DataSet::subset(std::span<const std::size_t> indices) const {
    std::vector<double> values;
    values.reserve(indices.size() * n_features_);
    std::vector<int> labels;
    if (has_labels()) labels.reserve(indices.size());
    for (auto i : indices) {
        if (i >= size()) throw std::out_of_range("subset index out of range");
        const auto r = row(i);
        values.insert(values.end(), r.begin(), r.end());
        if (has_labels()) labels.push_back(labels_[i]);
    }
    return DataSet(n_features_, std::move(values), std::move(labels));
}

void FeatureTransform::apply(std::span<const double> in, std::span<double> out) const {
    const std::size_t f = n_features();
    if (in.size() != f || out.size() != f) throw std::invalid_argument("transform dimension mismatch");
    for (std::size_t r = 0; r < f; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < f; ++c) acc += rotation[r * f + c] * (in[c] - mean[c]);
        out[r] = acc / scale + offset;
    }
}

DataSet FeatureTransform::apply(const DataSet& data) const {
    if (data.n_features() != n_features()) throw std::invalid_argument("transform dimension mismatch");
    std::vector<double> values(data.values().size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        apply(data.row(i), std::span<double>(values.data() + i * n_features(), n_features()));
    }
    return DataSet(n_features(), std::move(values), {data.labels().begin(), data.labels().end()});
}

namespace {

// Orthonormal basis whose last column is the all-ones direction and whose
// first column (when F >= 2) is (e0 - e1) / sqrt(2).
Eigen::MatrixXd target_basis(Eigen::Index f) {
    Eigen::MatrixXd basis(f, f);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(f) / std::sqrt(static_cast<double>(f));
    basis.col(f - 1) = ones;
    if (f == 1) return basis;

    std::vector<Eigen::VectorXd> found;
    Eigen::VectorXd first = Eigen::VectorXd::Zero(f);
    first(0) = 1.0 / std::sqrt(2.0);
    first(1) = -1.0 / std::sqrt(2.0);
    found.push_back(first);
    for (Eigen::Index e = 0; e < f && static_cast<Eigen::Index>(found.size()) < f - 1; ++e) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(f, e);
        v -= ones.dot(v) * ones;
        for (const auto& u : found) v -= u.dot(v) * u;
        if (v.norm() > 1e-8) found.push_back(v.normalized());
    }
    for (Eigen::Index c = 0; c < f - 1; ++c) basis.col(c) = found[static_cast<std::size_t>(c)];
    return basis;
}

} // namespace

FeatureTransform fit_standardize_shift(const DataSet& data, double margin) {
    if (data.empty()) throw std::invalid_argument("cannot fit a transform on an empty dataset");
    const auto f = static_cast<Eigen::Index>(data.n_features());
    const auto n = static_cast<Eigen::Index>(data.size());

    Eigen::MatrixXd x(n, f);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto r = data.row(static_cast<std::size_t>(i));
        for (Eigen::Index c = 0; c < f; ++c) {
            if (!std::isfinite(r[static_cast<std::size_t>(c)])) {
                throw std::invalid_argument("dataset contains a non-finite feature");
            }
            x(i, c) = r[static_cast<std::size_t>(c)];
        }
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(std::max<Eigen::Index>(n - 1, 1));

    double scale = std::sqrt(cov.trace() / static_cast<double>(f));
    if (!(scale > 0.0)) scale = 1.0;

    // Eigen sorts eigenvalues ascending; reverse so column 0 is the principal axis.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    Eigen::MatrixXd axes = solver.eigenvectors().rowwise().reverse();
    for (Eigen::Index c = 0; c < f; ++c) {
        Eigen::Index arg = 0;
        axes.col(c).cwiseAbs().maxCoeff(&arg);
        if (axes(arg, c) < 0.0) axes.col(c) *= -1.0;
    }
    const Eigen::MatrixXd rotation = target_basis(f) * axes.transpose();

    const Eigen::MatrixXd rotated = (centered * rotation.transpose()) / scale;
    const double shift = margin - rotated.minCoeff();

    FeatureTransform t;
    t.mean.assign(mean.data(), mean.data() + f);
    t.scale = scale;
    t.rotation.resize(static_cast<std::size_t>(f * f));
    for (Eigen::Index r = 0; r < f; ++r) {
        for (Eigen::Index c = 0; c < f; ++c) t.rotation[static_cast<std::size_t>(r * f + c)] = rotation(r, c);
    }
    t.offset = shift;
    return t;
}

} // namespace qkm
