#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qkmeans/dataset.hpp"
#include "test_support.hpp"

using namespace qkm;

namespace {

double euclid(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

DataSet scattered_data(std::size_t n, std::size_t f, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> stretch(0.1, 20.0), shift(-50, 50);
    std::vector<double> s(f), o(f);
    for (std::size_t j = 0; j < f; ++j) {
        s[j] = stretch(rng);
        o[j] = shift(rng);
    }
    std::vector<double> v(n * f);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < f; ++j) v[i * f + j] = o[j] + s[j] * g(rng);
    return DataSet(f, v);
}

} // namespace

TEST(DataSet, ShapeAndSubset) {
    const DataSet d(2, {1, 2, 3, 4, 5, 6}, {0, 1, 0});
    EXPECT_EQ(d.size(), 3u);
    EXPECT_EQ(d.row(1)[1], 4.0);
    const std::vector<std::size_t> idx{2, 0};
    const auto s = d.subset(idx);
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(s.row(0)[0], 5.0);
    EXPECT_EQ(s.labels()[1], 0);
    EXPECT_THROW(DataSet(2, {1, 2, 3}), std::invalid_argument);
    EXPECT_THROW(DataSet(1, {1, 2}, {0}), std::invalid_argument);
}

TEST(Transform, RotationOrthogonalAndShiftPositive) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        const std::size_t f = 1 + rng() % 5;
        const auto d = scattered_data(40 + rng() % 100, f, rng);
        const auto tr = fit_standardize_shift(d);
        for (std::size_t r = 0; r < f; ++r) {
            for (std::size_t c = 0; c < f; ++c) {
                double acc = 0.0;
                for (std::size_t k = 0; k < f; ++k) acc += tr.rotation[r * f + k] * tr.rotation[c * f + k];
                EXPECT_NEAR(acc, r == c ? 1.0 : 0.0, 1e-10);
            }
        }
        const auto out = tr.apply(d);
        double lo = INFINITY;
        for (double v : out.values()) lo = std::min(lo, v);
        EXPECT_NEAR(lo, kDefaultShiftMargin, 1e-9);
    }
}

TEST(Transform, PreservesGeometryUpToOneScale) {
    std::mt19937_64 rng(2);
    const auto d = scattered_data(60, 3, rng);
    const auto tr = fit_standardize_shift(d);
    const auto out = tr.apply(d);
    for (std::size_t a = 0; a < d.size(); a += 7) {
        for (std::size_t b = a + 1; b < d.size(); b += 5) {
            EXPECT_NEAR(euclid(out.row(a), out.row(b)) * tr.scale, euclid(d.row(a), d.row(b)), 1e-9);
        }
    }
}

TEST(Transform, MeanMapsOntoOnesDiagonalForTwoFeatures) {
    // The data mean lands on the diagonal, and the principal axis becomes
    // orthogonal to it, so the origin sits on the bisector of two balanced blobs.
    const auto raw = support::two_blobs(200, 10.0, 1.0, 3);
    const auto tr = fit_standardize_shift(raw);
    std::vector<double> mean_out(2);
    tr.apply(tr.mean, mean_out);
    EXPECT_NEAR(mean_out[0], mean_out[1], 1e-9);
    const auto out = tr.apply(raw);
    double c0[2] = {0, 0}, c1[2] = {0, 0};
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& c = out.labels()[i] == 0 ? c0 : c1;
        c[0] += out.row(i)[0] / 200.0;
        c[1] += out.row(i)[1] / 200.0;
    }
    EXPECT_NEAR(std::hypot(c0[0], c0[1]), std::hypot(c1[0], c1[1]), 0.05 * std::hypot(c0[0], c0[1]));
}

TEST(Transform, Errors) {
    EXPECT_THROW((void)fit_standardize_shift(DataSet{}), std::invalid_argument);
    EXPECT_THROW((void)fit_standardize_shift(DataSet(1, {1, NAN})), std::invalid_argument);
    const auto tr = fit_standardize_shift(DataSet(2, {1, 2, 3, 5}));
    EXPECT_THROW((void)tr.apply(DataSet(1, {1.0})), std::invalid_argument);
    const auto constant = fit_standardize_shift(DataSet(2, {1, 1, 1, 1}));
    EXPECT_DOUBLE_EQ(constant.scale, 1.0);
}
