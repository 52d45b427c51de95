#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qkmeans/encoding.hpp"
#include "test_support.hpp"

using namespace qkm;

namespace {

std::vector<double> amps(std::initializer_list<double> v) {
    return amplitude_encode(std::vector<double>(v)).amplitudes;
}

std::vector<double> real_state(const EncodedPoint& p) {
    const auto s = prepare_state(p);
    std::vector<double> out;
    for (auto a : s.amplitudes()) {
        EXPECT_NEAR(a.imag(), 0.0, 1e-15);
        out.push_back(a.real());
    }
    return out;
}

} // namespace

TEST(Encoding, AmplitudeExamples) {
    const auto a = amps({3, 4});
    ASSERT_EQ(a.size(), 2u);
    EXPECT_NEAR(a[0], 0.6, 1e-15);
    EXPECT_NEAR(a[1], 0.8, 1e-15);

    const auto b = amps({1, 0, 0});
    ASSERT_EQ(b.size(), 4u);
    EXPECT_EQ(b, (std::vector<double>{1, 0, 0, 0}));

    const auto c = amps({1, 1, 1, 1});
    for (double v : c) EXPECT_NEAR(v, 0.5, 1e-15);
}

TEST(Encoding, PaddedLength) {
    for (std::size_t f : {1u, 2u, 3u, 4u, 5u, 8u, 9u}) {
        std::vector<double> v(f, 1.0);
        const auto p = amplitude_encode(v);
        std::size_t expected = 2;
        while (expected < f) expected *= 2;
        EXPECT_EQ(p.amplitudes.size(), expected) << f;
        EXPECT_EQ(std::size_t{1} << p.num_qubits(), expected);
    }
}

TEST(Encoding, AngleExamples) {
    EXPECT_NEAR(angle_encode(std::vector<double>{1, 1}).angle, M_PI / 4, 1e-15);
    EXPECT_NEAR(angle_encode(std::vector<double>{1, 0}).angle, 0.0, 1e-15);
    EXPECT_NEAR(angle_encode(std::vector<double>{0, 1}).angle, M_PI / 2, 1e-15);
    EXPECT_NEAR(angle_encode(std::vector<double>{-1, 0}).angle, M_PI, 1e-15);
}

TEST(Encoding, PrepareStateExamples) {
    const auto a = real_state(amplitude_encode(std::vector<double>{3, 4}));
    EXPECT_NEAR(a[0], 0.6, 1e-12);
    EXPECT_NEAR(a[1], 0.8, 1e-12);

    const auto b = real_state(angle_encode(std::vector<double>{1, 1}));
    EXPECT_NEAR(b[0], std::cos(M_PI / 4), 1e-12);
    EXPECT_NEAR(b[1], std::sin(M_PI / 4), 1e-12);

    const auto c = prepare_state(amplitude_encode(std::vector<double>{1, 1, 1, 1}));
    EXPECT_EQ(c.num_qubits(), 2u);
    for (auto v : c.amplitudes()) EXPECT_NEAR(v.real(), 0.5, 1e-12);
}

TEST(Encoding, AnglePreparationUsesDoubledRotation) {
    const auto p = angle_encode(std::vector<double>{-2, 1});
    const auto s = real_state(p);
    EXPECT_NEAR(s[0], -2 / std::sqrt(5.0), 1e-12);
    EXPECT_NEAR(s[1], 1 / std::sqrt(5.0), 1e-12);
    EXPECT_EQ(s, state_amplitudes(p));
}

TEST(Encoding, RejectsInvalidVectors) {
    EXPECT_THROW((void)amplitude_encode(std::vector<double>{0, 0}), std::invalid_argument);
    EXPECT_THROW((void)amplitude_encode(std::vector<double>{}), std::invalid_argument);
    EXPECT_THROW((void)amplitude_encode(std::vector<double>{1, NAN}), std::invalid_argument);
    EXPECT_THROW((void)amplitude_encode(std::vector<double>{INFINITY, 1}), std::invalid_argument);
    EXPECT_THROW((void)angle_encode(std::vector<double>{0, 0}), std::invalid_argument);
    EXPECT_THROW((void)angle_encode(std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST(EncodingProperty, ScaleInvariance) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> c(1e-3, 1e3);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> v(1 + rng() % 7);
        for (auto& x : v) x = g(rng);
        auto w = v;
        const double k = c(rng);
        for (auto& x : w) x *= k;
        const auto a = amplitude_encode(v).amplitudes;
        const auto b = amplitude_encode(w).amplitudes;
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
    }
}

TEST(EncodingProperty, OverlapEqualsCosineSimilarity) {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g;
    for (int t = 0; t < 500; ++t) {
        const std::size_t f = 1 + rng() % 6;
        std::vector<double> v(f), w(f);
        for (auto& x : v) x = g(rng);
        for (auto& x : w) x = g(rng);
        const auto sv = real_state(amplitude_encode(v));
        const auto sw = real_state(amplitude_encode(w));
        const double cosine = support::dot(v, w) / std::sqrt(support::dot(v, v) * support::dot(w, w));
        EXPECT_NEAR(support::dot(sv, sw), cosine, 1e-9);
    }
}

TEST(EncodingProperty, AngleAgreesWithAmplitude) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> pos(0.01, 5), any(-5, 5);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> v{pos(rng), any(rng)}, w{pos(rng), any(rng)};
        const double amp = std::abs(support::dot(real_state(amplitude_encode(v)), real_state(amplitude_encode(w))));
        const double ang = std::abs(support::dot(real_state(angle_encode(v)), real_state(angle_encode(w))));
        EXPECT_NEAR(amp, ang, 1e-9);
    }
}
