#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qkmeans/complexity.hpp"

using namespace qkm;

TEST(Complexity, ClassicalExamples) {
    EXPECT_DOUBLE_EQ(classical_cost({1, 1, 1, 1, 900}), 1.0);
    EXPECT_DOUBLE_EQ(classical_cost({100, 2, 2, 10, 900}), 4000.0);
    EXPECT_DOUBLE_EQ(classical_cost({100, 2, 4, 10, 900}), 2 * classical_cost({100, 2, 2, 10, 900}));
}

TEST(Complexity, QuantumExamples) {
    EXPECT_DOUBLE_EQ(quantum_cost({900, 1, 2, 1, 900}), 1.0);
    EXPECT_DOUBLE_EQ(quantum_cost({50, 3, 4, 7, 900}) / quantum_cost({50, 3, 2, 7, 900}), 2.0);
    EXPECT_DOUBLE_EQ(quantum_cost({50, 3, 1, 7, 900}), quantum_cost({50, 3, 2, 7, 900}));
}

TEST(Complexity, QuantumBelowClassicalOverSampleRange) {
    for (double n = 10; n <= 10000; n += 10) {
        const ComplexityParams p{n, 2, 2, 10, 900};
        EXPECT_LT(quantum_cost(p), classical_cost(p)) << n;
    }
}

TEST(Complexity, JobCounts) {
    EXPECT_EQ(expected_jobs_per_iteration(100, 2, 900), 1u);
    EXPECT_EQ(expected_jobs_per_iteration(1000, 2, 900), 3u);
    EXPECT_EQ(expected_jobs_per_iteration(900, 1, 900), 1u);
    EXPECT_EQ(expected_jobs_per_iteration(901, 1, 900), 2u);
    const std::vector<BatchStats> ok{{1, 200}, {1, 200}};
    EXPECT_TRUE(verify_job_counts(ok, 100, 2, 900));
    const std::vector<BatchStats> bad{{1, 200}, {2, 200}};
    EXPECT_FALSE(verify_job_counts(bad, 100, 2, 900));
    const std::vector<BatchStats> three{{3, 2000}};
    EXPECT_TRUE(verify_job_counts(three, 1000, 2, 900));
}

TEST(Complexity, Validation) {
    EXPECT_THROW((void)classical_cost({0, 1, 1, 1, 900}), std::invalid_argument);
    EXPECT_THROW((void)quantum_cost({1, 1, 1, 1, 0}), std::invalid_argument);
    EXPECT_THROW((void)quantum_cost({1, NAN, 1, 1, 900}), std::invalid_argument);
    EXPECT_THROW((void)expected_jobs_per_iteration(1, 1, 0), std::invalid_argument);
}

TEST(ComplexityProperty, RatioIndependentOfNKI) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(1, 1e5);
    std::uniform_int_distribution<int> fi(2, 4096), ci(1, 2000);
    for (int t = 0; t < 1000; ++t) {
        const double f = fi(rng), c = ci(rng);
        const ComplexityParams p{u(rng), u(rng), f, u(rng), c};
        const double expected = std::log2(f) / (f * c);
        EXPECT_NEAR(quantum_cost(p) / classical_cost(p), expected, 1e-12 * expected);
    }
}
