#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dpc/stats.hpp"

using namespace dpc::stats;

TEST(Welford, MatchesTwoPass) {
    const std::vector<double> xs{1.0, 4.0, 2.5, -3.0, 7.25, 0.0};
    welford w;
    for (double x : xs) w.add(x);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= xs.size() - 1;
    EXPECT_EQ(w.count(), xs.size());
    EXPECT_NEAR(w.mean(), mean, 1e-14);
    EXPECT_NEAR(w.variance(), var, 1e-12);
    EXPECT_NEAR(w.ci_halfwidth(), 1.96 * std::sqrt(var / xs.size()), 1e-12);
    EXPECT_EQ(welford{}.ci_halfwidth(), 0.0);
}

TEST(Proportion, HalfWidth) {
    EXPECT_NEAR(proportion_ci(0.5, 10000), 1.96 * 0.005, 1e-15);
    EXPECT_EQ(proportion_ci(0.0, 100), 0.0);
    EXPECT_EQ(proportion_ci(0.3, 0), 0.0);
}

TEST(PoissonGof, AcceptsPoissonRejectsShifted) {
    std::mt19937_64 gen(7);
    std::poisson_distribution<long> pois(12.0);
    std::vector<long> good(10000), bad(10000);
    for (auto& v : good) v = pois(gen);
    for (auto& v : bad) v = pois(gen) + 1;
    EXPECT_GT(poisson_chi_square(good, 12.0).p_value, 0.01);
    EXPECT_LT(poisson_chi_square(bad, 12.0).p_value, 1e-6);
}

TEST(PoissonGof, CellsHaveEnoughExpectedCount) {
    // Small mean: few cells; all must have expected >= 5 so dof stays small.
    std::vector<long> counts(200, 0);
    for (std::size_t i = 0; i < 60; ++i) counts[i] = 1;
    const auto r = poisson_chi_square(counts, 0.35);
    EXPECT_GE(r.dof, 1u);
    EXPECT_LE(r.dof, 3u);
    std::vector<long> tiny(3, 0);
    EXPECT_THROW(poisson_chi_square(tiny, 0.5), dpc::invalid_parameter);
}

TEST(Kolmogorov, KnownValues) {
    EXPECT_NEAR(kolmogorov_q(1.36), 0.0495, 5e-4);
    EXPECT_NEAR(kolmogorov_q(1.63), 0.0098, 5e-4);
    EXPECT_EQ(kolmogorov_q(0.0), 1.0);
}

TEST(KsTwoSample, SameAndDifferent) {
    std::mt19937_64 gen(11);
    std::exponential_distribution<double> e1(1.0), e2(1.3);
    std::vector<double> a(5000), b(5000), c(5000);
    for (auto& v : a) v = e1(gen);
    for (auto& v : b) v = e1(gen);
    for (auto& v : c) v = e2(gen);
    EXPECT_GT(ks_two_sample(a, b).p_value, 0.01);
    EXPECT_LT(ks_two_sample(a, c).p_value, 1e-6);
    const auto same = ks_two_sample(a, a);
    EXPECT_EQ(same.statistic, 0.0);
}
