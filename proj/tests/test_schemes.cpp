#include <cmath>

#include <gtest/gtest.h>

#include "dpc/schemes.hpp"

using namespace dpc;

TEST(AssignPower, Examples) {
    EXPECT_EQ(assign_power(scheme::no_pc{1.0}, 0, 0.3, 5.0), 1.0);
    EXPECT_DOUBLE_EQ(assign_power(scheme::fractional{0.5}, 0, 4.0, 5.0), 0.5);
    EXPECT_DOUBLE_EQ(assign_power(scheme::channel_inversion{}, 0, 4.0, 5.0), 0.25);
    const auto p = layer_partition::discrete({3, 6, 9, 12, 15}, 15.0);
    const scheme::n_layer_dpc dpc{design_powers(p, 3.5, power_design::thm5), p};
    EXPECT_NEAR(assign_power(dpc, 2, 1.0, 9.0), std::pow(3.0, 3.5), 1e-12);
}

TEST(AssignPower, TwoLevelSelector) {
    const scheme::two_level t{1.5, 1.0, 0.4, 0.6};
    EXPECT_EQ(assign_power(t, 0, 1.0, 1.0, 0.39), 1.5);
    EXPECT_EQ(assign_power(t, 0, 1.0, 1.0, 0.41), 1.0);
}

TEST(AssignPower, FadingFloorCapsInversion) {
    EXPECT_DOUBLE_EQ(assign_power(scheme::channel_inversion{}, 0, 0.0, 1.0), 1.0 / fading_floor);
    EXPECT_DOUBLE_EQ(assign_power(scheme::fractional{0.5}, 0, 1e-12, 1.0), std::pow(fading_floor, -0.5));
}

TEST(Validate, Invariants) {
    EXPECT_THROW(validate(scheme::no_pc{0.0}), invalid_parameter);
    EXPECT_THROW(validate(scheme::fractional{1.5}), invalid_parameter);
    EXPECT_THROW(validate(scheme::two_level{1.0, 1.0, 0.4, 0.5}), invariant_violation);
    EXPECT_THROW(validate(scheme::two_level{-1.0, 1.0, 0.4, 0.6}), invalid_parameter);
    const auto p = layer_partition::equal_width(10.0, 3);
    EXPECT_THROW(validate(scheme::n_layer_dpc{{1.0, 2.0}, p}), invalid_parameter);
    EXPECT_THROW(validate(scheme::n_layer_dpc{{1.0, 0.0, 2.0}, p}), invalid_parameter);
    EXPECT_NO_THROW(validate(scheme::n_layer_dpc{{1.0, 1.0, 2.0}, p}));
}

TEST(DpcCondition, SingleLevelNeverHolds) {
    const auto r = dpc_condition({3.0}, {1.0}, 3.5, 1.29);
    EXPECT_DOUBLE_EQ(r.margins[0], 1.0);
    EXPECT_FALSE(r.holds);
    EXPECT_FALSE(r.relaxed_holds);
}

TEST(DpcCondition, FigureOneExample) {
    const auto r = dpc_condition({1.5, 1.0}, {0.4, 0.6}, 3.5, 1.29);
    EXPECT_NEAR(r.margins[0], 0.474, 5e-4);
    EXPECT_NEAR(r.margins[1], 0.711, 5e-4);
    EXPECT_NEAR(r.threshold, 0.775, 5e-4);
    EXPECT_TRUE(r.holds);
    EXPECT_TRUE(r.relaxed_holds);
}

TEST(DpcCondition, EqualProbabilitiesScalingRule) {
    const double alpha = 3.5;
    const double rho0 = 1.29;
    const double critical = std::pow(rho0, 2.0 / (alpha - 2.0));
    for (std::size_t n = 1; n <= 6; ++n) {
        std::vector<double> probs(n, 1.0 / n);
        std::vector<double> powers(n, std::pow(1.0 / n, -alpha / 2.0));
        const auto r = dpc_condition(powers, probs, alpha, rho0);
        for (double m : r.margins) EXPECT_NEAR(m, std::pow(double(n), 1.0 - alpha / 2.0), 1e-12);
        EXPECT_EQ(r.holds, double(n) > critical);
    }
}

TEST(DpcCondition, InvariantUnderPowerScaling) {
    const std::vector<double> probs{0.2, 0.3, 0.5};
    const std::vector<double> powers{1.0, 2.5, 7.0};
    const auto a = dpc_condition(powers, probs, 4.0, 1.1);
    for (double t : {0.01, 3.0, 1e4}) {
        std::vector<double> scaled;
        for (double p : powers) scaled.push_back(p * t);
        const auto b = dpc_condition(scaled, probs, 4.0, 1.1);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.margins[i], b.margins[i], 1e-14);
        EXPECT_EQ(a.holds, b.holds);
    }
}

TEST(DpcCondition, RejectsRhoBelowOne) {
    EXPECT_THROW(dpc_condition({1.0}, {1.0}, 3.5, 0.9), invalid_parameter);
}

TEST(TwoPowerRegion, FigureOneInterval) {
    const auto r = two_power_region(0.4, 0.6, 3.5, 1.29);
    EXPECT_NEAR(r.lower, 0.713, 1e-3);
    EXPECT_NEAR(r.upper, 1.820, 1e-3);
    EXPECT_TRUE(r.contains(1.5));
    EXPECT_FALSE(r.empty());
}

TEST(TwoPowerRegion, EqualProbabilitiesAlphaFour) {
    const auto r = two_power_region(0.5, 0.5, 4.0, 1.0);
    EXPECT_NEAR(r.lower, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.upper, 3.0, 1e-15);
}

TEST(TwoPowerRegion, LargeRhoEmpties) {
    EXPECT_TRUE(two_power_region(0.4, 0.6, 3.5, 1e6).empty());
}

TEST(TwoPowerRegion, AgreesWithCondition) {
    for (double ratio = 0.5; ratio <= 2.5; ratio += 0.01) {
        const auto r = two_power_region(0.4, 0.6, 3.5, 1.29);
        const bool inside = ratio > r.lower && ratio < r.upper;
        const bool edge = std::abs(ratio - r.lower) < 1e-9 || std::abs(ratio - r.upper) < 1e-9;
        if (!edge) {
            EXPECT_EQ(dpc_condition({ratio, 1.0}, {0.4, 0.6}, 3.5, 1.29).holds, inside) << ratio;
        }
    }
}

TEST(DesignPowers, Thm5Ratios) {
    const auto p = layer_partition::discrete({3, 6, 9, 12, 15}, 15.0);
    const auto w = design_powers(p, 3.5, power_design::thm5);
    const std::vector<double> expect{1.0, 11.31, 46.77, 128.0, 279.5};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(w[i], expect[i], 5e-3 * expect[i]);
    // P_i / r_i^alpha constant.
    for (std::size_t i = 0; i < 5; ++i)
        EXPECT_NEAR(w[i] / std::pow(p.location(i), 3.5), w[0] / std::pow(3.0, 3.5), 1e-12 * w[0]);
}

TEST(DesignPowers, LowerSingleLayerIsAnchor) {
    const auto w = design_powers(layer_partition::equal_width(15.0, 1), 3.5, power_design::thm3_lower, 2.5);
    ASSERT_EQ(w.size(), 1u);
    EXPECT_EQ(w[0], 2.5);
}

TEST(DesignPowers, LowerTwoLayersAlphaFour) {
    const auto w = design_powers(layer_partition::equal_width(15.0, 2), 4.0, power_design::thm3_lower);
    EXPECT_NEAR(w[1] / w[0], 25.0, 1e-12);
}

TEST(DesignPowers, UpperNeedsPositiveInnerRadius) {
    EXPECT_THROW(design_powers(layer_partition::equal_width(15.0, 3), 3.5, power_design::thm3_upper), degenerate_layer);
    const auto p = layer_partition::equal_width_annulus(default_inner_radius(15.0, 3), 15.0, 3);
    const auto w = design_powers(p, 3.5, power_design::thm3_upper);
    EXPECT_NEAR(w[2] / w[1], std::pow(p.inner(2) / p.inner(1), 3.5), 1e-12);
}

TEST(DesignPowers, Thm5NeedsDiscrete) {
    EXPECT_THROW(design_powers(layer_partition::equal_width(15.0, 3), 3.5, power_design::thm5), invalid_parameter);
}

TEST(DesignPowers, ScalingLawBounded) {
    // With every inner radius >= s/2, (P_j/P_i)(eta_j/eta_i)^(alpha/2) equals
    // [(b_j^4 - a_j^4)/(b_i^4 - a_i^4)]^(alpha/2) (lower design) or
    // [(a_j/a_i)^2 (b_j^2 - a_j^2)/(b_i^2 - a_i^2)]^(alpha/2) (upper design); with
    // equal widths each base is a product of three ratios of radii in [s/2, s],
    // so it lies in [1/8, 8] for every N.
    const double alpha = 3.5;
    const double s = 10.0;
    for (std::size_t n = 1; n <= 32; ++n) {
        const auto p = layer_partition::equal_width_annulus(s / 2.0, s, n);
        for (auto variant : {power_design::thm3_lower, power_design::thm3_upper}) {
            const auto w = design_powers(p, alpha, variant);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const double v = (w[j] / w[i]) * std::pow(p.prob(j) / p.prob(i), alpha / 2.0);
                    EXPECT_GE(v, std::pow(8.0, -alpha / 2.0));
                    EXPECT_LE(v, std::pow(8.0, alpha / 2.0));
                }
        }
    }
}

TEST(ClassProbs, FollowScheme) {
    const auto recv = layer_partition::equal_width(20.0, 1);
    EXPECT_EQ(class_probs(scheme::two_level{1.5, 1.0, 0.4, 0.6}, recv), (std::vector<double>{0.4, 0.6}));
    EXPECT_EQ(class_probs(scheme::no_pc{}, recv), (std::vector<double>{1.0}));
    const auto p = layer_partition::equal_width(20.0, 4);
    EXPECT_EQ(class_probs(scheme::n_layer_dpc{{1, 2, 3, 4}, p}, recv), p.probs());
    EXPECT_EQ(scheme_tag(scheme::fractional{}), "fractional");
}
