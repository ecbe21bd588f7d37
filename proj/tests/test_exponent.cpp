#include <gtest/gtest.h>

#include <cmath>

#include "lpvar/exponent.hpp"

using namespace lpvar;

TEST(Exponent, ConstantExtremaAndLogHolder)
{
    const Grid g(4, 8);
    const auto p = make_exponent(ConstantExponent{2.0}, g);
    EXPECT_EQ(p.p_minus(), 2.0);
    EXPECT_EQ(p.p_plus(), 2.0);
    EXPECT_TRUE(p.is_constant());
    const auto lh = log_holder_constants(p);
    EXPECT_EQ(lh.c0, 0.0);
    EXPECT_EQ(lh.c_inf, 0.0);
}

TEST(Exponent, SmoothStepExtremaAndDefaultPInfinity)
{
    const Grid g(4, 10);
    const auto p = make_exponent(SmoothStepExponent{2.0, 3.0, 0.0, 1.0}, g);
    EXPECT_DOUBLE_EQ(p.p_minus(), 2.0);
    EXPECT_DOUBLE_EQ(p.p_plus(), 3.0);
    EXPECT_DOUBLE_EQ(p.p_infinity(), 3.0);
    EXPECT_TRUE(p.in_class_p());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.point(i) <= -0.5) {
            EXPECT_EQ(p[i], 2.0);
        }
        if (g.point(i) >= 0.5) {
            EXPECT_EQ(p[i], 3.0);
        }
    }
}

TEST(Exponent, RejectsValuesBelowOne)
{
    const Grid g(2, 6);
    EXPECT_THROW(make_exponent(TableExponent{{0.0, 1.0}, {0.9, 2.0}}, g), ConfigError);
    EXPECT_THROW(make_exponent(ConstantExponent{0.5}, g), ConfigError);
    EXPECT_THROW(make_exponent(SmoothStepExponent{2, 3, 0, 0}, g), ConfigError);
}

TEST(Exponent, ConjugateExtrema)
{
    const Grid g(4, 8);
    const auto p2 = conjugate_exponent(make_exponent(ConstantExponent{2.0}, g));
    EXPECT_DOUBLE_EQ(p2.p_minus(), 2.0);
    const auto p32 = conjugate_exponent(make_exponent(ConstantExponent{1.5}, g));
    EXPECT_NEAR(p32.p_plus(), 3.0, 1e-14);
    const auto step = conjugate_exponent(make_exponent(SmoothStepExponent{}, g));
    EXPECT_NEAR(step.p_minus(), 1.5, 1e-14);
    EXPECT_NEAR(step.p_plus(), 2.0, 1e-14);
    EXPECT_THROW(conjugate_exponent(make_exponent(ConstantExponent{1.0}, g)), DomainError);
}

TEST(Weight, DualWeightClosedForms)
{
    const Grid g(4, 8);
    const auto one = dual_weight(make_exponent(ConstantExponent{2.0}, g), make_weight(UnitWeight{}, g));
    const auto p2 = make_exponent(ConstantExponent{2.0}, g);
    const auto ex = Weight::sample(g, [](double x) { return std::exp(x); });
    const auto s2 = dual_weight(p2, ex);
    const auto p3 = make_exponent(ConstantExponent{3.0}, g);
    const auto s3 = dual_weight(p3, make_weight(PowerWeight{2.0}, g));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.point(i);
        EXPECT_NEAR(one[i], 1.0, 1e-15);
        EXPECT_NEAR(s2[i] / std::exp(-x), 1.0, 1e-13);
        EXPECT_NEAR(s3[i] * (1.0 + std::abs(x)), 1.0, 1e-13);
    }
}

TEST(Weight, DualityInvolution)
{
    const Grid g(4, 9);
    const auto p = make_exponent(SmoothStepExponent{1.5, 4.0, 0.3, 1.2}, g);
    for (const char* spec : {"one", "exp:1", "pow:3"}) {
        const auto w = make_weight(parse_weight_spec(spec), g);
        const auto back = dual_weight(conjugate_exponent(p), dual_weight(p, w));
        for (std::size_t i = 0; i < g.size(); ++i)
            ASSERT_NEAR(back[i] / w[i], 1.0, 1e-12) << spec << " at " << g.point(i);
    }
}

TEST(Weight, RangeGuard)
{
    const Grid g(4, 4);
    EXPECT_THROW(make_weight(ExpWeight{400.0}, g), RangeError);
    const auto p = make_exponent(ConstantExponent{1.001}, g);
    EXPECT_THROW(dual_weight(p, make_weight(ExpWeight{1.0}, g)), RangeError);
}

TEST(LogHolder, LipschitzExponentBoundedByOneOverE)
{
    const Grid g(4, 10);
    const auto p = VariableExponent(GridFunction::sample(g, [](double x) { return 2.0 + std::min(1.0, std::abs(x)); }));
    const auto lh = log_holder_constants(p);
    // sup_{0 < t <= 1/2} t (-log t) = 1/e
    EXPECT_LE(lh.c0, std::exp(-1.0) + 1e-12);
    EXPECT_GT(lh.c0, 0.3);
}

TEST(LogHolder, HardStepGrowsWithResolution)
{
    double prev = 0.0;
    for (int r = 6; r <= 10; ++r) {
        const Grid g(2, r);
        const auto p = VariableExponent(GridFunction::sample(g, [](double x) { return x >= 0 ? 3.0 : 2.0; }));
        const double c0 = log_holder_constants(p).c0;
        EXPECT_NEAR(c0, r * std::log(2.0), 1e-12);
        EXPECT_GT(c0, prev);
        prev = c0;
    }
}

TEST(Catalog, ExponentAndWeightDescriptors)
{
    EXPECT_DOUBLE_EQ(std::get<ConstantExponent>(parse_exponent_spec("const:2.5")).value, 2.5);
    const auto s = std::get<SmoothStepExponent>(parse_exponent_spec("step:2:3:0:1"));
    EXPECT_EQ(s.p2, 3.0);
    EXPECT_EQ(std::get<ExpWeight>(parse_weight_spec("exp:1")).alpha, 1.0);
    EXPECT_EQ(std::get<PowerWeight>(parse_weight_spec("pow:3")).exponent, 3.0);
    EXPECT_TRUE(std::holds_alternative<UnitWeight>(parse_weight_spec("one")));
    for (const char* bad : {"", "const", "const:x", "step:2:3:0", "cubic:1"})
        EXPECT_THROW(parse_exponent_spec(bad), ConfigError) << bad;
    for (const char* bad : {"two", "exp", "pow:1:2", "exp:1e"})
        EXPECT_THROW(parse_weight_spec(bad), ConfigError) << bad;
}
