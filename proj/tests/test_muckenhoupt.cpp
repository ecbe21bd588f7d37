#include <gtest/gtest.h>

#include <cmath>

#include "lpvar/muckenhoupt.hpp"
#include "oracles.hpp"

using namespace lpvar;

TEST(ALoc, ConstantExponentUnitWeightIsOne)
{
    const Grid g(2, 7);
    const auto est = a_loc_constant(make_exponent(ConstantExponent{2.0}, g), make_weight(UnitWeight{}, g));
    EXPECT_NEAR(est.constant, 1.0, 1e-8);
    for (double m : est.level_max)
        EXPECT_NEAR(m, 1.0, 1e-8);
    const auto est3 = a_loc_constant(make_exponent(ConstantExponent{3.5}, g), make_weight(UnitWeight{}, g));
    EXPECT_NEAR(est3.constant, 1.0, 1e-8);
}

TEST(ALoc, ExponentialWeightMatchesClosedForm)
{
    const Grid g(2, 9);
    const auto p = make_exponent(ConstantExponent{2.0}, g);
    const auto w = Weight::sample(g, [](double x) { return std::exp(x); });
    const auto est = a_loc_constant(p, w);
    EXPECT_NEAR(est.constant, oracle::a_loc_exp_closed(1.0), 1e-4);
    EXPECT_NEAR(est.constant, 2.0 * std::sinh(0.5), 1e-4);
    EXPECT_NEAR(est.constant, 1.0422, 1e-4);
    EXPECT_DOUBLE_EQ(est.best_side, 1.0);
    // every aligned cube of side t gives the closed form, whatever its position
    const auto r = CellRange{100, 256};
    EXPECT_NEAR(a_loc_quantity(p, w, r), oracle::a_loc_exp_closed(0.5), 1e-5);
}

TEST(ALoc, SymmetricUnderDualSwap)
{
    const Grid g(2, 8);
    const auto p = make_exponent(SmoothStepExponent{1.5, 3.0, 0.0, 1.0}, g);
    const auto w = make_weight(PowerWeight{3.0}, g);
    const auto pc = conjugate_exponent(p);
    const auto sigma = dual_weight(p, w);
    for (std::size_t s : {0u, 200u, 450u, 700u})
        for (std::size_t len : {1u, 16u, 256u}) {
            const CellRange r{s, len};
            EXPECT_NEAR(a_loc_quantity(p, w, r) / a_loc_quantity(pc, sigma, r), 1.0, 1e-9);
        }
}

TEST(ALoc, MonotoneUnderFamilyEnlargement)
{
    const Grid g(2, 8);
    const auto p = make_exponent(SmoothStepExponent{}, g);
    const auto w = make_weight(ExpWeight{1.0}, g);
    const double coarse = a_loc_constant(p, w, {0, 3, 16}).constant;
    const double denser = a_loc_constant(p, w, {0, 3, 1}).constant;
    const double deeper = a_loc_constant(p, w, {0, 8, 1}).constant;
    EXPECT_LE(coarse, denser);
    EXPECT_LE(denser, deeper);
}

TEST(ALoc, TableMatchesDirectNorms)
{
    const Grid g(2, 7);
    const auto p = make_exponent(SmoothStepExponent{2.0, 3.0, 0.0, 1.0}, g);
    const auto w = make_weight(ExpWeight{1.0}, g);
    const auto est = a_loc_constant(p, w, {2, 2, 1});
    double direct = 0.0;
    for (std::size_t s = 0; s + 32 <= g.size(); ++s)
        direct = std::max(direct, a_loc_quantity(p, w, {s, 32}));
    EXPECT_NEAR(est.constant / direct, 1.0, 1e-9);
}

TEST(ALoc, PowerWeightStableUnderDomainGrowth)
{
    double prev = 0.0;
    for (int L : {4, 6}) {
        const Grid g(L, 6);
        const double c = a_loc_constant(make_exponent(ConstantExponent{2.0}, g), make_weight(PowerWeight{3.0}, g)).constant;
        EXPECT_TRUE(std::isfinite(c));
        if (prev > 0.0) {
            EXPECT_NEAR(c / prev, 1.0, 0.05);
        }
        prev = c;
    }
}

TEST(ALoc, Rejections)
{
    const Grid g(2, 6);
    const auto p = make_exponent(ConstantExponent{2.0}, g);
    const auto w = make_weight(UnitWeight{}, g);
    EXPECT_THROW(a_loc_constant(p, w, {-1, 2, 1}), DomainError);
    EXPECT_THROW(a_loc_constant(p, w, {0, 7, 1}), ResolutionError);
    EXPECT_THROW(a_loc_constant(make_exponent(ConstantExponent{1.0}, g), w), DomainError);
}
