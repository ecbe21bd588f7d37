#include <gtest/gtest.h>

#include <cmath>

#include "lpvar/catalog.hpp"
#include "lpvar/sparse.hpp"
#include "oracles.hpp"

using namespace lpvar;

namespace {

/// Oscillations in heap order, computed by the pairwise-midpoint oracle.
std::vector<double> heap_oscillations(const std::vector<double>& v)
{
    std::vector<double> out;
    for (std::size_t len = v.size(); len >= 1; len /= 2)
        for (std::size_t s = 0; s < v.size(); s += len)
            out.push_back(oracle::mean_oscillation({v.begin() + static_cast<std::ptrdiff_t>(s),
                                                    v.begin() + static_cast<std::ptrdiff_t>(s + len)},
                                                   0.125));
    return out;
}

GridFunction counterexample(const Grid& g)
{
    return GridFunction::sample(g, [](double x) { return x >= 0.5 + 1.0 / 64 && x < 1.0 ? 1.0 : 0.0; });
}

}  // namespace

TEST(Sparse, ConstantFunctionGivesRootOnly)
{
    const Grid g(1, 6);
    const auto c = GridFunction::sample(g, [](double) { return 2.0; });
    const auto fam = sparse_decompose(c, DyadicCube{0, 0});
    ASSERT_EQ(fam.members.size(), 1u);
    EXPECT_EQ(fam.members[0].cube, (DyadicCube{0, 0}));
    EXPECT_EQ(fam.members[0].oscillation, 0.0);
    EXPECT_EQ(fam.members[0].nutshell.size(), 64u);
    EXPECT_TRUE(check_sparse_family(fam, c).ok());
}

TEST(Sparse, ExistenceMatchesExhaustiveSearch)
{
    const Grid g(1, 3);
    Rng rng(12);
    int exist = 0;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> all(g.size(), 0.0);
        std::vector<double> v(8);
        for (std::size_t i = 0; i < 8; ++i) {
            v[i] = rng.uniform() < 0.5 ? std::floor(rng.uniform() * 4.0) : rng.uniform();
            all[8 + i] = v[i];
        }
        const GridFunction f(g, all);
        const double med = oracle::lower_median(v);
        std::vector<double> dev;
        for (double x : v)
            dev.push_back(std::abs(x - med));
        const bool exists = oracle::sparse_family_exists(heap_oscillations(v), dev);
        const auto fam = sparse_decompose(f, DyadicCube{0, 0});
        const auto chk = check_sparse_family(fam, f);
        EXPECT_EQ(chk.ok(), exists) << "trial " << t;
        EXPECT_EQ(fam.uncovered_cells == 0, exists) << "trial " << t;
        // structure holds even when domination fails
        EXPECT_TRUE(chk.root_included && chk.descendants && chk.nutshells_disjoint &&
                    chk.nutshells_inside && chk.nutshells_large);
        exist += exists;
    }
    EXPECT_GT(exist, 100);
}

TEST(Sparse, UnitConstantCounterexample)
{
    for (int r : {6, 8, 10}) {
        const Grid g(1, r);
        const auto f = counterexample(g);
        const auto one = sparse_decompose(f, DyadicCube{0, 0}, kOscillationLevel, 1.0);
        EXPECT_GT(one.uncovered_cells, 0u) << r;
        EXPECT_GT(check_sparse_family(one, f).domination_violations, 0u) << r;
        const auto two = sparse_decompose(f, DyadicCube{0, 0}, kOscillationLevel, 2.0);
        EXPECT_TRUE(check_sparse_family(two, f).ok()) << r;
    }
}

TEST(Sparse, PiecewiseCorpusWithClassicalConstant)
{
    const Grid g(1, 10);
    for (const auto& d : piecewise_corpus(2, 25)) {
        const auto f = make_function(d, g);
        const auto fam = sparse_decompose(f, DyadicCube{0, 0}, kOscillationLevel, 2.0);
        const auto chk = check_sparse_family(fam, f);
        EXPECT_TRUE(chk.ok()) << d << " violations " << chk.domination_violations;
        EXPECT_EQ(fam.members.front().cube, (DyadicCube{0, 0}));
        for (std::size_t i = 1; i < fam.members.size(); ++i) {
            const auto& a = fam.members[i - 1].cube;
            const auto& b = fam.members[i].cube;
            EXPECT_TRUE(a.level < b.level || (a.level == b.level && a.index < b.index));
        }
    }
}

TEST(Sparse, NonUnitRoot)
{
    const Grid g(2, 8);
    const auto f = make_function("gauss:20:-1.3", g);
    const DyadicCube root{2, -6};
    const auto fam = sparse_decompose(f, root, kOscillationLevel, 2.0);
    EXPECT_EQ(fam.root, root);
    EXPECT_TRUE(check_sparse_family(fam, f).ok());
    for (const auto& s : fam.members)
        EXPECT_TRUE(root.contains(s.cube));
}

TEST(Sparse, CheckerCatchesBrokenFamilies)
{
    const Grid g(1, 6);
    // a narrow spike has zero oscillation on the root, so smaller cubes must join
    const auto f = indicator(g, 0.25, 0.3125);
    auto fam = sparse_decompose(f, DyadicCube{0, 0}, kOscillationLevel, 2.0);
    ASSERT_TRUE(check_sparse_family(fam, f).ok());

    ASSERT_GT(fam.members.size(), 1u);
    auto shared = fam;
    const auto& child = shared.members[1];
    const std::size_t cell = child.cube.cells(g).first;
    for (auto& s : shared.members)
        if (std::find(s.nutshell.begin(), s.nutshell.end(), cell) == s.nutshell.end() && s.cube.contains(child.cube)) {
            s.nutshell.push_back(cell);
            break;
        }
    EXPECT_FALSE(check_sparse_family(shared, f).nutshells_disjoint);

    auto small = fam;
    small.members.front().nutshell.resize(10);
    EXPECT_FALSE(check_sparse_family(small, f).nutshells_large);

    auto rootless = fam;
    rootless.members.erase(rootless.members.begin());
    EXPECT_FALSE(check_sparse_family(rootless, f).root_included);

    auto weak = fam;
    weak.factor = 1e-3;
    EXPECT_GT(check_sparse_family(weak, f).domination_violations, 0u);
}

TEST(Sparse, Rejections)
{
    const Grid g(1, 6);
    const auto f = make_function("piecewise:1", g);
    EXPECT_THROW(sparse_decompose(f, DyadicCube{0, 0}, kOscillationLevel, 0.0), ConfigError);
    EXPECT_THROW(sparse_decompose(f, DyadicCube{7, 0}), ResolutionError);
    EXPECT_THROW(sparse_decompose(f, DyadicCube{0, 3}), DomainError);
}
