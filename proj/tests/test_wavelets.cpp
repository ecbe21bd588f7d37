#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "lpvar/catalog.hpp"
#include "lpvar/norms.hpp"
#include "lpvar/operators.hpp"
#include "lpvar/wavelets.hpp"

using namespace lpvar;

namespace {

// the default margin 2^-J (2N - 1) = 5 leaves no interior at L = 4
const AnalyzeOptions kMargin{0.5};

const WaveletSystem& db3()
{
    static const WaveletSystem sys = build_daubechies(3, 12);
    return sys;
}

double sample_integral(std::span<const double> v, double step)
{
    // trapezoid over the closed support
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        s += 0.5 * (v[i] + v[i + 1]);
    return s * step;
}

double sample_inner_shift(std::span<const double> v, std::size_t shift, double step)
{
    double s = 0.0;
    for (std::size_t i = shift; i < v.size(); ++i)
        s += v[i] * v[i - shift];
    return s * step;
}

}  // namespace

TEST(Daubechies, HaarSystem)
{
    const auto sys = build_daubechies(1, 8);
    ASSERT_EQ(sys.lowpass().size(), 2u);
    EXPECT_NEAR(sys.lowpass()[0], 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(sys.lowpass()[1], 1.0 / std::sqrt(2.0), 1e-15);
    for (double t : {0.01, 0.3, 0.77, 0.99})
        EXPECT_NEAR(sys.phi(t), 1.0, 1e-12) << t;
    EXPECT_EQ(sys.phi(1.2), 0.0);
    EXPECT_NEAR(sys.psi(0.25), 1.0, 1e-12);
    EXPECT_NEAR(sys.psi(0.75), -1.0, 1e-12);
}

TEST(Daubechies, FilterIdentities)
{
    for (int n = 1; n <= 4; ++n) {
        const auto sys = build_daubechies(n, 8);
        const auto h = sys.lowpass();
        ASSERT_EQ(h.size(), static_cast<std::size_t>(2 * n));
        EXPECT_NEAR(std::accumulate(h.begin(), h.end(), 0.0), std::sqrt(2.0), 1e-12);
        EXPECT_NEAR(std::inner_product(h.begin(), h.end(), h.begin(), 0.0), 1.0, 1e-12);
        // even shifts of h are orthogonal
        for (std::size_t s = 2; s < h.size(); s += 2) {
            double dot = 0.0;
            for (std::size_t i = s; i < h.size(); ++i)
                dot += h[i] * h[i - s];
            EXPECT_NEAR(dot, 0.0, 1e-12);
        }
    }
}

TEST(Daubechies, CascadeFunctions)
{
    const auto& sys = db3();
    const double step = sys.cascade_step();
    EXPECT_NEAR(sample_integral(sys.phi_samples(), step), 1.0, 1e-4);
    EXPECT_NEAR(sample_inner_shift(sys.phi_samples(), 0, step), 1.0, 1e-4);
    EXPECT_NEAR(sample_inner_shift(sys.psi_samples(), 0, step), 1.0, 1e-4);
    const auto unit = static_cast<std::size_t>(1) << sys.cascade_resolution();
    EXPECT_NEAR(sample_inner_shift(sys.phi_samples(), unit, step), 0.0, 1e-4);
    EXPECT_NEAR(sample_integral(sys.psi_samples(), step), 0.0, 1e-4);
    for (double t : {-0.5, -1e-9, 5.0 + 1e-9, 6.0}) {
        EXPECT_EQ(sys.phi(t), 0.0) << t;
        EXPECT_EQ(sys.psi(t), 0.0) << t;
    }
    EXPECT_LT(sys.cascade_residual(), 1e-10);
}

TEST(Daubechies, Rejections)
{
    EXPECT_THROW(build_daubechies(0, 10), ConfigError);
    EXPECT_THROW(build_daubechies(5, 10), ConfigError);
    EXPECT_THROW(build_daubechies(3, 7), ConfigError);
}

TEST(Atoms, DilateTranslate)
{
    const auto& sys = db3();
    const Grid g(4, 10);
    const auto phi = dilate_translate(sys, Atom::scaling, 0, 0, g);
    for (std::size_t i = 0; i < g.size(); i += 37)
        EXPECT_NEAR(phi[i], sys.phi(g.point(i)), 1e-14);
    for (int j = 0; j <= 4; ++j)
        for (std::int64_t m : {-4, -2, -1}) {
            const std::int64_t k = m << j;
            const auto f = dilate_translate(sys, Atom::wavelet, j, k, g);
            EXPECT_NEAR(l2_norm(f), 1.0, 1e-4) << j << "," << k;
            const auto s = dilate_translate(sys, Atom::scaling, j, k, g);
            EXPECT_NEAR(l2_norm(s), 1.0, 1e-4) << j << "," << k;
            std::size_t first = g.size(), last = 0;
            for (std::size_t i = 0; i < g.size(); ++i)
                if (s[i] != 0.0) {
                    first = std::min(first, i);
                    last = i;
                }
            // support length 2^-j (2N - 1)
            EXPECT_NEAR(static_cast<double>(last - first + 1) * g.step(), std::ldexp(5.0, -j), g.step());
        }
    EXPECT_THROW(dilate_translate(sys, Atom::scaling, -2, 0, Grid(4, 12)), ResolutionError);
}

TEST(Atoms, GramMatrixOfInDomainAtoms)
{
    const auto& sys = db3();
    const Grid g(4, 10);
    const int J = 0, top = 4;
    std::vector<GridFunction> atoms;
    std::vector<std::pair<double, double>> supp;
    auto add = [&](Atom a, int j) {
        const AtomTable t(sys, g, a, j);
        for (std::int64_t k = t.k_first(); k <= t.k_last(); ++k) {
            const double lo = std::ldexp(static_cast<double>(k), -j), hi = std::ldexp(static_cast<double>(k + 5), -j);
            if (lo >= g.left() && hi <= g.right()) {
                atoms.push_back(dilate_translate(sys, a, j, k, g));
                supp.emplace_back(lo, hi);
            }
        }
    };
    add(Atom::scaling, J);
    for (int j = J; j <= top; ++j)
        add(Atom::wavelet, j);
    double worst = 0.0;
    for (std::size_t a = 0; a < atoms.size(); ++a)
        for (std::size_t b = a; b < atoms.size(); ++b) {
            if (supp[a].second <= supp[b].first || supp[b].second <= supp[a].first)
                continue;
            worst = std::max(worst, std::abs(pairing(atoms[a], atoms[b]) - (a == b ? 1.0 : 0.0)));
        }
    EXPECT_LE(worst, 1e-3);
}

TEST(Analyze, SingleAtoms)
{
    const auto& sys = db3();
    const Grid g(4, 10);
    const auto c = analyze(dilate_translate(sys, Atom::scaling, 0, -2, g), sys, 0, 4, kMargin);
    for (std::int64_t k = c.scaling.first; k < c.scaling.first + static_cast<std::int64_t>(c.scaling.values.size()); ++k)
        EXPECT_NEAR(c.a(k), k == -2 ? 1.0 : 0.0, 1e-4);
    EXPECT_LT(c.detail_energy(), 1e-6);

    const auto d = analyze(dilate_translate(sys, Atom::wavelet, 2, 3, g), sys, 0, 4, kMargin);
    EXPECT_NEAR(d.d(2, 3), 1.0, 1e-4);
    EXPECT_LT(d.scaling.energy(), 1e-8);
    EXPECT_NEAR(d.detail_energy(), 1.0, 1e-4);
}

TEST(Analyze, ParsevalForGaussian)
{
    const auto& sys = db3();
    const Grid g(4, 10);
    const auto f = make_function("gauss:8:0.2", g);
    const auto c = analyze(f, sys, 0, 4, AnalyzeOptions{0.5});
    EXPECT_NEAR(c.energy() / pairing(f, f), 1.0, 1e-3);
}

TEST(Analyze, Rejections)
{
    const auto& sys = db3();
    const Grid g(4, 10);
    EXPECT_THROW(analyze(make_function("bump:3:0.8", g), sys, 0, 4, kMargin), DomainError);
    EXPECT_THROW(analyze(make_function("bump:0:1", g), sys, 0, 4), DomainError);
    EXPECT_NO_THROW(analyze(make_function("bump:0:1", Grid(6, 10)), sys, 0, 4));
    EXPECT_THROW(analyze(make_function("bump:0:1", g), sys, 0, 9), ResolutionError);
    EXPECT_THROW(analyze(make_function("bump:0:1", g), sys, 2, 1), ConfigError);
}

TEST(Synthesize, ZeroAndRoundTrips)
{
    const auto& sys = db3();
    const Grid g(4, 10);
    auto c = analyze(make_function("bump:0:1", g), sys, 0, 4, kMargin);
    for (auto& v : c.scaling.values)
        v = 0.0;
    for (auto& l : c.details)
        for (auto& v : l.values)
            v = 0.0;
    EXPECT_TRUE(synthesize(c, sys, g).is_zero());

    const auto atom = dilate_translate(sys, Atom::scaling, 0, -3, g);
    EXPECT_LE(l2_norm(synthesize(analyze(atom, sys, 0, 4, kMargin), sys, g) - atom), 1e-3);

    const auto f = make_function("bump:0.3:1.5", g);
    const auto c4 = analyze(f, sys, 0, 4, AnalyzeOptions{0.5});
    const auto c5 = analyze(f, sys, 0, 5, AnalyzeOptions{0.5});
    const double err = l2_norm(f - synthesize(c4, sys, g)) / l2_norm(f);
    const double tail = std::sqrt(std::max(0.0, c5.energy() - c4.energy())) / l2_norm(f);
    EXPECT_LE(err, 1e-3 + tail);
}

TEST(Synthesize, AnalyzeIsLeftInverseOnCoefficients)
{
    const auto& sys = db3();
    const Grid g(4, 10);
    const auto f = make_function("expansion:0:2:99", g, &sys);
    const auto c = analyze(f, sys, 0, 4, AnalyzeOptions{0.5});
    const auto again = analyze(synthesize(c, sys, g), sys, 0, 4, AnalyzeOptions{0.5});
    double worst = std::abs(again.scaling.values[0] - c.scaling.values[0]);
    for (std::size_t i = 0; i < c.scaling.values.size(); ++i)
        worst = std::max(worst, std::abs(again.scaling.values[i] - c.scaling.values[i]));
    for (std::size_t l = 0; l < c.details.size(); ++l)
        for (std::size_t i = 0; i < c.details[l].values.size(); ++i)
            worst = std::max(worst, std::abs(again.details[l].values[i] - c.details[l].values[i]));
    EXPECT_LE(worst, 1e-3);
}

TEST(Synthesize, PyramidStepMatchesQuadrature)
{
    const auto& sys = db3();
    const Grid g(4, 12);
    const auto f = make_function("gauss:6:0", g);
    const auto fine = level_coefficients(f, sys, Atom::scaling, 4);
    const auto [a, d] = pyramid_step(fine, sys, g);
    const auto a_direct = level_coefficients(f, sys, Atom::scaling, 3);
    const auto d_direct = level_coefficients(f, sys, Atom::wavelet, 3);
    double scale = 0.0, worst = 0.0;
    for (std::int64_t k = -16; k <= 12; ++k) {
        scale = std::max(scale, std::abs(a_direct[k]));
        worst = std::max({worst, std::abs(a[k] - a_direct[k]), std::abs(d[k] - d_direct[k])});
    }
    EXPECT_LE(worst, 1e-4 * scale);
}

TEST(SquareFunctions, SingleAtoms)
{
    const auto& sys = db3();
    const Grid g(4, 10);
    const auto phi = dilate_translate(sys, Atom::scaling, 0, -2, g);
    const auto sp = square_functions(analyze(phi, sys, 0, 4, kMargin), sys, g);
    EXPECT_LE((sp.v - phi.abs()).sup_abs(), 1e-4 * phi.sup_abs() * 10);
    EXPECT_LE(sp.w1.sup_abs(), 1e-3);
    EXPECT_LE(sp.w2.sup_abs(), 1e-3);

    const auto psi = dilate_translate(sys, Atom::wavelet, 1, 0, g);
    const auto ss = square_functions(analyze(psi, sys, 0, 4, kMargin), sys, g);
    EXPECT_LE(ss.v.sup_abs(), 1e-3);
    EXPECT_LE((ss.w1 - psi.abs()).sup_abs(), 1e-3 * psi.sup_abs());
    const auto chi = std::sqrt(2.0) * indicator(g, 0.0, 0.5);
    EXPECT_LE((ss.w2 - chi).sup_abs(), 1e-3);
}

TEST(SquareFunctions, L2NormsOfDetailSquareFunctions)
{
    const auto& sys = db3();
    const Grid g(4, 10);
    const auto f = make_function("expansion:0:3:5", g, &sys);
    const auto c = analyze(f, sys, 0, 4, AnalyzeOptions{0.5});
    const auto s = square_functions(c, sys, g);
    const double d = std::sqrt(c.detail_energy());
    EXPECT_NEAR(l2_norm(s.w1), d, 1e-3 * std::max(1.0, d));
    EXPECT_NEAR(l2_norm(s.w2), d, 1e-3 * std::max(1.0, d));
    for (std::size_t i = 0; i < g.size(); ++i)
        ASSERT_GE(s.v[i], 0.0);
}

TEST(SquareFunctions, W2IsConstantOnFinestCubes)
{
    const auto& sys = db3();
    const Grid g(4, 10);
    const auto c = analyze(make_function("bump:0.1:1.3", g), sys, 0, 4, AnalyzeOptions{0.5});
    const auto w2 = square_functions(c, sys, g).w2;
    const std::size_t block = std::size_t{1} << (10 - 4);
    for (std::size_t s = 0; s < g.size(); s += block)
        for (std::size_t i = s; i < s + block; ++i)
            ASSERT_EQ(w2[i], w2[s]);
}

TEST(SquareFunctions, DominatedByIteratedLocalMaximal)
{
    // V f <= C (M^loc)^{4N+10} f with a corpus-calibrated C, and the same for
    // chi_{j,k} against phi_{j,k}
    const auto& sys = db3();
    const Grid g(4, 8);
    const int iterations = 4 * 3 + 10;
    double worst = 0.0;
    for (const auto& d : equivalence_corpus(4, 10, 0)) {
        const auto f = make_function(d, g, &sys);
        const auto v = square_functions(analyze(f, sys, 0, 2, AnalyzeOptions{0.5}), sys, g).v;
        const auto m = m_loc(f, iterations);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (v[i] > 1e-12 * v.sup_abs()) {
                ASSERT_GT(m[i], 0.0) << d;
                worst = std::max(worst, v[i] / m[i]);
            }
    }
    EXPECT_TRUE(std::isfinite(worst));
    EXPECT_LT(worst, 100.0);

    for (int j = 0; j <= 2; ++j) {
        const auto phi = dilate_translate(sys, Atom::scaling, j, 0, g);
        const auto m = m_loc(phi, iterations);
        const auto chi = std::sqrt(std::ldexp(1.0, j)) * indicator(g, 0.0, std::ldexp(1.0, -j));
        for (std::size_t i = 0; i < g.size(); ++i)
            if (chi[i] > 0.0) {
                EXPECT_LT(chi[i] / m[i], 100.0);
            }
    }
}
