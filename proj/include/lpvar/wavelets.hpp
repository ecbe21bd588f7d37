#pragma once

// Compactly supported Daubechies wavelets sampled by the cascade algorithm,
// the inhomogeneous expansion from a base level J, and the square functions
//   Vf  = ( sum_k |<f,phi_{J,k}> phi_{J,k}|^2 )^{1/2}
//   W1f = ( sum_{j>=J} sum_k |<f,psi_{j,k}> psi_{j,k}|^2 )^{1/2}
//   W2f = ( sum_{j>=J} sum_k |<f,psi_{j,k}> chi_{j,k}|^2 )^{1/2},  chi_{j,k} = 2^{j/2} 1_{Q_{j,k}}.
//
// Coefficients are inner products computed by quadrature against the sampled
// atoms; the filter-bank pyramid is only provided as a cross-check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lpvar/error.hpp"
#include "lpvar/grid.hpp"

namespace lpvar {

enum class Atom { scaling, wavelet };

namespace detail {

// Minimal-phase Daubechies lowpass filters, sum = sqrt(2), sum of squares = 1.
inline constexpr std::array<double, 2> kDb1 = {0.70710678118654752440, 0.70710678118654752440};
inline constexpr std::array<double, 4> kDb2 = {0.48296291314453414337, 0.83651630373780790558,
                                               0.22414386804201338103, -0.12940952255126038117};
inline constexpr std::array<double, 6> kDb3 = {
    0.33267055295008261600, 0.80689150931109257649, 0.45987750211849157010,
    -0.13501102001025458870, -0.08544127388202666169, 0.03522629188570953660};
inline constexpr std::array<double, 8> kDb4 = {
    0.23037781330889650086,  0.71484657055291564709, 0.63088076792985890788,
    -0.02798376941685985421, -0.18703481171909308408, 0.03084138183556076363,
    0.03288301166688519974,  -0.01059740178506903211};

inline std::vector<double> daubechies_lowpass(int order)
{
    switch (order) {
    case 1: return {kDb1.begin(), kDb1.end()};
    case 2: return {kDb2.begin(), kDb2.end()};
    case 3: return {kDb3.begin(), kDb3.end()};
    case 4: return {kDb4.begin(), kDb4.end()};
    default: throw ConfigError("Daubechies order must be 1, 2, 3 or 4, got " + std::to_string(order));
    }
}

}  // namespace detail

inline constexpr int kMaxCascadeIterations = 60;
inline constexpr double kCascadeTolerance = 1e-10;

class WaveletSystem {
public:
    WaveletSystem(int order, int cascade_resolution, std::vector<double> lowpass,
                  std::vector<double> phi, std::vector<double> psi, int iterations,
                  double residual)
        : order_(order), cascade_resolution_(cascade_resolution), lowpass_(std::move(lowpass)),
          phi_(std::move(phi)), psi_(std::move(psi)), iterations_(iterations), residual_(residual)
    {
        const auto taps = lowpass_.size();
        highpass_.resize(taps);
        for (std::size_t k = 0; k < taps; ++k)
            highpass_[k] = ((k % 2 == 0) ? 1.0 : -1.0) * lowpass_[taps - 1 - k];
    }

    /// N, with supp phi = supp psi = [0, 2N-1].
    int order() const noexcept { return order_; }
    int support_length() const noexcept { return 2 * order_ - 1; }
    int cascade_resolution() const noexcept { return cascade_resolution_; }
    int cascade_iterations() const noexcept { return iterations_; }
    double cascade_residual() const noexcept { return residual_; }
    std::span<const double> lowpass() const noexcept { return lowpass_; }
    std::span<const double> highpass() const noexcept { return highpass_; }
    std::span<const double> phi_samples() const noexcept { return phi_; }
    std::span<const double> psi_samples() const noexcept { return psi_; }
    /// Step of the cascade sample grid.
    double cascade_step() const noexcept { return std::ldexp(1.0, -cascade_resolution_); }

    /// Linear interpolation of the cascade samples; zero outside the support.
    double operator()(Atom a, double t) const noexcept
    {
        const auto& s = a == Atom::scaling ? phi_ : psi_;
        const double u = std::ldexp(t, cascade_resolution_);
        if (!(u >= 0.0) || u > static_cast<double>(s.size() - 1))
            return 0.0;
        const double fl = std::floor(u);
        const auto i = static_cast<std::size_t>(fl);
        if (i + 1 >= s.size())
            return s.back();
        const double frac = u - fl;
        return frac == 0.0 ? s[i] : s[i] + frac * (s[i + 1] - s[i]);
    }
    double phi(double t) const noexcept { return (*this)(Atom::scaling, t); }
    double psi(double t) const noexcept { return (*this)(Atom::wavelet, t); }

private:
    int order_;
    int cascade_resolution_;
    std::vector<double> lowpass_;
    std::vector<double> highpass_;
    std::vector<double> phi_;
    std::vector<double> psi_;
    int iterations_;
    double residual_;
};

/// Daubechies system of order N (2N taps) with phi and psi sampled at step 2^-r_c.
inline WaveletSystem build_daubechies(int order, int cascade_resolution)
{
    auto h = detail::daubechies_lowpass(order);
    if (cascade_resolution < 8 || cascade_resolution > 22)
        throw ConfigError("cascade resolution must lie in [8, 22], got " +
                          std::to_string(cascade_resolution));
    const std::int64_t unit = std::int64_t{1} << cascade_resolution;
    const std::int64_t len = static_cast<std::int64_t>(2 * order - 1) * unit + 1;
    const double root2 = std::sqrt(2.0);

    auto refine = [&](const std::vector<double>& src, const std::vector<double>& filter) {
        std::vector<double> out(static_cast<std::size_t>(len), 0.0);
        for (std::int64_t i = 0; i < len; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < filter.size(); ++k) {
                const std::int64_t s = 2 * i - static_cast<std::int64_t>(k) * unit;
                if (s >= 0 && s < len)
                    acc += filter[k] * src[static_cast<std::size_t>(s)];
            }
            out[static_cast<std::size_t>(i)] = root2 * acc;
        }
        return out;
    };

    std::vector<double> phi(static_cast<std::size_t>(len), 0.0);
    for (std::int64_t i = 0; i < unit; ++i)
        phi[static_cast<std::size_t>(i)] = 1.0;
    int it = 0;
    double residual = 0.0;
    for (; it < kMaxCascadeIterations; ++it) {
        auto next = refine(phi, h);
        residual = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i)
            residual = std::max(residual, std::abs(next[i] - phi[i]));
        phi = std::move(next);
        if (residual < kCascadeTolerance) {
            ++it;
            break;
        }
    }
    if (!(residual < 1e-6))
        throw InternalError("cascade iteration did not converge (residual " +
                            std::to_string(residual) + ")");

    std::vector<double> g(h.size());
    for (std::size_t k = 0; k < h.size(); ++k)
        g[k] = ((k % 2 == 0) ? 1.0 : -1.0) * h[h.size() - 1 - k];
    auto psi = refine(phi, g);
    return WaveletSystem(order, cascade_resolution, std::move(h), std::move(phi), std::move(psi), it,
                         residual);
}

/// Samples of one atom family F_{j,k} = 2^{j/2} F(2^j x - k) on a grid. All
/// translates share one pattern shifted by 2^{r-j} cells per unit of k.
class AtomTable {
public:
    AtomTable(const WaveletSystem& sys, const Grid& grid, Atom atom, int level)
        : grid_(grid), level_(level)
    {
        check_level(sys, grid, level);
        const int shift = grid.resolution() - level;
        cells_per_k_ = std::int64_t{1} << shift;
        const std::int64_t count = sys.support_length() * cells_per_k_;
        pattern_.resize(static_cast<std::size_t>(count));
        const double scale = std::sqrt(std::ldexp(1.0, level));
        for (std::int64_t c = 0; c < count; ++c) {
            const double t = std::ldexp(static_cast<double>(c) + 0.5, -shift);
            pattern_[static_cast<std::size_t>(c)] = scale * sys(atom, t);
        }
        origin_ = static_cast<std::int64_t>(grid.half_width()) << grid.resolution();
        // translates whose support [2^-j k, 2^-j (k + 2N - 1)] meets (-L, L)
        const double scaled = std::ldexp(static_cast<double>(grid.half_width()), level);
        k_first_ = static_cast<std::int64_t>(std::floor(-scaled - sys.support_length())) + 1;
        k_last_ = static_cast<std::int64_t>(std::ceil(scaled)) - 1;
    }

    static void check_level(const WaveletSystem& sys, const Grid& grid, int level)
    {
        if (level > grid.resolution())
            throw ResolutionError("atom level " + std::to_string(level) +
                                  " is finer than the grid");
        if (std::ldexp(1.0, -level) > 2.0 * grid.half_width())
            throw DomainError("atom level " + std::to_string(level) + " is coarser than the domain");
        if (sys.cascade_resolution() < grid.resolution() - level)
            throw ResolutionError("cascade resolution " + std::to_string(sys.cascade_resolution()) +
                                  " < r - j = " + std::to_string(grid.resolution() - level));
    }

    int level() const noexcept { return level_; }
    std::int64_t k_first() const noexcept { return k_first_; }
    std::int64_t k_last() const noexcept { return k_last_; }
    std::span<const double> pattern() const noexcept { return pattern_; }

    /// Calls fn(cell, value) for every in-domain cell of F_{j,k}.
    template <class Fn>
    void for_each(std::int64_t k, Fn&& fn) const
    {
        const std::int64_t start = k * cells_per_k_ + origin_;
        const auto n = static_cast<std::int64_t>(grid_.size());
        const auto p = static_cast<std::int64_t>(pattern_.size());
        const std::int64_t c0 = std::max<std::int64_t>(0, -start);
        const std::int64_t c1 = std::min<std::int64_t>(p, n - start);
        for (std::int64_t c = c0; c < c1; ++c)
            fn(static_cast<std::size_t>(start + c), pattern_[static_cast<std::size_t>(c)]);
    }

    double inner(const GridFunction& f, std::int64_t k) const
    {
        double s = 0.0;
        for_each(k, [&](std::size_t i, double v) { s += f[i] * v; });
        return s * grid_.step();
    }

    /// Cells of Q_{j,k} that lie in the domain.
    CellRange cube_cells(std::int64_t k) const
    {
        const std::int64_t start = k * cells_per_k_ + origin_;
        const auto n = static_cast<std::int64_t>(grid_.size());
        const std::int64_t a = std::clamp<std::int64_t>(start, 0, n);
        const std::int64_t b = std::clamp<std::int64_t>(start + cells_per_k_, 0, n);
        return {static_cast<std::size_t>(a), static_cast<std::size_t>(b - a)};
    }

private:
    Grid grid_;
    int level_;
    std::int64_t cells_per_k_{};
    std::int64_t origin_{};
    std::int64_t k_first_{};
    std::int64_t k_last_{};
    std::vector<double> pattern_;
};

/// Samples of 2^{j/2} F(2^j x - k) on the grid.
inline GridFunction dilate_translate(const WaveletSystem& sys, Atom atom, int level,
                                     std::int64_t k, const Grid& grid)
{
    const AtomTable table(sys, grid, atom, level);
    std::vector<double> v(grid.size(), 0.0);
    table.for_each(k, [&](std::size_t i, double x) { v[i] = x; });
    return GridFunction(grid, std::move(v));
}

/// Coefficients of one level, indexed k = first, first + 1, ...
struct LevelCoefficients {
    int level = 0;
    std::int64_t first = 0;
    std::vector<double> values;

    double operator[](std::int64_t k) const noexcept
    {
        const auto i = k - first;
        if (i < 0 || i >= static_cast<std::int64_t>(values.size()))
            return 0.0;
        return values[static_cast<std::size_t>(i)];
    }
    double energy() const noexcept
    {
        double e = 0.0;
        for (double v : values)
            e += v * v;
        return e;
    }
};

/// {<f, phi_{J,k}>} and {<f, psi_{j,k}> : J <= j <= j_max} for in-domain translates.
struct WaveletCoefficients {
    int base_level = 0;
    int top_level = 0;
    LevelCoefficients scaling;
    std::vector<LevelCoefficients> details;

    double a(std::int64_t k) const noexcept { return scaling[k]; }
    double d(int j, std::int64_t k) const noexcept
    {
        if (j < base_level || j > top_level)
            return 0.0;
        return details[static_cast<std::size_t>(j - base_level)][k];
    }
    double detail_energy() const noexcept
    {
        double e = 0.0;
        for (const auto& l : details)
            e += l.energy();
        return e;
    }
    double energy() const noexcept { return scaling.energy() + detail_energy(); }
};

struct AnalyzeOptions {
    /// f must vanish outside [-L + margin, L - margin]; negative means the full
    /// atom support 2^-J (2N - 1) of the base level.
    double margin = -1.0;
    /// Samples with |f| <= support_threshold * sup|f| count as zero for the margin check.
    double support_threshold = 1e-12;
};

inline void check_expansion_levels(const WaveletSystem& sys, const Grid& grid, int base, int top)
{
    if (base > top)
        throw ConfigError("wavelet expansion needs J <= j_max");
    if (top > grid.resolution() - 2)
        throw ResolutionError("j_max = " + std::to_string(top) + " exceeds r - 2 = " +
                              std::to_string(grid.resolution() - 2));
    AtomTable::check_level(sys, grid, base);
}

inline LevelCoefficients level_coefficients(const GridFunction& f, const WaveletSystem& sys,
                                            Atom atom, int level)
{
    const AtomTable t(sys, f.grid(), atom, level);
    LevelCoefficients out{level, t.k_first(), {}};
    out.values.reserve(static_cast<std::size_t>(t.k_last() - t.k_first() + 1));
    for (std::int64_t k = t.k_first(); k <= t.k_last(); ++k)
        out.values.push_back(t.inner(f, k));
    return out;
}

inline WaveletCoefficients analyze(const GridFunction& f, const WaveletSystem& sys, int base_level,
                                   int top_level, const AnalyzeOptions& opt = {})
{
    const Grid& g = f.grid();
    check_expansion_levels(sys, g, base_level, top_level);
    const double margin =
        opt.margin >= 0.0 ? opt.margin : std::ldexp(sys.support_length(), -base_level);
    const double cutoff = opt.support_threshold * f.sup_abs();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = g.point(i);
        if (std::abs(f[i]) > cutoff && (x < g.left() + margin || x > g.right() - margin))
            throw DomainError("function support reaches within " + std::to_string(margin) +
                              " of the domain edge (x = " + std::to_string(x) + ")");
    }
    WaveletCoefficients c;
    c.base_level = base_level;
    c.top_level = top_level;
    c.scaling = level_coefficients(f, sys, Atom::scaling, base_level);
    for (int j = base_level; j <= top_level; ++j)
        c.details.push_back(level_coefficients(f, sys, Atom::wavelet, j));
    return c;
}

inline void accumulate_level(std::vector<double>& out, const LevelCoefficients& lc,
                             const WaveletSystem& sys, const Grid& grid, Atom atom)
{
    const AtomTable t(sys, grid, atom, lc.level);
    for (std::size_t i = 0; i < lc.values.size(); ++i) {
        const double c = lc.values[i];
        if (c == 0.0)
            continue;
        t.for_each(lc.first + static_cast<std::int64_t>(i),
                   [&](std::size_t cell, double v) { out[cell] += c * v; });
    }
}

/// sum_k a_{J,k} phi_{J,k} + sum_{j,k} d_{j,k} psi_{j,k} on the grid.
inline GridFunction synthesize(const WaveletCoefficients& c, const WaveletSystem& sys,
                               const Grid& grid)
{
    check_expansion_levels(sys, grid, c.base_level, c.top_level);
    std::vector<double> out(grid.size(), 0.0);
    accumulate_level(out, c.scaling, sys, grid, Atom::scaling);
    for (const auto& l : c.details)
        accumulate_level(out, l, sys, grid, Atom::wavelet);
    return GridFunction(grid, std::move(out));
}

/// sum_k d_{j,k} psi_{j,k} for a single level: the orthogonal projection onto W_j.
inline GridFunction detail_projection(const GridFunction& f, const WaveletSystem& sys, int level)
{
    const auto lc = level_coefficients(f, sys, Atom::wavelet, level);
    std::vector<double> out(f.size(), 0.0);
    accumulate_level(out, lc, sys, f.grid(), Atom::wavelet);
    return GridFunction(f.grid(), std::move(out));
}

struct SquareFunctions {
    GridFunction v;
    GridFunction w1;
    GridFunction w2;
};

inline SquareFunctions square_functions(const WaveletCoefficients& c, const WaveletSystem& sys,
                                        const Grid& grid)
{
    check_expansion_levels(sys, grid, c.base_level, c.top_level);
    const std::size_t n = grid.size();
    std::vector<double> v(n, 0.0), w1(n, 0.0), w2(n, 0.0);
    {
        const AtomTable t(sys, grid, Atom::scaling, c.base_level);
        for (std::size_t i = 0; i < c.scaling.values.size(); ++i) {
            const double a = c.scaling.values[i];
            if (a != 0.0)
                t.for_each(c.scaling.first + static_cast<std::int64_t>(i),
                           [&](std::size_t cell, double x) { v[cell] += (a * x) * (a * x); });
        }
    }
    for (const auto& l : c.details) {
        const AtomTable t(sys, grid, Atom::wavelet, l.level);
        const double chi = std::sqrt(std::ldexp(1.0, l.level));
        for (std::size_t i = 0; i < l.values.size(); ++i) {
            const double d = l.values[i];
            if (d == 0.0)
                continue;
            const auto k = l.first + static_cast<std::int64_t>(i);
            t.for_each(k, [&](std::size_t cell, double x) { w1[cell] += (d * x) * (d * x); });
            const auto q = t.cube_cells(k);
            for (std::size_t cell = q.first; cell < q.end(); ++cell)
                w2[cell] += (d * chi) * (d * chi);
        }
    }
    auto root = [&](std::vector<double>& s) {
        for (double& x : s)
            x = std::sqrt(x);
        return GridFunction(grid, std::move(s));
    };
    return {root(v), root(w1), root(w2)};
}

/// One filter-bank step: coefficients <f, phi_{j+1,m}> give <f, phi_{j,k}> and
/// <f, psi_{j,k}> through phi_{j,k} = sum_l h_l phi_{j+1,2k+l} (resp. g_l).
inline std::pair<LevelCoefficients, LevelCoefficients>
pyramid_step(const LevelCoefficients& fine, const WaveletSystem& sys, const Grid& grid)
{
    const int level = fine.level - 1;
    const AtomTable t(sys, grid, Atom::scaling, level);
    const auto h = sys.lowpass();
    const auto gh = sys.highpass();
    LevelCoefficients a{level, t.k_first(), {}}, d{level, t.k_first(), {}};
    for (std::int64_t k = t.k_first(); k <= t.k_last(); ++k) {
        double sa = 0.0, sd = 0.0;
        for (std::size_t l = 0; l < h.size(); ++l) {
            const double c = fine[2 * k + static_cast<std::int64_t>(l)];
            sa += h[l] * c;
            sd += gh[l] * c;
        }
        a.values.push_back(sa);
        d.values.push_back(sd);
    }
    return {a, d};
}

}  // namespace lpvar
