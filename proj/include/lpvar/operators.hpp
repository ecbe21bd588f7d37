#pragma once

// Maximal operators over grid-aligned windows, rearrangements, medians and
// mean oscillations.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "lpvar/error.hpp"
#include "lpvar/grid.hpp"

namespace lpvar {

namespace detail {

/// out[i] = max(out[i], max over windows of `len` cells containing i of the
/// average of |f|). Block prefix/suffix maxima over the padded start array.
inline void window_max_update(std::span<const double> prefix, std::size_t len,
                              std::vector<double>& out, std::vector<double>& starts,
                              std::vector<double>& fwd, std::vector<double>& bwd)
{
    const std::size_t n = out.size();
    const double inv = 1.0 / static_cast<double>(len);
    // starts[t] is the average of the window beginning at cell t - (len - 1)
    const std::size_t m = n + len - 1;
    starts.assign(m, -std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s + len <= n; ++s)
        starts[s + len - 1] = (prefix[s + len] - prefix[s]) * inv;
    fwd.resize(m);
    bwd.resize(m);
    for (std::size_t b = 0; b < m; b += len) {
        const std::size_t e = std::min(m, b + len);
        fwd[b] = starts[b];
        for (std::size_t t = b + 1; t < e; ++t)
            fwd[t] = std::max(fwd[t - 1], starts[t]);
        bwd[e - 1] = starts[e - 1];
        for (std::size_t t = e - 1; t-- > b;)
            bwd[t] = std::max(bwd[t + 1], starts[t]);
    }
    // windows containing cell i start in [i - len + 1, i] -> padded [i, i + len - 1]
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::max(bwd[i], fwd[i + len - 1]);
        if (v > out[i])
            out[i] = v;
    }
}

inline std::vector<double> windowed_maximal(std::span<const double> f, std::size_t max_len)
{
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    std::size_t a = 0;
    while (a < n && f[a] == 0.0)
        ++a;
    if (a == n)
        return out;
    std::size_t b = n;
    while (f[b - 1] == 0.0)
        --b;
    max_len = std::min(max_len, n);
    // Cells farther than max_len from the support see only zero windows, and a
    // window clipped by the padded range lies entirely outside the support.
    const std::size_t lo = a > max_len ? a - max_len : 0;
    const std::size_t hi = std::min(n, b + max_len);
    const auto sub = f.subspan(lo, hi - lo);
    std::vector<double> prefix(sub.size() + 1, 0.0);
    for (std::size_t i = 0; i < sub.size(); ++i)
        prefix[i + 1] = prefix[i] + std::abs(sub[i]);
    std::vector<double> local(sub.size(), 0.0);
    std::vector<double> starts, fwd, bwd;
    for (std::size_t len = 1; len <= std::min(max_len, sub.size()); ++len)
        window_max_update(prefix, len, local, starts, fwd, bwd);
    std::copy(local.begin(), local.end(), out.begin() + static_cast<std::ptrdiff_t>(lo));
    return out;
}

}  // namespace detail

/// Local maximal operator: sup over grid-aligned intervals of length <= 1
/// containing the cell of the average of |f|, iterated `iterations` times.
inline GridFunction m_loc(const GridFunction& f, int iterations = 1)
{
    if (iterations < 1)
        throw ConfigError("m_loc needs at least one iteration");
    const std::size_t window = f.grid().cells_per_unit();
    std::vector<double> cur(f.values().begin(), f.values().end());
    for (int it = 0; it < iterations; ++it)
        cur = detail::windowed_maximal(cur, window);
    return GridFunction(f.grid(), std::move(cur));
}

/// Hardy-Littlewood maximal operator over all grid-aligned intervals in [-L, L].
inline GridFunction full_maximal(const GridFunction& f)
{
    return GridFunction(f.grid(), detail::windowed_maximal(f.values(), f.size()));
}

/// |f| on the cells of E sorted nonincreasingly; each entry carries measure h.
inline std::vector<double> decreasing_rearrangement(const GridFunction& f,
                                                    std::span<const std::size_t> cells)
{
    if (cells.empty())
        throw DomainError("decreasing rearrangement over an empty set");
    std::vector<double> v;
    v.reserve(cells.size());
    for (std::size_t i : cells)
        v.push_back(std::abs(f[i]));
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

inline std::vector<double> decreasing_rearrangement(const GridFunction& f, CellRange cells)
{
    if (cells.count == 0)
        throw DomainError("decreasing rearrangement over an empty set");
    std::vector<double> v(f.values().begin() + static_cast<std::ptrdiff_t>(cells.first),
                          f.values().begin() + static_cast<std::ptrdiff_t>(cells.end()));
    for (double& x : v)
        x = std::abs(x);
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

/// f*(t) for a rearrangement with cells of measure h: the value on the cell containing t.
inline double rearrangement_at(std::span<const double> sorted_desc, double t, double h)
{
    const auto k = static_cast<std::size_t>(std::floor(t / h * (1.0 + 1e-12)));
    return k < sorted_desc.size() ? sorted_desc[k] : 0.0;
}

/// Smallest sample value a with |{f > a}| <= |Q|/2 and |{f < a}| <= |Q|/2.
inline double median(std::span<const double> values)
{
    if (values.empty())
        throw DomainError("median over an empty set");
    std::vector<double> s(values.begin(), values.end());
    std::sort(s.begin(), s.end());
    const std::size_t m = s.size();
    for (std::size_t i = 0; i < m;) {
        std::size_t j = i;
        while (j < m && s[j] == s[i])
            ++j;
        const std::size_t below = i;
        const std::size_t above = m - j;
        if (2 * below <= m && 2 * above <= m)
            return s[i];
        i = j;
    }
    throw InternalError("median: no sample value satisfies the median condition");
}

inline std::span<const double> cube_values(const GridFunction& f, const DyadicCube& q)
{
    const auto r = q.cells(f.grid());
    return f.values().subspan(r.first, r.count);
}

inline double median(const GridFunction& f, const DyadicCube& q) { return median(cube_values(f, q)); }

/// inf over real c of ((f - c) 1_Q)^*(lambda |Q|).
///
/// With k = floor(lambda m) the objective at c is the (k+1)-th largest |f_i - c|,
/// so the infimum is half the narrowest span of m - k consecutive sorted values.
inline double mean_oscillation(std::span<const double> values, double lambda)
{
    if (!(lambda > 0.0 && lambda < 1.0))
        throw DomainError("oscillation level must lie in (0, 1)");
    if (values.empty())
        throw DomainError("mean oscillation over an empty set");
    std::vector<double> s(values.begin(), values.end());
    std::sort(s.begin(), s.end());
    const std::size_t m = s.size();
    const auto k = static_cast<std::size_t>(std::floor(lambda * static_cast<double>(m) * (1.0 + 1e-12)));
    if (k >= m)
        return 0.0;
    const std::size_t keep = m - k;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + keep <= m; ++i)
        best = std::min(best, s[i + keep - 1] - s[i]);
    return 0.5 * best;
}

/// Level 2^{-n-2} for n = 1.
inline constexpr double kOscillationLevel = 0.125;

inline double mean_oscillation(const GridFunction& f, const DyadicCube& q,
                               double lambda = kOscillationLevel)
{
    return mean_oscillation(cube_values(f, q), lambda);
}

}  // namespace lpvar
