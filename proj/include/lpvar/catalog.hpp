#pragma once

// Named test functions and the seeded corpora built from them.
//
// Descriptors (all numbers in x-units):
//   gauss:a:b            exp(-a (x - b)^2)
//   bump:c:rho           exp(1 - 1/(1 - ((x - c)/rho)^2)) on |x - c| < rho
//   indicator:a:b        chi_[a, b)
//   mollified:a:b[:eps]  chi_[a, b) with C^infinity edges of width eps (default 4h)
//   phi:j:k, psi:j:k     single wavelet system atoms
//   expansion:J:top:seed random finite wavelet expansion
//   piecewise:seed       random piecewise-smooth function on [0, 1)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "lpvar/error.hpp"
#include "lpvar/exponent.hpp"
#include "lpvar/grid.hpp"
#include "lpvar/random.hpp"
#include "lpvar/smooth.hpp"
#include "lpvar/wavelets.hpp"

namespace lpvar {

namespace detail {

inline std::string fmt_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::int64_t parse_integer(std::string_view s, std::string_view context)
{
    const double v = parse_number(s, context);
    if (v != std::floor(v) || std::abs(v) > 9.0e15)
        throw ConfigError("expected an integer in '" + std::string(context) + "'");
    return static_cast<std::int64_t>(v);
}

inline double window_edge(double x, double a, double b, double eps)
{
    return smooth_step((x - a) / eps + 0.5) * (1.0 - smooth_step((x - b) / eps + 0.5));
}

/// Atoms of the random expansion: phi_{J,k} and psi_{j,k} for J <= j <= top
/// with support inside [-3, 3].
inline GridFunction random_expansion(const Grid& grid, const WaveletSystem& sys, int base, int top,
                                     std::uint64_t seed)
{
    Rng rng(seed);
    const int len = sys.support_length();
    std::vector<double> out(grid.size(), 0.0);
    auto add = [&](Atom atom, int j, double scale) {
        const AtomTable t(sys, grid, atom, j);
        const auto k_lo = static_cast<std::int64_t>(std::ceil(std::ldexp(-3.0, j)));
        const auto k_hi = static_cast<std::int64_t>(std::floor(std::ldexp(3.0, j))) - len;
        for (std::int64_t k = k_lo; k <= k_hi; ++k) {
            const double c = scale * rng.normal();
            t.for_each(k, [&](std::size_t cell, double v) { out[cell] += c * v; });
        }
    };
    add(Atom::scaling, base, 1.0);
    for (int j = base; j <= top; ++j)
        add(Atom::wavelet, j, std::ldexp(1.0, -(j - base)));
    return GridFunction(grid, std::move(out));
}

/// One to four pieces on [0, 1); each is c0 + c1 x + c2 sin(2 pi nu x + theta)
/// with standard normal c's. Zero outside [0, 1).
inline GridFunction random_piecewise(const Grid& grid, std::uint64_t seed)
{
    Rng rng(seed);
    const auto pieces = 1 + rng.index(4);
    std::vector<double> cuts{0.0};
    for (std::uint64_t i = 1; i < pieces; ++i)
        cuts.push_back(rng.uniform());
    std::sort(cuts.begin(), cuts.end());
    struct Piece {
        double c0, c1, c2, nu, theta;
    };
    std::vector<Piece> ps;
    for (std::uint64_t i = 0; i < pieces; ++i) {
        Piece p{};
        p.c0 = rng.normal();
        p.c1 = rng.normal();
        p.c2 = rng.normal();
        p.nu = rng.uniform(0.5, 4.0);
        p.theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        ps.push_back(p);
    }
    return GridFunction::sample(grid, [&](double x) {
        if (x < 0.0 || x >= 1.0)
            return 0.0;
        const auto it = std::upper_bound(cuts.begin(), cuts.end(), x);
        const auto& p = ps[static_cast<std::size_t>(it - cuts.begin()) - 1];
        return p.c0 + p.c1 * x + p.c2 * std::sin(2.0 * std::numbers::pi * p.nu * x + p.theta);
    });
}

}  // namespace detail

/// Samples the function named by `text`; atoms and expansions need `sys`.
inline GridFunction make_function(std::string_view text, const Grid& grid,
                                  const WaveletSystem* sys = nullptr)
{
    const auto parts = detail::split(text, ':');
    auto num = [&](std::size_t i) { return detail::parse_number(parts[i], text); };
    auto need_sys = [&] {
        if (!sys)
            throw ConfigError("'" + std::string(text) + "' needs a wavelet system");
        return sys;
    };
    const auto& kind = parts[0];
    if (kind == "gauss" && parts.size() == 3) {
        const double a = num(1), b = num(2);
        if (!(a > 0.0))
            throw ConfigError("gaussian width parameter must be positive");
        return GridFunction::sample(grid, [a, b](double x) { return std::exp(-a * (x - b) * (x - b)); });
    }
    if (kind == "bump" && parts.size() == 3) {
        const double c = num(1), rho = num(2);
        if (!(rho > 0.0))
            throw ConfigError("bump radius must be positive");
        return GridFunction::sample(grid, [c, rho](double x) { return smooth_bump((x - c) / rho); });
    }
    if (kind == "indicator" && parts.size() == 3)
        return indicator(grid, num(1), num(2));
    if (kind == "mollified" && (parts.size() == 3 || parts.size() == 4)) {
        const double a = num(1), b = num(2);
        const double eps = parts.size() == 4 ? num(3) : 4.0 * grid.step();
        if (!(eps > 0.0) || !(b - a > eps))
            throw ConfigError("mollified indicator needs 0 < eps < b - a");
        return GridFunction::sample(grid, [=](double x) { return detail::window_edge(x, a, b, eps); });
    }
    if ((kind == "phi" || kind == "psi") && parts.size() == 3) {
        const auto j = detail::parse_integer(parts[1], text);
        const auto k = detail::parse_integer(parts[2], text);
        return dilate_translate(*need_sys(), kind == "phi" ? Atom::scaling : Atom::wavelet,
                                static_cast<int>(j), k, grid);
    }
    if (kind == "expansion" && parts.size() == 4) {
        const auto base = detail::parse_integer(parts[1], text);
        const auto top = detail::parse_integer(parts[2], text);
        const auto seed = detail::parse_integer(parts[3], text);
        return detail::random_expansion(grid, *need_sys(), static_cast<int>(base),
                                        static_cast<int>(top), static_cast<std::uint64_t>(seed));
    }
    if (kind == "piecewise" && parts.size() == 2)
        return detail::random_piecewise(grid, static_cast<std::uint64_t>(detail::parse_integer(parts[1], text)));
    throw ConfigError("unknown function descriptor '" + std::string(text) + "'");
}

/// Corpus for the equivalence experiment: Gaussians, bumps, atoms, random
/// expansions and mollified indicators, all vanishing outside [-3, 3].
/// Descriptors only depend on (seed, size, base), never on the grid.
inline std::vector<std::string> equivalence_corpus(std::uint64_t seed, std::size_t size, int base)
{
    Rng rng(seed);
    std::vector<std::string> out;
    using detail::fmt_number;
    const std::int64_t k_lo = static_cast<std::int64_t>(std::ceil(std::ldexp(-3.0, base)));
    for (std::size_t i = 0; out.size() < size; ++i) {
        switch (i % 5) {
        case 0: {
            // a >= 6 keeps the tail below 1e-16 outside [-3.5, 3.5]
            const double a = rng.uniform(6.0, 16.0);
            const double b = rng.uniform(-1.0, 1.0);
            out.push_back("gauss:" + fmt_number(a) + ":" + fmt_number(b));
            break;
        }
        case 1: {
            const double rho = rng.uniform(0.3, 1.2);
            const double c = rng.uniform(-1.5, 1.5);
            out.push_back("bump:" + fmt_number(c) + ":" + fmt_number(rho));
            break;
        }
        case 2: {
            const auto k = k_lo + static_cast<std::int64_t>(rng.index(2));
            const bool scaling = (i / 5) % 2 == 0;
            out.push_back(std::string(scaling ? "phi:" : "psi:") + std::to_string(base) + ":" +
                          std::to_string(k));
            break;
        }
        case 3: {
            const auto sub = rng.next() >> 12;
            out.push_back("expansion:" + std::to_string(base) + ":" + std::to_string(base + 2) + ":" +
                          std::to_string(sub));
            break;
        }
        default: {
            const double a = rng.uniform(-2.0, 0.0);
            const double b = a + rng.uniform(0.5, 2.0);
            out.push_back("mollified:" + fmt_number(a) + ":" + fmt_number(b));
            break;
        }
        }
    }
    return out;
}

/// Seeded piecewise-smooth functions on [0, 1).
inline std::vector<std::string> piecewise_corpus(std::uint64_t seed, std::size_t size)
{
    Rng rng(seed);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < size; ++i)
        out.push_back("piecewise:" + std::to_string(rng.next() >> 12));
    return out;
}

/// Gaussians and bumps inside [-2, 2].
inline std::vector<std::string> bump_corpus(std::uint64_t seed, std::size_t size)
{
    Rng rng(seed);
    std::vector<std::string> out;
    using detail::fmt_number;
    for (std::size_t i = 0; i < size; ++i) {
        if (i % 2 == 0) {
            const double a = rng.uniform(4.0, 16.0);
            const double b = rng.uniform(-1.0, 1.0);
            out.push_back("gauss:" + fmt_number(a) + ":" + fmt_number(b));
        } else {
            const double rho = rng.uniform(0.2, 1.0);
            const double c = rng.uniform(-1.0, 1.0);
            out.push_back("bump:" + fmt_number(c) + ":" + fmt_number(rho));
        }
    }
    return out;
}

}  // namespace lpvar
