#pragma once

// Lower bounds for the local Muckenhoupt constant
//   sup_{|Q| <= 1} |Q|^{-1} ||chi_Q||_{L^{p(.)}(w)} ||chi_Q||_{L^{p'(.)}(sigma)}
// over a finite family of grid-aligned intervals.

#include <cmath>
#include <optional>
#include <vector>

#include "lpvar/exponent.hpp"
#include "lpvar/grid.hpp"
#include "lpvar/norms.hpp"

namespace lpvar {

/// Intervals of side 2^-m, min_level <= m <= max_level (default r), whose left
/// edge sits on every stride-th cell boundary.
struct CubeFamily {
    int min_level = 0;
    std::optional<int> max_level;
    std::size_t stride = 1;
};

struct ALocEstimate {
    double constant = 0.0;
    double best_left = 0.0;
    double best_side = 0.0;
    std::size_t cubes = 0;
    /// Maximum per level, indexed by m - min_level.
    std::vector<double> level_max;
};

namespace detail {

class IndicatorNormTable {
public:
    IndicatorNormTable(const VariableExponent& p, const Weight& w) : p_(p), w_(w)
    {
        const std::size_t n = p.grid().size();
        prefix_.assign(n + 1, 0.0L);
        for (std::size_t i = 0; i < n; ++i)
            prefix_[i + 1] = prefix_[i] + static_cast<long double>(w[i]);
        run_end_.assign(n, n);
        for (std::size_t i = n; i-- > 0;)
            run_end_[i] = (i + 1 < n && p[i + 1] == p[i]) ? run_end_[i + 1] : i + 1;
    }

    double operator()(CellRange r) const
    {
        if (run_end_[r.first] >= r.end()) {
            const long double mass =
                (prefix_[r.end()] - prefix_[r.first]) * static_cast<long double>(p_.grid().step());
            return static_cast<double>(std::pow(mass, 1.0L / static_cast<long double>(p_[r.first])));
        }
        return indicator_norm(p_, w_, r);
    }

private:
    const VariableExponent& p_;
    const Weight& w_;
    std::vector<long double> prefix_;
    std::vector<std::size_t> run_end_;
};

}  // namespace detail

/// |Q|^{-1} ||chi_Q||_{p,w} ||chi_Q||_{p',sigma} for one interval of cells.
inline double a_loc_quantity(const VariableExponent& p, const Weight& w, CellRange cells)
{
    const auto pc = conjugate_exponent(p);
    const auto sigma = dual_weight(p, w);
    const double side = static_cast<double>(cells.count) * p.grid().step();
    return indicator_norm(p, w, cells) * indicator_norm(pc, sigma, cells) / side;
}

inline ALocEstimate a_loc_constant(const VariableExponent& p, const Weight& w,
                                   const CubeFamily& family = {})
{
    require_same_grid(p.grid(), w.grid(), "a_loc_constant");
    if (!p.in_class_p())
        throw DomainError("local Muckenhoupt constant needs 1 < p_- <= p_+ < infinity");
    const Grid& g = p.grid();
    const int max_level = family.max_level.value_or(g.resolution());
    if (family.min_level < 0)
        throw DomainError("cube family contains intervals with |Q| > 1");
    if (max_level > g.resolution() || family.min_level > max_level)
        throw ResolutionError("cube family levels must satisfy 0 <= min <= max <= r");
    if (family.stride == 0)
        throw ConfigError("cube family stride must be positive");

    const auto pc = conjugate_exponent(p);
    const auto sigma = dual_weight(p, w);
    const detail::IndicatorNormTable norm_w(p, w);
    const detail::IndicatorNormTable norm_sigma(pc, sigma);

    ALocEstimate est;
    const std::size_t n = g.size();
    for (int m = family.min_level; m <= max_level; ++m) {
        const std::size_t len = std::size_t{1} << (g.resolution() - m);
        const double side = std::ldexp(1.0, -m);
        double level_max = 0.0;
        for (std::size_t s = 0; s + len <= n; s += family.stride) {
            const CellRange r{s, len};
            const double q = norm_w(r) * norm_sigma(r) / side;
            ++est.cubes;
            level_max = std::max(level_max, q);
            if (q > est.constant) {
                est.constant = q;
                est.best_left = g.left() + static_cast<double>(s) * g.step();
                est.best_side = side;
            }
        }
        est.level_max.push_back(level_max);
    }
    return est;
}

}  // namespace lpvar
