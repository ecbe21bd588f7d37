#pragma once

// Modular, Luxemburg norm and L^2 pairing on weighted variable Lebesgue spaces.

#include <cmath>
#include <span>
#include <vector>

#include "lpvar/error.hpp"
#include "lpvar/exponent.hpp"
#include "lpvar/grid.hpp"

namespace lpvar {

/// h * sum |f_i|^{p_i} w_i
inline double modular(const GridFunction& f, const VariableExponent& p, const Weight& w)
{
    require_same_grid(f.grid(), p.grid(), "modular");
    require_same_grid(f.grid(), w.grid(), "modular");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = std::abs(f[i]);
        if (a != 0.0)
            sum += std::pow(a, p[i]) * w[i];
    }
    const double value = f.grid().step() * sum;
    if (!std::isfinite(value))
        throw RangeError("modular overflows the double range");
    return value;
}

inline double pairing(const GridFunction& f, const GridFunction& g)
{
    require_same_grid(f.grid(), g.grid(), "pairing");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        sum += f[i] * g[i];
    return f.grid().step() * sum;
}

inline double l2_norm(const GridFunction& f) { return std::sqrt(pairing(f, f)); }

struct LuxemburgOptions {
    double abs_tolerance = 1e-10;
    /// Bisection also stops once the bracket is this tight relative to lambda.
    double rel_tolerance = 1e-14;
    int max_doublings = 200;
    int max_bisections = 400;
};

namespace detail {

/// Terms of lambda -> sum_i exp(p_i (log|f_i| - log lambda) + log(h w_i)) over the
/// nonzero cells. The modular of f/lambda is decreasing in lambda.
class ScaledModular {
public:
    void add(double abs_f, double p, double hw)
    {
        log_f_.push_back(std::log(abs_f));
        p_.push_back(p);
        log_hw_.push_back(std::log(hw));
    }
    bool empty() const noexcept { return p_.empty(); }

    double operator()(double lambda) const noexcept
    {
        const double ll = std::log(lambda);
        double s = 0.0;
        for (std::size_t i = 0; i < p_.size(); ++i)
            s += std::exp(p_[i] * (log_f_[i] - ll) + log_hw_[i]);
        return s;
    }

    /// inf { lambda > 0 : value(lambda) <= 1 } by geometric bracketing from 1 and bisection.
    double solve(const LuxemburgOptions& opt) const
    {
        if (empty())
            return 0.0;
        double lo = 1.0;
        double hi = 1.0;
        if ((*this)(1.0) > 1.0) {
            int k = 0;
            while ((*this)(hi) > 1.0) {
                lo = hi;
                hi *= 2.0;
                if (++k > opt.max_doublings)
                    throw RangeError("Luxemburg norm bracket not found after doubling");
            }
        } else {
            int k = 0;
            while ((*this)(lo) <= 1.0) {
                hi = lo;
                lo *= 0.5;
                if (++k > opt.max_doublings)
                    throw RangeError("Luxemburg norm bracket not found after halving");
            }
        }
        // invariant: value(lo) > 1 >= value(hi)
        for (int it = 0; it < opt.max_bisections; ++it) {
            const double width = hi - lo;
            if (width <= opt.abs_tolerance && width <= opt.rel_tolerance * hi)
                break;
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            if ((*this)(mid) > 1.0)
                lo = mid;
            else
                hi = mid;
        }
        return hi;
    }

private:
    std::vector<double> log_f_;
    std::vector<double> p_;
    std::vector<double> log_hw_;
};

}  // namespace detail

/// inf { lambda > 0 : modular(f / lambda) <= 1 }.
inline double luxemburg_norm(const GridFunction& f, const VariableExponent& p, const Weight& w,
                             const LuxemburgOptions& opt = {})
{
    require_same_grid(f.grid(), p.grid(), "luxemburg_norm");
    require_same_grid(f.grid(), w.grid(), "luxemburg_norm");
    detail::ScaledModular m;
    const double h = f.grid().step();
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] != 0.0)
            m.add(std::abs(f[i]), p[i], h * w[i]);
    return m.solve(opt);
}

/// Norm of the indicator of cells [range.first, range.end()).
inline double indicator_norm(const VariableExponent& p, const Weight& w, CellRange range,
                             const LuxemburgOptions& opt = {})
{
    detail::ScaledModular m;
    const double h = p.grid().step();
    for (std::size_t i = range.first; i < range.end(); ++i)
        m.add(1.0, p[i], h * w[i]);
    return m.solve(opt);
}

/// |<f, g>| against ||f||_{L^{p(.)}(w)} ||g||_{L^{p'(.)}(sigma)}.
struct HolderCheck {
    double pairing = 0.0;
    double norm_f = 0.0;
    double norm_g = 0.0;

    double product() const noexcept { return norm_f * norm_g; }
    /// |<f, g>| / (||f|| ||g||), 0 when either side vanishes.
    double ratio() const noexcept
    {
        const double den = product();
        return den > 0.0 ? std::abs(pairing) / den : 0.0;
    }
};

inline HolderCheck holder_check(const GridFunction& f, const GridFunction& g,
                                const VariableExponent& p, const Weight& w)
{
    const auto pc = conjugate_exponent(p);
    const auto sigma = dual_weight(p, w);
    return {pairing(f, g), luxemburg_norm(f, p, w), luxemburg_norm(g, pc, sigma)};
}

}  // namespace lpvar
