#pragma once

// Variable exponents p(.), weights w, dual weights and log-Hölder diagnostics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lpvar/error.hpp"
#include "lpvar/grid.hpp"
#include "lpvar/smooth.hpp"

namespace lpvar {

struct ConstantExponent {
    double value = 2.0;
};

/// p1 for x <= x0 - delta/2, p2 for x >= x0 + delta/2, C^infinity in between.
struct SmoothStepExponent {
    double p1 = 2.0;
    double p2 = 3.0;
    double x0 = 0.0;
    double delta = 1.0;
};

/// Piecewise-linear through the knots, constant beyond the first/last knot.
struct TableExponent {
    std::vector<double> x;
    std::vector<double> p;
};

using ExponentSpec = std::variant<ConstantExponent, SmoothStepExponent, TableExponent>;

class VariableExponent {
public:
    explicit VariableExponent(GridFunction values, std::optional<double> p_infinity = std::nullopt)
        : values_(std::move(values)), p_infinity_(p_infinity)
    {
        const auto v = values_.values();
        p_minus_ = std::numeric_limits<double>::infinity();
        p_plus_ = -std::numeric_limits<double>::infinity();
        bool constant = true;
        for (double p : v) {
            if (p < 1.0)
                throw ConfigError("variable exponent takes the value " + std::to_string(p) +
                                  " < 1");
            p_minus_ = std::min(p_minus_, p);
            p_plus_ = std::max(p_plus_, p);
            constant = constant && p == v.front();
        }
        constant_ = constant;
    }

    const Grid& grid() const noexcept { return values_.grid(); }
    const GridFunction& values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double p_minus() const noexcept { return p_minus_; }
    double p_plus() const noexcept { return p_plus_; }
    bool is_constant() const noexcept { return constant_; }
    /// 1 < p_- <= p_+ < infinity.
    bool in_class_p() const noexcept { return p_minus_ > 1.0 && std::isfinite(p_plus_); }

    bool has_explicit_p_infinity() const noexcept { return p_infinity_.has_value(); }
    /// Explicit limit if one was supplied, else the sample at the largest |x|.
    double p_infinity() const noexcept
    {
        return p_infinity_ ? *p_infinity_ : values_.values().back();
    }

private:
    GridFunction values_;
    std::optional<double> p_infinity_;
    double p_minus_{};
    double p_plus_{};
    bool constant_{};
};

class Weight {
public:
    explicit Weight(GridFunction values) : values_(std::move(values))
    {
        for (double w : values_.values())
            if (!(w > 0.0))
                throw DomainError("weight must be strictly positive on the grid");
    }

    template <class F>
    static Weight sample(const Grid& grid, F&& f)
    {
        return Weight(GridFunction::sample(grid, std::forward<F>(f)));
    }

    const Grid& grid() const noexcept { return values_.grid(); }
    const GridFunction& values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

private:
    GridFunction values_;
};

struct UnitWeight {};
/// w(x) = exp(alpha |x|)
struct ExpWeight {
    double alpha = 1.0;
};
/// w(x) = (1 + |x|)^A
struct PowerWeight {
    double exponent = 1.0;
};
using WeightSpec = std::variant<UnitWeight, ExpWeight, PowerWeight>;

inline double evaluate(const ExponentSpec& spec, double x)
{
    return std::visit(
        [x](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantExponent>) {
                return s.value;
            } else if constexpr (std::is_same_v<T, SmoothStepExponent>) {
                return s.p1 + (s.p2 - s.p1) * smooth_step((x - s.x0) / s.delta + 0.5);
            } else {
                if (s.x.empty() || s.x.size() != s.p.size())
                    throw ConfigError("exponent table needs matching non-empty knot lists");
                if (x <= s.x.front())
                    return s.p.front();
                if (x >= s.x.back())
                    return s.p.back();
                const auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
                const auto i = static_cast<std::size_t>(it - s.x.begin());
                const double t = (x - s.x[i - 1]) / (s.x[i] - s.x[i - 1]);
                return s.p[i - 1] + t * (s.p[i] - s.p[i - 1]);
            }
        },
        spec);
}

inline VariableExponent make_exponent(const ExponentSpec& spec, const Grid& grid,
                                      std::optional<double> p_infinity = std::nullopt)
{
    if (const auto* s = std::get_if<SmoothStepExponent>(&spec); s && !(s->delta > 0.0))
        throw ConfigError("smooth-step exponent needs a positive transition width");
    if (const auto* t = std::get_if<TableExponent>(&spec)) {
        if (t->x.empty() || t->x.size() != t->p.size())
            throw ConfigError("exponent table needs matching non-empty knot lists");
        if (!std::is_sorted(t->x.begin(), t->x.end()))
            throw ConfigError("exponent table knots must be increasing");
    }
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = evaluate(spec, grid.point(i));
        if (!std::isfinite(v[i]))
            throw ConfigError("exponent is not finite (p_+ must be finite)");
    }
    return VariableExponent(GridFunction(grid, std::move(v)), p_infinity);
}

inline double evaluate(const WeightSpec& spec, double x)
{
    return std::visit(
        [x](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, UnitWeight>)
                return 1.0;
            else if constexpr (std::is_same_v<T, ExpWeight>)
                return std::exp(s.alpha * std::abs(x));
            else
                return std::pow(1.0 + std::abs(x), s.exponent);
        },
        spec);
}

inline Weight make_weight(const WeightSpec& spec, const Grid& grid)
{
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = evaluate(spec, grid.point(i));
        if (!std::isfinite(v[i]) || v[i] <= 0.0)
            throw RangeError("weight leaves the representable range at x = " +
                             std::to_string(grid.point(i)));
    }
    return Weight(GridFunction(grid, std::move(v)));
}

inline VariableExponent conjugate_exponent(const VariableExponent& p)
{
    if (!(p.p_minus() > 1.0))
        throw DomainError("conjugate exponent needs p_- > 1");
    auto conj = p.values().map([](double q) { return q / (q - 1.0); });
    std::optional<double> pinf;
    if (p.has_explicit_p_infinity() && p.p_infinity() > 1.0)
        pinf = p.p_infinity() / (p.p_infinity() - 1.0);
    return VariableExponent(std::move(conj), pinf);
}

/// sigma = w^{-1/(p-1)}.
inline Weight dual_weight(const VariableExponent& p, const Weight& w)
{
    require_same_grid(p.grid(), w.grid(), "dual_weight");
    if (!(p.p_minus() > 1.0))
        throw DomainError("dual weight needs p_- > 1");
    std::vector<double> v(w.grid().size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::exp(-std::log(w[i]) / (p[i] - 1.0));
        if (!std::isfinite(v[i]) || v[i] <= 0.0)
            throw RangeError("dual weight w^{-1/(p-1)} is not representable at x = " +
                             std::to_string(w.grid().point(i)));
    }
    return Weight(GridFunction(w.grid(), std::move(v)));
}

struct LogHolderReport {
    double c0 = 0.0;
    double c_inf = 0.0;
    double p_infinity_used = 0.0;
};

/// Empirical constants of the local and at-infinity log-Hölder conditions,
/// as suprema over all sampled pairs with 0 < |x-y| <= 1/2 and all samples.
inline LogHolderReport log_holder_constants(const VariableExponent& p,
                                            std::optional<double> p_infinity = std::nullopt)
{
    const Grid& g = p.grid();
    if (g.step() > 0.25)
        throw ResolutionError("log-Hölder scan needs h <= 1/4");
    LogHolderReport rep;
    rep.p_infinity_used = p_infinity ? *p_infinity : p.p_infinity();
    const auto v = p.values().values();
    const std::size_t n = v.size();
    const std::size_t max_offset = std::min(n - 1, g.cells_per_unit() / 2);
    for (std::size_t o = 1; o <= max_offset; ++o) {
        double jump = 0.0;
        for (std::size_t i = 0; i + o < n; ++i)
            jump = std::max(jump, std::abs(v[i + o] - v[i]));
        rep.c0 = std::max(rep.c0, jump * -std::log(static_cast<double>(o) * g.step()));
    }
    for (std::size_t i = 0; i < n; ++i)
        rep.c_inf = std::max(rep.c_inf, std::abs(v[i] - rep.p_infinity_used) *
                                            std::log(std::exp(1.0) + std::abs(g.point(i))));
    return rep;
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

inline double parse_number(std::string_view s, std::string_view context)
{
    try {
        std::size_t used = 0;
        const std::string str(s);
        const double v = std::stod(str, &used);
        if (used != str.size())
            throw ConfigError("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number '" + std::string(s) + "' in '" +
                          std::string(context) + "'");
    }
}

}  // namespace detail

/// "const:c" or "step:p1:p2:x0:delta".
inline ExponentSpec parse_exponent_spec(std::string_view text)
{
    const auto parts = detail::split(text, ':');
    if (parts[0] == "const" && parts.size() == 2)
        return ConstantExponent{detail::parse_number(parts[1], text)};
    if (parts[0] == "step" && parts.size() == 5)
        return SmoothStepExponent{detail::parse_number(parts[1], text),
                                  detail::parse_number(parts[2], text),
                                  detail::parse_number(parts[3], text),
                                  detail::parse_number(parts[4], text)};
    throw ConfigError("unknown exponent descriptor '" + std::string(text) + "'");
}

/// "one", "exp:alpha" or "pow:A".
inline WeightSpec parse_weight_spec(std::string_view text)
{
    const auto parts = detail::split(text, ':');
    if (parts[0] == "one" && parts.size() == 1)
        return UnitWeight{};
    if (parts[0] == "exp" && parts.size() == 2)
        return ExpWeight{detail::parse_number(parts[1], text)};
    if (parts[0] == "pow" && parts.size() == 2)
        return PowerWeight{detail::parse_number(parts[1], text)};
    throw ConfigError("unknown weight descriptor '" + std::string(text) + "'");
}

}  // namespace lpvar
