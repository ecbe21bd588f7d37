#pragma once

// Uniform midpoint grids on [-L, L], grid functions and dyadic intervals.
//
// Every function in the library is represented by its values at the cell
// midpoints of a grid with step h = 2^-r. Anything outside [-L, L] is zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lpvar/error.hpp"

namespace lpvar {

inline constexpr int kMaxResolution = 16;
inline constexpr std::size_t kMaxCells = std::size_t{1} << 28;

class Grid {
public:
    Grid(int half_width, int resolution) : half_width_(half_width), resolution_(resolution)
    {
        if (half_width < 1)
            throw ConfigError("grid half width must be a positive integer, got " +
                              std::to_string(half_width));
        if (resolution < 1 || resolution > kMaxResolution)
            throw ConfigError("grid resolution must lie in [1, " + std::to_string(kMaxResolution) +
                              "], got " + std::to_string(resolution));
        const auto per_unit = std::uint64_t{1} << resolution;
        const auto cells = 2 * static_cast<std::uint64_t>(half_width) * per_unit;
        if (cells > kMaxCells)
            throw ConfigError("grid with L=" + std::to_string(half_width) +
                              " r=" + std::to_string(resolution) + " exceeds the cell limit");
        size_ = static_cast<std::size_t>(cells);
        step_ = std::ldexp(1.0, -resolution);
    }

    int half_width() const noexcept { return half_width_; }
    int resolution() const noexcept { return resolution_; }
    double step() const noexcept { return step_; }
    std::size_t size() const noexcept { return size_; }
    /// Cells per unit length.
    std::size_t cells_per_unit() const noexcept { return std::size_t{1} << resolution_; }

    double left() const noexcept { return -static_cast<double>(half_width_); }
    double right() const noexcept { return static_cast<double>(half_width_); }

    /// Midpoint of cell i.
    double point(std::size_t i) const noexcept
    {
        return left() + (static_cast<double>(i) + 0.5) * step_;
    }

    /// Cell containing x (half-open cells [a, a+h)); clamped to the domain.
    std::size_t cell_of(double x) const noexcept
    {
        const double u = std::floor((x - left()) / step_);
        if (u <= 0.0)
            return 0;
        return std::min(static_cast<std::size_t>(u), size_ - 1);
    }

    /// Index of the cell whose left edge is x; x must be a multiple of h.
    std::ptrdiff_t edge_index(double x) const noexcept
    {
        return static_cast<std::ptrdiff_t>(std::llround((x - left()) / step_));
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int half_width_;
    int resolution_;
    std::size_t size_{};
    double step_{};
};

inline Grid make_grid(int half_width, int resolution) { return Grid(half_width, resolution); }

inline void require_same_grid(const Grid& a, const Grid& b, const char* what)
{
    if (!(a == b))
        throw DomainError(std::string(what) + ": operands live on different grids");
}

/// Real-valued samples at the cell midpoints of a grid. All samples finite.
class GridFunction {
public:
    explicit GridFunction(const Grid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

    GridFunction(const Grid& grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values))
    {
        if (values_.size() != grid_.size())
            throw DomainError("grid function has " + std::to_string(values_.size()) +
                              " samples, grid has " + std::to_string(grid_.size()));
        for (double v : values_)
            if (!std::isfinite(v))
                throw RangeError("grid function sample is not finite");
    }

    template <class F>
    static GridFunction sample(const Grid& grid, F&& f)
    {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = f(grid.point(i));
        return GridFunction(grid, std::move(v));
    }

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    /// Value on the cell containing x; zero outside the domain.
    double at(double x) const noexcept
    {
        if (x < grid_.left() || x >= grid_.right())
            return 0.0;
        return values_[grid_.cell_of(x)];
    }

    bool is_zero() const noexcept
    {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
    }
    double sup_abs() const noexcept
    {
        double m = 0.0;
        for (double v : values_)
            m = std::max(m, std::abs(v));
        return m;
    }

    template <class F>
    GridFunction map(F&& f) const
    {
        std::vector<double> v(values_.size());
        std::transform(values_.begin(), values_.end(), v.begin(), f);
        return GridFunction(grid_, std::move(v));
    }
    GridFunction abs() const
    {
        return map([](double v) { return std::abs(v); });
    }

    friend GridFunction operator+(const GridFunction& a, const GridFunction& b)
    {
        require_same_grid(a.grid_, b.grid_, "operator+");
        std::vector<double> v(a.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = a.values_[i] + b.values_[i];
        return GridFunction(a.grid_, std::move(v));
    }
    friend GridFunction operator-(const GridFunction& a, const GridFunction& b)
    {
        require_same_grid(a.grid_, b.grid_, "operator-");
        std::vector<double> v(a.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = a.values_[i] - b.values_[i];
        return GridFunction(a.grid_, std::move(v));
    }
    friend GridFunction operator*(double s, const GridFunction& a)
    {
        return a.map([s](double v) { return s * v; });
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Contiguous run of cells [first, first + count).
struct CellRange {
    std::size_t first = 0;
    std::size_t count = 0;

    std::size_t end() const noexcept { return first + count; }
    bool contains(std::size_t i) const noexcept { return i >= first && i < end(); }
    friend bool operator==(const CellRange&, const CellRange&) = default;
};

/// Q_{j,k} = [2^-j k, 2^-j (k+1)].
struct DyadicCube {
    int level = 0;
    std::int64_t index = 0;

    double side() const noexcept { return std::ldexp(1.0, -level); }
    double left() const noexcept { return std::ldexp(static_cast<double>(index), -level); }
    double right() const noexcept { return std::ldexp(static_cast<double>(index + 1), -level); }
    double center() const noexcept { return 0.5 * (left() + right()); }
    double volume() const noexcept { return side(); }

    DyadicCube parent() const noexcept
    {
        // arithmetic shift floors negative indices
        return {level - 1, index >> 1};
    }
    DyadicCube child(int which) const noexcept { return {level + 1, 2 * index + which}; }
    bool contains(const DyadicCube& other) const noexcept
    {
        if (other.level < level)
            return false;
        const int shift = other.level - level;
        return (other.index >> shift) == index;
    }

    bool inside(const Grid& g) const noexcept { return left() >= g.left() && right() <= g.right(); }

    /// Cells covered by the cube; requires level <= r and the cube inside the domain.
    CellRange cells(const Grid& g) const
    {
        if (level > g.resolution())
            throw ResolutionError("dyadic cube at level " + std::to_string(level) +
                                  " is finer than the grid (r=" + std::to_string(g.resolution()) +
                                  ")");
        if (!inside(g))
            throw DomainError("dyadic cube lies outside the grid domain");
        const auto first = static_cast<std::size_t>(g.edge_index(left()));
        const auto count = std::size_t{1} << (g.resolution() - level);
        return {first, count};
    }

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
    friend auto operator<=>(const DyadicCube&, const DyadicCube&) = default;
};

/// Midpoint rule h * sum f_i.
inline double integrate(const GridFunction& f) noexcept
{
    const auto v = f.values();
    return f.grid().step() * std::accumulate(v.begin(), v.end(), 0.0);
}

/// All cubes of level j contained in [-L, L], in index order.
inline std::vector<DyadicCube> dyadic_cubes(int level, const Grid& grid)
{
    if (level > grid.resolution())
        throw ResolutionError("dyadic level " + std::to_string(level) +
                              " exceeds grid resolution " + std::to_string(grid.resolution()));
    if (std::ldexp(1.0, -level) > 2.0 * grid.half_width())
        throw DomainError("dyadic level " + std::to_string(level) + " is coarser than the domain");
    std::vector<DyadicCube> out;
    const double side = std::ldexp(1.0, -level);
    const auto first = static_cast<std::int64_t>(std::ceil(grid.left() / side));
    const auto last = static_cast<std::int64_t>(std::floor(grid.right() / side)) - 1;
    for (std::int64_t k = first; k <= last; ++k)
        out.push_back({level, k});
    return out;
}

/// Indicator of [a, b) sampled at midpoints.
inline GridFunction indicator(const Grid& grid, double a, double b)
{
    return GridFunction::sample(grid, [a, b](double x) { return (x >= a && x < b) ? 1.0 : 0.0; });
}

}  // namespace lpvar
