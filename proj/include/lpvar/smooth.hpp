#pragma once

#include <cmath>

namespace lpvar {

/// C^infinity transition: 0 for t <= 0, 1 for t >= 1, symmetric about 1/2.
inline double smooth_step(double t) noexcept
{
    if (t <= 0.0)
        return 0.0;
    if (t >= 1.0)
        return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

/// Standard bump exp(1 - 1/(1 - u^2)) on |u| < 1, peak value 1 at u = 0.
inline double smooth_bump(double u) noexcept
{
    if (std::abs(u) >= 1.0)
        return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

}  // namespace lpvar
