#pragma once

// Local Calderón-Zygmund kernels: evaluation, application on the grid and an
// empirical scan of the size and Hörmander conditions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "lpvar/error.hpp"
#include "lpvar/exponent.hpp"
#include "lpvar/grid.hpp"
#include "lpvar/random.hpp"
#include "lpvar/smooth.hpp"
#include "lpvar/wavelets.hpp"

namespace lpvar {

struct LocalCZKernel {
    std::string name;
    std::function<double(double, double)> eval;
    /// supp K within {|x - y| <= gamma}.
    int gamma = 1;
    double d1 = 0.0;
    double d2 = 0.0;
    /// Not integrable on the diagonal; the diagonal cell gets the odd correction.
    bool singular = false;
    /// K(x, y) = profile(x - y) when set.
    std::function<double(double)> profile;

    double operator()(double x, double y) const { return eval(x, y); }
};

/// Even C^infinity cutoff: 1 on |t| <= gamma/2, 0 on |t| >= gamma.
inline double hilbert_cutoff(double t, double gamma)
{
    const double half = 0.5 * gamma;
    return 1.0 - smooth_step((std::abs(t) - half) / half);
}

/// K(x, y) = rho(x - y) / (x - y).
inline LocalCZKernel truncated_hilbert(int gamma = 1)
{
    if (gamma < 1)
        throw ConfigError("kernel support radius must be a positive integer");
    const double g = gamma;
    auto k = [g](double t) { return t == 0.0 ? 0.0 : hilbert_cutoff(t, g) / t; };
    LocalCZKernel K;
    K.name = "hilbert-cut:" + std::to_string(gamma);
    K.profile = k;
    K.eval = [k](double x, double y) { return k(x - y); };
    K.gamma = gamma;
    K.d1 = 1.0;
    K.d2 = 32.0;
    K.singular = true;
    return K;
}

/// K(x, y) = sum_k psi_{j,k}(x) psi_{j,k}(y).
inline LocalCZKernel wavelet_projection_kernel(std::shared_ptr<const WaveletSystem> sys, int level)
{
    if (!sys)
        throw ConfigError("wavelet projection kernel needs a wavelet system");
    const int len = sys->support_length();
    const double span = std::ldexp(static_cast<double>(len), -level);
    LocalCZKernel K;
    K.name = "wavelet-proj:" + std::to_string(level);
    K.gamma = static_cast<int>(std::ceil(span - 1e-12));
    const double scale = std::ldexp(1.0, level);
    K.eval = [sys, level, len, scale](double x, double y) {
        const double u = std::ldexp(x, level);
        const double v = std::ldexp(y, level);
        const auto k_hi = static_cast<std::int64_t>(std::floor(std::min(u, v)));
        const auto k_lo = static_cast<std::int64_t>(std::floor(std::max(u, v))) - len + 1;
        double s = 0.0;
        for (std::int64_t k = k_lo; k <= k_hi; ++k) {
            const double kk = static_cast<double>(k);
            s += sys->psi(u - kk) * sys->psi(v - kk);
        }
        return scale * s;
    };

    double psi_max = 0.0;
    double psi_lip = 0.0;
    const auto ps = sys->psi_samples();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        psi_max = std::max(psi_max, std::abs(ps[i]));
        if (i + 1 < ps.size())
            psi_lip = std::max(psi_lip, std::abs(ps[i + 1] - ps[i]) / sys->cascade_step());
    }
    // at most len translates overlap a point; each term is bounded by
    // 2^j max|psi|^2 and is 2^{2j} max|psi| Lip(psi)-Lipschitz in each variable
    K.d1 = static_cast<double>(K.gamma) * len * scale * psi_max * psi_max;
    K.d2 = 2.0 * K.gamma * K.gamma * len * scale * scale * psi_max * psi_lip;
    K.singular = false;
    return K;
}

namespace detail {

/// Runs fn(begin, end) over disjoint chunks of [0, n) on worker threads.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn)
{
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, std::max<std::size_t>(1, n / 256));
    if (workers <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t b = 0; b < n; b += chunk)
        pool.emplace_back([&fn, b, e = std::min(n, b + chunk)] { fn(b, e); });
    for (auto& t : pool)
        t.join();
}

}  // namespace detail

/// Tf(x_i) = h sum_{j != i} K(x_i, x_j) f_j plus a diagonal term. Singular
/// kernels get h/2 [(h/4) K(x, x + h/4) - (h/4) K(x, x - h/4)] f'(x_i) with a
/// central difference for f' (f = 0 outside the domain); others get h K(x, x) f_i.
inline GridFunction apply_local_cz(const LocalCZKernel& K, const GridFunction& f)
{
    const Grid& g = f.grid();
    if (K.gamma < 1 || K.gamma > 2 * g.half_width())
        throw DomainError("kernel support radius " + std::to_string(K.gamma) +
                          " exceeds the domain length " + std::to_string(2 * g.half_width()));
    const std::size_t n = g.size();
    const double h = g.step();
    const auto band = static_cast<std::ptrdiff_t>(K.gamma) * static_cast<std::ptrdiff_t>(g.cells_per_unit());
    const auto v = f.values();
    std::vector<double> out(n, 0.0);

    std::vector<double> table;
    if (K.profile) {
        table.resize(2 * static_cast<std::size_t>(band) + 1);
        for (std::ptrdiff_t o = -band; o <= band; ++o)
            table[static_cast<std::size_t>(o + band)] = o == 0 ? 0.0 : K.profile(static_cast<double>(o) * h);
    }

    detail::parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const auto ii = static_cast<std::ptrdiff_t>(i);
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, ii - band);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, ii + band);
            const double x = g.point(i);
            double s = 0.0;
            for (std::ptrdiff_t j = lo; j <= hi; ++j) {
                if (j == ii)
                    continue;
                const double fj = v[static_cast<std::size_t>(j)];
                if (fj == 0.0)
                    continue;
                const double k = K.profile ? table[static_cast<std::size_t>(ii - j + band)]
                                           : K.eval(x, g.point(static_cast<std::size_t>(j)));
                s += k * fj;
            }
            double diag;
            if (K.singular) {
                const double q = 0.25 * h;
                const double odd = 0.5 * (q * K.eval(x, x + q) - q * K.eval(x, x - q));
                const double right = i + 1 < n ? v[i + 1] : 0.0;
                const double left = i > 0 ? v[i - 1] : 0.0;
                diag = odd * (right - left) / (2.0 * h);
            } else {
                diag = K.eval(x, x) * v[i];
            }
            out[i] = h * (s + diag);
        }
    });
    return GridFunction(g, std::move(out));
}

struct KernelReport {
    std::string name;
    std::size_t samples = 0;
    double size_max = 0.0;
    double hormander_max = 0.0;
    std::size_t support_violations = 0;
    double claimed_d1 = 0.0;
    double claimed_d2 = 0.0;

    // claims are met up to rounding in the evaluation of K
    bool size_ok() const noexcept { return std::isfinite(size_max) && size_max <= claimed_d1 * (1 + 1e-12); }
    bool support_ok() const noexcept { return support_violations == 0; }
    bool hormander_ok() const noexcept
    {
        return std::isfinite(hormander_max) && hormander_max <= claimed_d2 * (1 + 1e-12);
    }
    bool passed() const noexcept { return size_ok() && support_ok() && hormander_ok(); }
};

inline constexpr std::size_t kMinKernelSamples = 10000;

/// Random scan of |K(x,y)| |x-y| (with support check up to 4 gamma) and of
///   (|K(x,z) - K(y,z)| + |K(z,x) - K(z,y)|) |x-z|^2 / |x-y|,  0 < 2|x-y| < |x-z|.
/// Half of the Hörmander samples put z near integer and half-integer distances
/// from x, where cutoffs usually sit.
inline KernelReport verify_kernel_conditions(const LocalCZKernel& K, std::size_t budget,
                                             std::uint64_t seed = 1)
{
    if (budget < kMinKernelSamples)
        throw ConfigError("kernel scan needs at least " + std::to_string(kMinKernelSamples) +
                          " samples");
    Rng rng(seed);

    const double gamma = K.gamma;
    const double box = 2.0 * gamma + 2.0;
    const double dmin = 1e-5;
    KernelReport rep;
    rep.name = K.name;
    rep.claimed_d1 = K.d1;
    rep.claimed_d2 = K.d2;

    const std::size_t half = budget / 2;
    for (std::size_t s = 0; s < half; ++s) {
        const double x = box * (2.0 * rng.uniform() - 1.0);
        const double y = x + rng.sign() * rng.log_uniform(dmin, 4.0 * gamma);
        // realized distance, so rounding of x + t does not show up as a size excess
        const double t = std::abs(y - x);
        const double k = K(x, y);
        if (!std::isfinite(k)) {
            rep.size_max = std::numeric_limits<double>::infinity();
            continue;
        }
        if (t > gamma * (1.0 + 1e-9)) {
            if (std::abs(k) > 1e-14)
                ++rep.support_violations;
        } else {
            rep.size_max = std::max(rep.size_max, std::abs(k) * t);
        }
        ++rep.samples;
    }
    for (std::size_t s = half; s < budget; ++s) {
        const double x = box * (2.0 * rng.uniform() - 1.0);
        double dist;
        double d;
        if (s % 2 == 0) {
            dist = rng.log_uniform(2.0 * dmin * 1.0001, 4.0 * gamma);
            d = rng.log_uniform(dmin, 0.5 * dist / 1.0001);
        } else {
            const auto slots = 8 * static_cast<std::uint64_t>(K.gamma);
            const double ridge = 0.5 * static_cast<double>(1 + rng.index(slots));
            d = rng.log_uniform(dmin, std::min(0.1, 0.25 * ridge));
            dist = ridge + (rng.uniform() - 0.5) * d;
        }
        const double z = x + rng.sign() * dist;
        const double y = x + rng.sign() * d;
        const double diff = std::abs(K(x, z) - K(y, z)) + std::abs(K(z, x) - K(z, y));
        const double ratio = diff * (z - x) * (z - x) / std::abs(y - x);
        rep.hormander_max = std::isfinite(ratio) ? std::max(rep.hormander_max, ratio)
                                                 : std::numeric_limits<double>::infinity();
        ++rep.samples;
    }
    return rep;
}

/// "hilbert-cut:gamma" or "wavelet-proj:j" (needs the wavelet system).
inline LocalCZKernel make_kernel(std::string_view text, std::shared_ptr<const WaveletSystem> sys = {})
{
    const auto parts = detail::split(text, ':');
    if (parts.size() == 2 && parts[0] == "hilbert-cut") {
        const double g = detail::parse_number(parts[1], text);
        if (g != std::floor(g) || g < 1)
            throw ConfigError("kernel support radius must be a positive integer");
        return truncated_hilbert(static_cast<int>(g));
    }
    if (parts.size() == 2 && parts[0] == "wavelet-proj") {
        const double j = detail::parse_number(parts[1], text);
        if (j != std::floor(j))
            throw ConfigError("projection level must be an integer");
        return wavelet_projection_kernel(std::move(sys), static_cast<int>(j));
    }
    throw ConfigError("unknown kernel descriptor '" + std::string(text) + "'");
}

}  // namespace lpvar
