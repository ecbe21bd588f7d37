#pragma once

// Desk-scale experiments: configuration, CSV/JSON reports and the runners
// behind the command-line subcommands.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lpvar/catalog.hpp"
#include "lpvar/error.hpp"
#include "lpvar/exponent.hpp"
#include "lpvar/grid.hpp"
#include "lpvar/kernels.hpp"
#include "lpvar/muckenhoupt.hpp"
#include "lpvar/norms.hpp"
#include "lpvar/operators.hpp"
#include "lpvar/random.hpp"
#include "lpvar/wavelets.hpp"

namespace lpvar {

struct ExperimentConfig {
    int L = 4;
    int r = 10;
    std::string p = "step:2:3:0:1";
    std::string w = "exp:1";
    int N = 3;
    int J = 0;
    std::optional<int> j_max;
    std::optional<int> r_c;
    std::uint64_t seed = 1;
    std::size_t corpus_size = 20;
    std::string out = "lpvar-out";
    /// Support margin handed to analyze (x-units).
    double margin = 0.5;
    /// Also rerun at r + 1 and compare bands.
    bool refine = true;
    double refine_tolerance = 0.25;
    double band_limit = 100.0;

    int j_star = 0;
    double bump_amplitude = 1.0;
    std::vector<double> scales{1.0, 4.0, 16.0, 64.0, 256.0};
    double slope_tolerance = 0.3;
    double growth_target = 1e3;
    double control_tolerance = 0.01;

    std::vector<int> maximal_L{4, 6, 8};
    std::vector<std::string> maximal_weights{"exp:1", "pow:3"};
    double loc_spread_limit = 3.0;
    double loc_stability = 0.10;
    double full_growth = 2.0;

    std::size_t family_size = 8;
    std::size_t trials = 20;

    std::string kernel = "hilbert-cut:1";
    std::size_t kernel_samples = 100000;
    std::size_t cz_functions = 10;
    std::size_t cz_pairs = 50;

    std::string f = "bump:0:1";

    int resolved_j_max() const { return j_max.value_or(std::max(J, r - 6)); }
    int resolved_r_c() const { return r_c.value_or(std::max(12, r - J + 1)); }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c)
{
    j = {{"L", c.L},
         {"r", c.r},
         {"p", c.p},
         {"w", c.w},
         {"N", c.N},
         {"J", c.J},
         {"j_max", c.resolved_j_max()},
         {"r_c", c.resolved_r_c()},
         {"seed", c.seed},
         {"corpus_size", c.corpus_size},
         {"out", c.out},
         {"margin", c.margin},
         {"refine", c.refine},
         {"refine_tolerance", c.refine_tolerance},
         {"band_limit", c.band_limit},
         {"j_star", c.j_star},
         {"bump_amplitude", c.bump_amplitude},
         {"scales", c.scales},
         {"slope_tolerance", c.slope_tolerance},
         {"growth_target", c.growth_target},
         {"control_tolerance", c.control_tolerance},
         {"maximal_L", c.maximal_L},
         {"maximal_weights", c.maximal_weights},
         {"loc_spread_limit", c.loc_spread_limit},
         {"loc_stability", c.loc_stability},
         {"full_growth", c.full_growth},
         {"family_size", c.family_size},
         {"trials", c.trials},
         {"kernel", c.kernel},
         {"kernel_samples", c.kernel_samples},
         {"cz_functions", c.cz_functions},
         {"cz_pairs", c.cz_pairs},
         {"f", c.f}};
}

/// Overrides the fields present in `j`; unknown keys are rejected.
inline void apply_json(ExperimentConfig& c, const nlohmann::json& j)
{
    if (!j.is_object())
        throw ConfigError("configuration must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "L") c.L = v.get<int>();
            else if (key == "r") c.r = v.get<int>();
            else if (key == "p") c.p = v.get<std::string>();
            else if (key == "w") c.w = v.get<std::string>();
            else if (key == "N") c.N = v.get<int>();
            else if (key == "J") c.J = v.get<int>();
            else if (key == "j_max") c.j_max = v.get<int>();
            else if (key == "r_c") c.r_c = v.get<int>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "corpus_size") c.corpus_size = v.get<std::size_t>();
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "margin") c.margin = v.get<double>();
            else if (key == "refine") c.refine = v.get<bool>();
            else if (key == "refine_tolerance") c.refine_tolerance = v.get<double>();
            else if (key == "band_limit") c.band_limit = v.get<double>();
            else if (key == "j_star") c.j_star = v.get<int>();
            else if (key == "bump_amplitude") c.bump_amplitude = v.get<double>();
            else if (key == "scales") c.scales = v.get<std::vector<double>>();
            else if (key == "slope_tolerance") c.slope_tolerance = v.get<double>();
            else if (key == "growth_target") c.growth_target = v.get<double>();
            else if (key == "control_tolerance") c.control_tolerance = v.get<double>();
            else if (key == "maximal_L") c.maximal_L = v.get<std::vector<int>>();
            else if (key == "maximal_weights") c.maximal_weights = v.get<std::vector<std::string>>();
            else if (key == "loc_spread_limit") c.loc_spread_limit = v.get<double>();
            else if (key == "loc_stability") c.loc_stability = v.get<double>();
            else if (key == "full_growth") c.full_growth = v.get<double>();
            else if (key == "family_size") c.family_size = v.get<std::size_t>();
            else if (key == "trials") c.trials = v.get<std::size_t>();
            else if (key == "kernel") c.kernel = v.get<std::string>();
            else if (key == "kernel_samples") c.kernel_samples = v.get<std::size_t>();
            else if (key == "cz_functions") c.cz_functions = v.get<std::size_t>();
            else if (key == "cz_pairs") c.cz_pairs = v.get<std::size_t>();
            else if (key == "f") c.f = v.get<std::string>();
            else throw ConfigError("unknown configuration key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad configuration value: ") + e.what());
    }
}

inline ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    ExperimentConfig c;
    apply_json(c, j);
    return c;
}

/// Catalog names must resolve and tolerances must be positive.
inline void validate(const ExperimentConfig& c)
{
    const Grid grid(c.L, c.r);
    parse_exponent_spec(c.p);
    parse_weight_spec(c.w);
    for (const auto& w : c.maximal_weights)
        parse_weight_spec(w);
    if (c.N < 1 || c.N > 4)
        throw ConfigError("wavelet order N must be in {1, 2, 3, 4}");
    if (c.resolved_j_max() < c.J)
        throw ConfigError("j_max must be >= J");
    if (c.corpus_size == 0 || c.trials == 0 || c.cz_functions == 0 || c.cz_pairs == 0)
        throw ConfigError("corpus sizes must be positive");
    if (c.family_size == 0 || c.family_size > 32)
        throw ConfigError("vector-valued family size must be in [1, 32]");
    for (double t : {c.refine_tolerance, c.band_limit, c.slope_tolerance, c.growth_target,
                     c.control_tolerance, c.loc_spread_limit, c.loc_stability, c.full_growth,
                     c.bump_amplitude})
        if (!(t > 0.0))
            throw ConfigError("tolerances and limits must be positive");
    if (!(c.margin >= 0.0))
        throw ConfigError("margin must be nonnegative");
    if (c.scales.size() < 2)
        throw ConfigError("modular-failure needs at least two scales");
    for (int l : c.maximal_L)
        if (l < 2)
            throw ConfigError("maximal comparison needs L >= 2");
}

/// Min/max of a set of ratios, counting the non-finite ones.
struct Band {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::size_t count = 0;
    std::size_t non_finite = 0;

    void add(double v)
    {
        ++count;
        if (!std::isfinite(v) || !(v > 0.0)) {
            ++non_finite;
            return;
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool finite() const noexcept { return count > 0 && non_finite == 0; }
    /// C / c.
    double spread() const noexcept { return finite() ? hi / lo : std::numeric_limits<double>::infinity(); }
};

inline void to_json(nlohmann::json& j, const Band& b)
{
    j = {{"c", b.finite() ? b.lo : std::numeric_limits<double>::quiet_NaN()},
         {"C", b.finite() ? b.hi : std::numeric_limits<double>::quiet_NaN()},
         {"C_over_c", b.finite() ? b.spread() : std::numeric_limits<double>::quiet_NaN()},
         {"count", b.count},
         {"non_finite", b.non_finite}};
}

/// Largest relative change of the band ends.
inline double band_change(const Band& a, const Band& b)
{
    if (!a.finite() || !b.finite())
        return std::numeric_limits<double>::infinity();
    return std::max(std::abs(b.lo / a.lo - 1.0), std::abs(b.hi / a.hi - 1.0));
}

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double limit = 0.0;
    std::string detail;
};

struct ExperimentReport {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    nlohmann::json bands = nlohmann::json::object();
    nlohmann::json diagnostics = nlohmann::json::object();
    std::vector<CheckResult> checks;

    void check(std::string check_name, bool ok, double value, double limit, std::string detail = {})
    {
        checks.push_back({std::move(check_name), ok, value, limit, std::move(detail)});
    }
    bool passed() const noexcept
    {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }
    const CheckResult* find(std::string_view check_name) const
    {
        for (const auto& c : checks)
            if (c.name == check_name)
                return &c;
        return nullptr;
    }
};

namespace detail {

inline std::string cell(double v) { return fmt_number(v); }
inline std::string cell(std::int64_t v) { return std::to_string(v); }
inline std::string cell(std::string s) { return s; }

template <class... T>
std::vector<std::string> row(T&&... v)
{
    return {cell(std::forward<T>(v))...};
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s)
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

inline std::shared_ptr<const WaveletSystem> wavelet_system(const ExperimentConfig& c)
{
    return std::make_shared<const WaveletSystem>(build_daubechies(c.N, c.resolved_r_c()));
}

inline nlohmann::json wavelet_json(const ExperimentConfig& c, const WaveletSystem& sys)
{
    return {{"N", c.N},
            {"J", c.J},
            {"j_max", c.resolved_j_max()},
            {"r_c", sys.cascade_resolution()},
            {"cascade_iterations", sys.cascade_iterations()},
            {"cascade_residual", sys.cascade_residual()}};
}

}  // namespace detail

inline std::string to_csv(const ExperimentReport& rep)
{
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i)
            os << (i ? "," : "") << detail::csv_field(r[i]);
        os << '\n';
    };
    line(rep.header);
    for (const auto& r : rep.rows)
        line(r);
    return os.str();
}

inline nlohmann::json summary_json(const ExperimentReport& rep, const ExperimentConfig& cfg)
{
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"value", c.value},
                          {"limit", c.limit},
                          {"detail", c.detail}});
    const Grid g(cfg.L, cfg.r);
    return {{"experiment", rep.name},
            {"config", cfg},
            {"grid", {{"L", g.half_width()}, {"r", g.resolution()}, {"h", g.step()}, {"cells", g.size()}}},
            {"bands", rep.bands},
            {"diagnostics", rep.diagnostics},
            {"checks", checks},
            {"passed", rep.passed()}};
}

/// Writes <out>/<name>.csv and <out>/<name>.json.
inline void write_report(const ExperimentReport& rep, const ExperimentConfig& cfg)
{
    namespace fs = std::filesystem;
    const fs::path dir(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::ofstream csv(dir / (rep.name + ".csv"), std::ios::binary);
    csv << to_csv(rep);
    std::ofstream js(dir / (rep.name + ".json"), std::ios::binary);
    js << summary_json(rep, cfg).dump(2) << '\n';
    if (!csv || !js)
        throw ConfigError("cannot write report files under " + dir.string());
}

// ---------------------------------------------------------------- equivalence

struct RatioRow {
    std::string id;
    std::string descriptor;
    double norm_f = 0.0;
    double norm_v = 0.0;
    double norm_w1 = 0.0;
    double norm_w2 = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double tail = 0.0;
    std::string error;
};

struct RatioReport {
    int L = 0;
    int r = 0;
    std::vector<RatioRow> rows;
    Band r1;
    Band r2;
};

/// (||Vf|| + ||W_i f||) / ||f|| in L^{p(.)}(w) over the equivalence corpus.
inline RatioReport equivalence_ratios(const ExperimentConfig& cfg, int L, int r, const WaveletSystem& sys)
{
    const Grid grid(L, r);
    const auto p = make_exponent(parse_exponent_spec(cfg.p), grid);
    const auto w = make_weight(parse_weight_spec(cfg.w), grid);
    const int top = cfg.resolved_j_max();
    RatioReport rep{L, r, {}, {}, {}};
    const auto corpus = equivalence_corpus(cfg.seed, cfg.corpus_size, cfg.J);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        RatioRow row;
        row.id = "f" + std::to_string(i);
        row.descriptor = corpus[i];
        try {
            const auto f = make_function(corpus[i], grid, &sys);
            const auto c = analyze(f, sys, cfg.J, top, AnalyzeOptions{cfg.margin});
            const auto sq = square_functions(c, sys, grid);
            row.norm_f = luxemburg_norm(f, p, w);
            row.norm_v = luxemburg_norm(sq.v, p, w);
            row.norm_w1 = luxemburg_norm(sq.w1, p, w);
            row.norm_w2 = luxemburg_norm(sq.w2, p, w);
            row.r1 = (row.norm_v + row.norm_w1) / row.norm_f;
            row.r2 = (row.norm_v + row.norm_w2) / row.norm_f;
            const double e = l2_norm(f);
            row.tail = e > 0.0 ? l2_norm(f - synthesize(c, sys, grid)) / e : 0.0;
        } catch (const Error& e) {
            row.error = e.what();
            row.r1 = row.r2 = detail::nan();
        }
        rep.r1.add(row.r1);
        rep.r2.add(row.r2);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

inline ExperimentReport run_equivalence(const ExperimentConfig& cfg)
{
    validate(cfg);
    const auto sys = detail::wavelet_system(cfg);
    ExperimentReport rep;
    rep.name = "equivalence";
    rep.header = {"L", "r", "id", "function", "norm_f", "norm_V", "norm_W1", "norm_W2", "r1", "r2",
                  "tail_l2", "error"};
    std::vector<RatioReport> runs{equivalence_ratios(cfg, cfg.L, cfg.r, *sys)};
    if (cfg.refine)
        runs.push_back(equivalence_ratios(cfg, cfg.L, cfg.r + 1, *sys));
    runs.push_back(equivalence_ratios(cfg, cfg.L + 2, cfg.r, *sys));
    for (const auto& run : runs)
        for (const auto& x : run.rows)
            rep.rows.push_back(detail::row(std::int64_t{run.L}, std::int64_t{run.r}, x.id, x.descriptor,
                                           x.norm_f, x.norm_v, x.norm_w1, x.norm_w2, x.r1, x.r2,
                                           x.tail, x.error));
    const auto& base = runs.front();
    rep.bands["r1"] = base.r1;
    rep.bands["r2"] = base.r2;
    rep.diagnostics["wavelet"] = detail::wavelet_json(cfg, *sys);
    double tail = 0.0;
    for (const auto& x : base.rows)
        tail = std::max(tail, std::isfinite(x.tail) ? x.tail : 0.0);
    rep.diagnostics["max_tail_l2"] = tail;
    const auto& wide = runs.back();
    rep.diagnostics["L_plus_2"] = {{"r1", wide.r1},
                                   {"r2", wide.r2},
                                   {"r1_change", band_change(base.r1, wide.r1)},
                                   {"r2_change", band_change(base.r2, wide.r2)}};

    rep.check("r1_finite", base.r1.finite(), static_cast<double>(base.r1.non_finite), 0.0);
    rep.check("r2_finite", base.r2.finite(), static_cast<double>(base.r2.non_finite), 0.0);
    rep.check("r1_band", base.r1.spread() <= cfg.band_limit, base.r1.spread(), cfg.band_limit);
    rep.check("r2_band", base.r2.spread() <= cfg.band_limit, base.r2.spread(), cfg.band_limit);
    if (cfg.refine) {
        const auto& fine = runs[1];
        rep.bands["r1_refined"] = fine.r1;
        rep.bands["r2_refined"] = fine.r2;
        const double c1 = band_change(base.r1, fine.r1);
        const double c2 = band_change(base.r2, fine.r2);
        rep.check("r1_refinement", c1 <= cfg.refine_tolerance, c1, cfg.refine_tolerance);
        rep.check("r2_refinement", c2 <= cfg.refine_tolerance, c2, cfg.refine_tolerance);
    }
    return rep;
}

// ----------------------------------------------------------- modular failure

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline ExperimentReport run_modular_failure(const ExperimentConfig& cfg)
{
    validate(cfg);
    const auto spec = parse_exponent_spec(cfg.p);
    const auto* step = std::get_if<SmoothStepExponent>(&spec);
    if (!step || !(step->p1 < step->p2))
        throw ConfigError("modular-failure needs a step exponent step:p1:p2:x0:delta with p1 < p2");
    const auto sys = detail::wavelet_system(cfg);
    const Grid grid(cfg.L, cfg.r);
    const auto p = make_exponent(spec, grid);
    const auto p_const = make_exponent(ConstantExponent{step->p1}, grid);
    const auto w = make_weight(parse_weight_spec(cfg.w), grid);

    // bump of radius 1/2 ending where the transition starts, so p = p1 on its support
    const double right = step->x0 - 0.5 * step->delta;
    const double centre = right - 0.5;
    if (centre - 0.5 <= grid.left())
        throw DomainError("setup: the low-exponent region leaves no room for the test bump");
    const auto g = cfg.bump_amplitude * make_function("bump:" + detail::fmt_number(centre) + ":0.5", grid);
    const auto pg = detail_projection(g, *sys, cfg.j_star);

    double high = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (p[i] >= step->p2)
            high = std::max(high, std::abs(pg[i]));
    if (!(high > 1e-8 * pg.sup_abs()))
        throw DomainError("setup: the level-" + std::to_string(cfg.j_star) +
                          " projection of the bump vanishes where p = p2; move the bump or change j*");

    ExperimentReport rep;
    rep.name = "modular_failure";
    rep.header = {"t", "modular_Pf", "modular_f", "rho", "modular_Pf_const", "modular_f_const", "rho_const"};
    std::vector<double> rho, rho_c;
    for (double t : cfg.scales) {
        const auto ft = t * g;
        const auto pft = t * pg;
        const double a = modular(pft, p, w), b = modular(ft, p, w);
        const double ac = modular(pft, p_const, w), bc = modular(ft, p_const, w);
        rho.push_back(a / b);
        rho_c.push_back(ac / bc);
        rep.rows.push_back(detail::row(t, a, b, a / b, ac, bc, ac / bc));
    }

    bool increasing = true;
    for (std::size_t i = 1; i < rho.size(); ++i)
        increasing = increasing && rho[i] > rho[i - 1];
    const double slope = loglog_slope(cfg.scales, rho);
    const double target = step->p2 - step->p1;
    const double growth = rho.back() / rho.front();
    const auto [cmin, cmax] = std::minmax_element(rho_c.begin(), rho_c.end());
    const double variation = *cmax / *cmin - 1.0;

    // the same projection through the kernel path
    const auto K = wavelet_projection_kernel(sys, cfg.j_star);
    const auto pk = apply_local_cz(K, g);
    const double cross = (pk - pg).sup_abs() / pg.sup_abs();

    rep.bands["rho"] = {{"min", rho.front()}, {"max", rho.back()}, {"growth", growth}, {"slope", slope}};
    rep.bands["rho_const"] = {{"min", *cmin}, {"max", *cmax}, {"variation", variation}};
    rep.diagnostics["wavelet"] = detail::wavelet_json(cfg, *sys);
    rep.diagnostics["bump"] = {{"centre", centre}, {"radius", 0.5}, {"amplitude", cfg.bump_amplitude}};
    rep.diagnostics["projection_sup_high_region"] = high;
    rep.diagnostics["kernel_cross_check"] = cross;
    const auto n = rho.size();
    rep.diagnostics["last_local_slope"] =
        std::log(rho[n - 1] / rho[n - 2]) / std::log(cfg.scales[n - 1] / cfg.scales[n - 2]);

    rep.check("rho_increasing", increasing, growth, 1.0);
    rep.check("rho_growth", growth >= cfg.growth_target, growth, cfg.growth_target);
    rep.check("loglog_slope", std::abs(slope - target) <= cfg.slope_tolerance * target, slope, target);
    rep.check("control_variation", variation <= cfg.control_tolerance, variation, cfg.control_tolerance);
    rep.check("kernel_cross_check", cross <= 1e-6, cross, 1e-6);
    return rep;
}

// ------------------------------------------------------------------- maximal

inline ExperimentReport run_maximal_comparison(const ExperimentConfig& cfg)
{
    validate(cfg);
    ExperimentReport rep;
    rep.name = "maximal";
    rep.header = {"weight", "L", "s", "norm_f", "norm_Mloc_f", "norm_M_f", "ratio_loc", "ratio_full"};

    struct Key {
        std::string weight;
        int L;
        int s;
        double loc;
        double full;
    };
    std::vector<Key> rows;
    for (int L : cfg.maximal_L) {
        const Grid grid(L, cfg.r);
        const auto p = make_exponent(parse_exponent_spec(cfg.p), grid);
        std::vector<GridFunction> fs, mloc, mfull;
        for (int s = 0; s <= L - 2; ++s) {
            fs.push_back(indicator(grid, s, s + 1));
            mloc.push_back(m_loc(fs.back()));
            mfull.push_back(full_maximal(fs.back()));
        }
        for (const auto& wname : cfg.maximal_weights) {
            Weight w = [&] {
                try {
                    return make_weight(parse_weight_spec(wname), grid);
                } catch (const RangeError& e) {
                    throw RangeError(std::string(e.what()) + " (L = " + std::to_string(L) + ")");
                }
            }();
            for (int s = 0; s <= L - 2; ++s) {
                const auto k = static_cast<std::size_t>(s);
                const double nf = luxemburg_norm(fs[k], p, w);
                const double nl = luxemburg_norm(mloc[k], p, w);
                const double nm = luxemburg_norm(mfull[k], p, w);
                rows.push_back({wname, L, s, nl / nf, nm / nf});
                rep.rows.push_back(detail::row(wname, std::int64_t{L}, std::int64_t{s}, nf, nl, nm,
                                               nl / nf, nm / nf));
            }
        }
    }

    for (const auto& wname : cfg.maximal_weights) {
        nlohmann::json per_weight = nlohmann::json::object();
        for (int L : cfg.maximal_L) {
            Band loc, full;
            for (const auto& k : rows)
                if (k.weight == wname && k.L == L) {
                    loc.add(k.loc);
                    full.add(k.full);
                }
            per_weight[std::to_string(L)] = {{"loc", loc}, {"full", full}};
            rep.check("loc_bounded_in_s[" + wname + ",L=" + std::to_string(L) + "]",
                      loc.spread() <= cfg.loc_spread_limit, loc.spread(), cfg.loc_spread_limit);
        }
        rep.bands[wname] = per_weight;
    }

    // stability in L and divergence of the full operator along s = 0, first weight
    const auto& wname = cfg.maximal_weights.front();
    std::vector<double> loc0, full0;
    for (int L : cfg.maximal_L)
        for (const auto& k : rows)
            if (k.weight == wname && k.L == L && k.s == 0) {
                loc0.push_back(k.loc);
                full0.push_back(k.full);
            }
    const auto [lmin, lmax] = std::minmax_element(loc0.begin(), loc0.end());
    const double stab = *lmax / *lmin - 1.0;
    bool monotone = true;
    for (std::size_t i = 1; i < full0.size(); ++i)
        monotone = monotone && full0[i] > full0[i - 1];
    const double growth = full0.back() / full0.front();
    rep.check("loc_stable_in_L[" + wname + "]", stab <= cfg.loc_stability, stab, cfg.loc_stability);
    rep.check("full_monotone_in_L[" + wname + "]", monotone, growth, 1.0);
    rep.check("full_growth[" + wname + "]", growth >= cfg.full_growth, growth, cfg.full_growth);
    return rep;
}

// ------------------------------------------------------------- vector-valued

inline ExperimentReport run_vector_valued(const ExperimentConfig& cfg)
{
    validate(cfg);
    const Grid grid(cfg.L, cfg.r);
    const auto p = make_exponent(parse_exponent_spec(cfg.p), grid);
    const auto w = make_weight(parse_weight_spec(cfg.w), grid);
    ExperimentReport rep;
    rep.name = "vector_valued";
    rep.header = {"trial", "q", "m", "norm_lhs", "norm_rhs", "ratio"};
    Rng rng(cfg.seed);
    Band b2, binf;
    const double reach = std::max(0.5, cfg.L - 2.0);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        std::vector<GridFunction> fs, ms;
        for (std::size_t j = 0; j < cfg.family_size; ++j) {
            const double c = rng.uniform(-reach, reach);
            const double rho = rng.uniform(0.1, 0.5);
            fs.push_back(make_function("bump:" + detail::fmt_number(c) + ":" + detail::fmt_number(rho), grid));
            ms.push_back(m_loc(fs.back()));
        }
        for (int q : {2, 0}) {
            auto combine = [&](const std::vector<GridFunction>& v) {
                std::vector<double> out(grid.size(), 0.0);
                for (const auto& f : v)
                    for (std::size_t i = 0; i < out.size(); ++i)
                        out[i] = q == 0 ? std::max(out[i], std::abs(f[i])) : out[i] + f[i] * f[i];
                if (q == 2)
                    for (double& x : out)
                        x = std::sqrt(x);
                return GridFunction(grid, std::move(out));
            };
            const double lhs = luxemburg_norm(combine(ms), p, w);
            const double rhs = luxemburg_norm(combine(fs), p, w);
            (q == 2 ? b2 : binf).add(lhs / rhs);
            rep.rows.push_back(detail::row(static_cast<std::int64_t>(t), std::string(q == 2 ? "2" : "inf"),
                                           static_cast<std::int64_t>(cfg.family_size), lhs, rhs, lhs / rhs));
        }
    }
    rep.bands["q=2"] = b2;
    rep.bands["q=inf"] = binf;
    rep.check("q2_finite", b2.finite(), b2.hi, 0.0);
    rep.check("qinf_finite", binf.finite(), binf.hi, 0.0);
    return rep;
}

// ------------------------------------------------------------ CZ oscillation

struct OscillationPair {
    std::size_t function = 0;
    DyadicCube cube;
};

/// Cubes of side 1, 1/2, ..., 1/16 inside [-2, 2], five per function.
inline std::vector<OscillationPair> oscillation_pairs(std::uint64_t seed, std::size_t functions,
                                                      std::size_t pairs)
{
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<OscillationPair> out;
    for (std::size_t i = 0; i < pairs; ++i) {
        const int level = static_cast<int>(rng.index(5));
        const auto per = std::int64_t{2} << level;
        const auto k = static_cast<std::int64_t>(rng.index(static_cast<std::uint64_t>(2 * per))) - per;
        out.push_back({i % functions, {level, k}});
    }
    return out;
}

struct OscillationRun {
    double constant = 0.0;
    std::vector<std::vector<std::string>> rows;
    Band norm_band;
};

inline OscillationRun oscillation_pass(const ExperimentConfig& cfg, const LocalCZKernel& K, int r,
                                       const WaveletSystem* sys)
{
    const Grid grid(cfg.L, r);
    const auto corpus = bump_corpus(cfg.seed, cfg.cz_functions);
    const auto pairs = oscillation_pairs(cfg.seed, cfg.cz_functions, cfg.cz_pairs);
    const auto p = make_exponent(parse_exponent_spec(cfg.p), grid);
    const auto w = make_weight(parse_weight_spec(cfg.w), grid);
    OscillationRun run;
    std::vector<GridFunction> tf, mf;
    for (const auto& d : corpus) {
        const auto f = make_function(d, grid, sys);
        tf.push_back(apply_local_cz(K, f));
        mf.push_back(m_loc(f, 2 * K.gamma + 3));
        const double nf = luxemburg_norm(f, p, w);
        run.norm_band.add(nf > 0.0 ? luxemburg_norm(tf.back(), p, w) / nf : detail::nan());
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& pr = pairs[i];
        const auto range = pr.cube.cells(grid);
        const auto mv = mf[pr.function].values().subspan(range.first, range.count);
        const double lower = *std::min_element(mv.begin(), mv.end());
        const double omega = mean_oscillation(tf[pr.function], pr.cube);
        if (lower == 0.0)
            continue;
        const double ratio = omega / lower;
        run.constant = std::max(run.constant, ratio);
        run.rows.push_back(detail::row(std::int64_t{r}, static_cast<std::int64_t>(i), corpus[pr.function],
                                       std::int64_t{pr.cube.level}, pr.cube.index, omega, lower, ratio));
    }
    return run;
}

inline ExperimentReport run_cz_oscillation(const ExperimentConfig& cfg)
{
    validate(cfg);
    const auto sys = detail::wavelet_system(cfg);
    const auto K = make_kernel(cfg.kernel, sys);
    ExperimentReport rep;
    rep.name = "cz_oscillation";
    rep.header = {"r", "pair", "function", "level", "index", "omega_Tf", "min_Mloc_power_f", "ratio"};
    const auto kr = verify_kernel_conditions(K, cfg.kernel_samples, cfg.seed);
    rep.diagnostics["kernel"] = {{"name", kr.name},
                                 {"samples", kr.samples},
                                 {"size_max", kr.size_max},
                                 {"claimed_d1", kr.claimed_d1},
                                 {"hormander_max", kr.hormander_max},
                                 {"claimed_d2", kr.claimed_d2},
                                 {"support_violations", kr.support_violations}};
    rep.check("kernel_conditions", kr.passed(), kr.hormander_max, kr.claimed_d2);
    if (!kr.passed())
        return rep;

    const auto base = oscillation_pass(cfg, K, cfg.r, sys.get());
    rep.rows = base.rows;
    rep.bands["oscillation_constant"] = base.constant;
    rep.bands["operator_norm"] = base.norm_band;
    const bool finite = std::isfinite(base.constant) && base.constant > 0.0;
    rep.check("oscillation_constant_finite", finite, base.constant, 0.0);
    rep.check("operator_norm_finite", base.norm_band.finite(), base.norm_band.hi, 0.0);
    if (cfg.refine) {
        const auto fine = oscillation_pass(cfg, K, cfg.r + 1, sys.get());
        rep.rows.insert(rep.rows.end(), fine.rows.begin(), fine.rows.end());
        rep.bands["oscillation_constant_refined"] = fine.constant;
        rep.bands["operator_norm_refined"] = fine.norm_band;
        const double change = std::abs(fine.constant / base.constant - 1.0);
        rep.check("oscillation_refinement", change <= cfg.refine_tolerance, change, cfg.refine_tolerance);
    }
    return rep;
}

// -------------------------------------------------------------- aploc / norm

inline ExperimentReport run_aploc(const ExperimentConfig& cfg)
{
    validate(cfg);
    const Grid grid(cfg.L, cfg.r);
    const auto p = make_exponent(parse_exponent_spec(cfg.p), grid);
    const auto w = make_weight(parse_weight_spec(cfg.w), grid);
    const auto est = a_loc_constant(p, w);
    const auto lh = log_holder_constants(p);
    ExperimentReport rep;
    rep.name = "aploc";
    rep.header = {"level", "side", "max_quantity"};
    for (std::size_t m = 0; m < est.level_max.size(); ++m)
        rep.rows.push_back(detail::row(static_cast<std::int64_t>(m), std::ldexp(1.0, -static_cast<int>(m)),
                                       est.level_max[m]));
    rep.bands["a_loc"] = {{"constant", est.constant},
                          {"best_left", est.best_left},
                          {"best_side", est.best_side},
                          {"cubes", est.cubes}};
    rep.diagnostics["log_holder"] = {{"c0", lh.c0}, {"c_inf", lh.c_inf}, {"p_infinity_used", lh.p_infinity_used}};
    rep.diagnostics["family"] = {{"min_level", 0}, {"max_level", cfg.r}, {"stride_cells", 1}};
    rep.check("a_loc_finite", std::isfinite(est.constant) && est.constant > 0.0, est.constant, 0.0);
    return rep;
}

inline ExperimentReport run_norm(const ExperimentConfig& cfg)
{
    validate(cfg);
    const auto sys = detail::wavelet_system(cfg);
    ExperimentReport rep;
    rep.name = "norm";
    rep.header = {"function", "L", "r", "norm", "modular", "l2"};
    std::vector<double> norms;
    for (int L : {cfg.L, cfg.L + 2}) {
        const Grid grid(L, cfg.r);
        const auto p = make_exponent(parse_exponent_spec(cfg.p), grid);
        const auto w = make_weight(parse_weight_spec(cfg.w), grid);
        const auto f = make_function(cfg.f, grid, sys.get());
        norms.push_back(luxemburg_norm(f, p, w));
        rep.rows.push_back(detail::row(cfg.f, std::int64_t{L}, std::int64_t{cfg.r}, norms.back(),
                                       modular(f, p, w), l2_norm(f)));
    }
    const double change = norms[0] > 0.0 ? std::abs(norms[1] / norms[0] - 1.0) : std::abs(norms[1]);
    rep.bands["norm"] = norms[0];
    rep.check("stable_under_L_plus_2", change <= 1e-6, change, 1e-6);
    return rep;
}

}  // namespace lpvar
