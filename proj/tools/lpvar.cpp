// Command-line front end for the experiments.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lpvar/lpvar.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<int> L, r, N, J, jmax;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> p, w, out, f;
};

lpvar::ExperimentConfig resolve(const Overrides& o)
{
    auto c = o.config.empty() ? lpvar::ExperimentConfig{} : lpvar::load_config(o.config);
    if (o.L) c.L = *o.L;
    if (o.r) c.r = *o.r;
    if (o.N) c.N = *o.N;
    if (o.J) c.J = *o.J;
    if (o.jmax) c.j_max = *o.jmax;
    if (o.seed) c.seed = *o.seed;
    if (o.p) c.p = *o.p;
    if (o.w) c.w = *o.w;
    if (o.out) c.out = *o.out;
    if (o.f) c.f = *o.f;
    return c;
}

void print(const lpvar::ExperimentReport& rep, const lpvar::ExperimentConfig& cfg)
{
    std::printf("%s: %zu rows -> %s/%s.csv\n", rep.name.c_str(), rep.rows.size(), cfg.out.c_str(),
                rep.name.c_str());
    for (const auto& c : rep.checks)
        std::printf("  %-4s %-40s value %.6g  limit %.6g%s%s\n", c.passed ? "ok" : "FAIL", c.name.c_str(),
                    c.value, c.limit, c.detail.empty() ? "" : "  ", c.detail.c_str());
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Weighted variable-exponent Lebesgue space experiments"};
    app.require_subcommand(1);
    Overrides o;
    app.add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--L", o.L, "domain half-width");
    app.add_option("--r", o.r, "resolution, h = 2^-r");
    app.add_option("--p", o.p, "exponent, const:c or step:p1:p2:x0:delta");
    app.add_option("--w", o.w, "weight, one | exp:a | pow:A");
    app.add_option("--N", o.N, "Daubechies order");
    app.add_option("--J", o.J, "coarsest wavelet level");
    app.add_option("--jmax", o.jmax, "finest wavelet level");
    app.add_option("--seed", o.seed, "corpus seed");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--f", o.f, "function descriptor for 'norm'");

    using Runner = lpvar::ExperimentReport (*)(const lpvar::ExperimentConfig&);
    const std::map<std::string, std::pair<Runner, std::string>> commands{
        {"equivalence", {lpvar::run_equivalence, "wavelet square-function norm equivalence"}},
        {"modular-failure", {lpvar::run_modular_failure, "modular inequality failure for a step exponent"}},
        {"maximal", {lpvar::run_maximal_comparison, "local vs full maximal operator"}},
        {"vector-valued", {lpvar::run_vector_valued, "vector-valued local maximal inequality"}},
        {"cz", {lpvar::run_cz_oscillation, "local CZ operator oscillation bound"}},
        {"aploc", {lpvar::run_aploc, "A^loc constant of (p, w)"}},
        {"norm", {lpvar::run_norm, "Luxemburg norm of --f"}}};
    for (const auto& [name, cmd] : commands)
        app.add_subcommand(name, cmd.second)->fallthrough();

    CLI11_PARSE(app, argc, argv);
    try {
        const auto cfg = resolve(o);
        const auto& name = app.get_subcommands().front()->get_name();
        const auto rep = commands.at(name).first(cfg);
        lpvar::write_report(rep, cfg);
        print(rep, cfg);
        return rep.passed() ? 0 : 1;
    } catch (const lpvar::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
