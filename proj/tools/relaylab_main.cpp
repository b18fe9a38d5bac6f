#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "relaylab/harness.hpp"

namespace fs = std::filesystem;
using namespace relaylab;

namespace {

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    char first = 0;
    in >> std::ws;
    first = char(in.peek());
    in.clear();
    in.seekg(0);
    return first == '{' ? parse_config_json(in) : parse_config(in);
}

std::ofstream open_out(const fs::path& p, bool force) {
    if (fs::exists(p) && !force)
        throw std::runtime_error("refusing to overwrite " + p.string() + " (pass --force)");
    if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot open " + p.string());
    return os;
}

void cmd_simulate(const ExperimentConfig& cfg, bool force) {
    const NetworkParams p = params_from_config(cfg, cfg.M > 0 ? cfg.M : cfg.m_grid.at(0));
    SimulateOptions opt;
    opt.threads = cfg.threads;
    const SampleSet s = simulate(p, cfg.trials, cfg.seed, opt);
    StatsOptions so;
    so.mod_a = cfg.mod_a;
    so.mod_b = cfg.mod_b;
    for (double db : cfg.gamma_th_db) so.thresholds.push_back(std::pow(10.0, db / 10.0));
    const EmpiricalStats st = empirical_stats(s, so);
    const fs::path dir = cfg.out.empty() ? "." : cfg.out;
    {
        auto os = open_out(dir / "samples.csv", force);
        write_samples_csv(s, os);
    }
    {
        auto os = open_out(dir / "stats.json", force);
        write_stats_json(st, os);
    }
    {
        auto os = open_out(dir / "run.config", force);
        os << serialize_config(cfg);
    }
    std::cout << "wrote " << (dir / "samples.csv").string() << " and stats.json ("
              << cfg.trials << " trials)\n";
}

void cmd_analyze(const ExperimentConfig& cfg, bool force) {
    const NetworkParams p = params_from_config(cfg, cfg.M > 0 ? cfg.M : cfg.m_grid.at(0));
    if (p.K < 2) throw std::runtime_error("analyze needs K >= 2");
    const fs::path dir = cfg.out.empty() ? "." : cfg.out;
    auto os = open_out(dir / "analytic_curves.csv", force);
    os << "x,value,form,valid_flags\n";
    char line[256];
    const GammaMixParams g = gamma_mix_params(p);
    const double y_hi = 6.0 * g.d_e * (p.K - 1);
    for (int i = 1; i <= 200; ++i) {
        const double y = y_hi * i / 200.0;
        std::snprintf(line, sizeof line, "%.10g,%.10g,eq22_series,-\n", y,
                      interference_pdf(y, g, PdfForm::series));
        os << line;
        std::snprintf(line, sizeof line, "%.10g,%.10g,eq23_closed,-\n", y,
                      interference_pdf(y, g, PdfForm::closed));
        os << line;
    }
    const double sup = p.M / xi_term(p);
    for (int i = 1; i < 200; ++i) {
        const double r = sup * i / 200.0;
        std::snprintf(line, sizeof line, "%.10g,%.10g,eq26,-\n", r, sinr_pdf(r, p));
        os << line;
    }
    std::vector<double> gammas;
    for (double db : cfg.gamma_th_db) gammas.push_back(std::pow(10.0, db / 10.0));
    if (gammas.empty())
        for (int i = 1; i <= 40; ++i) gammas.push_back(sup * i / 42.0);
    for (double gth : gammas) {
        const OutageContext octx = outage_context(gth, p);
        const std::string flags = std::string(octx.et_large ? "et_large" : "et_small") + "|" +
                                  (octx.m_large ? "m_large" : "m_small");
        std::snprintf(line, sizeof line, "%.10g,%.10g,eq24,%s\n", gth,
                      outage_probability(gth, p, OutageForm::exact).value, flags.c_str());
        os << line;
        std::snprintf(line, sizeof line, "%.10g,%.10g,eq25,%s\n", gth,
                      outage_probability(gth, p, OutageForm::high_snr).value, flags.c_str());
        os << line;
    }
    const AberResult a = aber(p, cfg.mod_a, cfg.mod_b);
    std::snprintf(line, sizeof line, "%.10g,%.10g,eq27,%s\n", cfg.mod_b, a.value,
                  a.valid ? "valid" : "outside_validity");
    os << line;
    std::cout << "wrote " << (dir / "analytic_curves.csv").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relaylab: multi-pair massive-MIMO relay link laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 1;
    int threads = 1;
    bool force = false, json_out = false;
    std::optional<std::size_t> trials_override;
    app.add_option("--config", config_path, "experiment config (key=value or JSON)");
    app.add_option("--seed", seed, "master seed");
    std::size_t trials_raw = 0;
    auto* trials_opt = app.add_option("--trials", trials_raw, "trial-count override");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads");
    app.add_flag("--force", force, "overwrite existing outputs");
    app.add_flag("--json", json_out, "JSON output where applicable");

    auto* sc_scaling = app.add_subcommand("scaling", "scaling-law report for an exponent tuple");
    std::string rk = "0", rp = "0", rq = "0", rc = "0";
    double k0 = 1, p0 = 1, q0 = 1, c0 = 1;
    sc_scaling->add_option("--r_k", rk);
    sc_scaling->add_option("--r_p", rp);
    sc_scaling->add_option("--r_q", rq);
    sc_scaling->add_option("--r_c", rc);
    sc_scaling->add_option("--k0", k0);
    sc_scaling->add_option("--p0", p0);
    sc_scaling->add_option("--q0", q0);
    sc_scaling->add_option("--c0", c0);

    auto* sc_sim = app.add_subcommand("simulate", "run one Monte Carlo experiment");
    auto* sc_ana = app.add_subcommand("analyze", "export analytic curves for one operating point");
    auto* sc_fig = app.add_subcommand("figure", "emit a figure dataset (fig1..fig5)");
    std::string fig_name;
    sc_fig->add_option("name", fig_name, "fig1..fig5")->required();
    auto* sc_acc = app.add_subcommand("acceptance", "run an acceptance suite");
    std::string suite = "all";
    sc_acc->add_option("suite", suite,
                       "scaling|slopes|moments|bound|pdf|outage|aber|determinism|repro|all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }
    if (trials_opt->count() > 0) trials_override = trials_raw;

    try {
        if (*sc_scaling) {
            ScalingExponents e;
            if (!config_path.empty()) {
                const ExperimentConfig cfg = load_config(config_path);
                if (!cfg.exponents) throw std::runtime_error("config has no exponent model");
                e = *cfg.exponents;
            } else {
                e = ScalingExponents{parse_rational(rk), parse_rational(rp), parse_rational(rq),
                                     parse_rational(rc), k0, p0, q0, c0};
            }
            std::cout << format_scale_report(e, json_out);
            return exit_ok;
        }
        if (*sc_sim || *sc_ana) {
            if (config_path.empty()) throw std::runtime_error("simulate/analyze need --config");
            ExperimentConfig cfg = load_config(config_path);
            if (seed != 1) cfg.seed = seed;
            if (trials_override) cfg.trials = *trials_override;
            if (threads != 1) cfg.threads = threads;
            if (!out_dir.empty()) cfg.out = out_dir;
            if (*sc_sim) cmd_simulate(cfg, force);
            else cmd_analyze(cfg, force);
            return exit_ok;
        }
        if (*sc_fig) {
            RunContext ctx;
            ctx.out_dir = out_dir.empty() ? "." : out_dir;
            ctx.seed = seed;
            ctx.threads = threads;
            ctx.force = force;
            ctx.trials = trials_override;
            figure(fig_name, ctx);
            std::cout << "wrote " << (fs::path(ctx.out_dir) / (fig_name + ".csv")).string()
                      << "\n";
            return exit_ok;
        }
        if (*sc_acc) {
            RunContext ctx;
            ctx.out_dir = out_dir.empty() ? "." : out_dir;
            ctx.seed = seed;
            ctx.threads = threads;
            ctx.force = force;
            ctx.trials = trials_override;
            const bool ok = acceptance(suite, ctx, std::cout, json_out);
            return ok ? exit_ok : exit_acceptance;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return exit_config;
    }
    return exit_usage;
}
