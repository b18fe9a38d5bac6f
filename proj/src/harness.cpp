#include "relaylab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace relaylab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double v) { return 10.0 * std::log10(v); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& val, int line) {
    auto e = [&]() -> ScalingExponents& {
        if (!c.exponents) c.exponents = ScalingExponents{};
        return *c.exponents;
    };
    try {
        if (key == "scenario") c.scenario = val;
        else if (key == "r_k") e().r_k = parse_rational(val);
        else if (key == "r_p") e().r_p = parse_rational(val);
        else if (key == "r_q") e().r_q = parse_rational(val);
        else if (key == "r_c") e().r_c = parse_rational(val);
        else if (key == "k0") e().k0 = std::stod(val);
        else if (key == "p0") e().p0 = std::stod(val);
        else if (key == "q0") e().q0 = std::stod(val);
        else if (key == "c0") e().c0 = std::stod(val);
        else if (key == "M") c.M = std::stoi(val);
        else if (key == "K") c.K = std::stoi(val);
        else if (key == "P_dB") c.p_db = std::stod(val);
        else if (key == "Q_dB") c.q_db = std::stod(val);
        else if (key == "P_c") c.p_c = std::stod(val);
        else if (key == "tau") c.tau = std::stoi(val);
        else if (key == "Pt_dB") c.pt_db = std::stod(val);
        else if (key == "M_grid") {
            c.m_grid.clear();
            for (const auto& tok : split(val, ',')) c.m_grid.push_back(std::stoi(trim(tok)));
        } else if (key == "trials") c.trials = std::stoull(val);
        else if (key == "seed") c.seed = std::stoull(val);
        else if (key == "gamma_th_dB") {
            c.gamma_th_db.clear();
            for (const auto& tok : split(val, ',')) c.gamma_th_db.push_back(std::stod(trim(tok)));
        } else if (key == "mod_A") c.mod_a = std::stod(val);
        else if (key == "mod_B") c.mod_b = std::stod(val);
        else if (key == "threads") c.threads = std::stoi(val);
        else if (key == "out") c.out = val;
        else throw ConfigError("unknown key '" + key + "' at line " + std::to_string(line));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        throw ConfigError("bad value for '" + key + "' at line " + std::to_string(line) + ": " +
                          ex.what());
    }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value at line " + std::to_string(line));
        apply_key(c, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line);
    }
    return c;
}

ExperimentConfig parse_config_json(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("bad JSON config: ") + ex.what());
    }
    ExperimentConfig c;
    int n = 0;
    for (auto it = j.begin(); it != j.end(); ++it) {
        ++n;
        std::string v;
        if (it->is_string()) v = it->get<std::string>();
        else if (it->is_array()) {
            std::string acc;
            for (const auto& x : *it) {
                if (!acc.empty()) acc += ",";
                acc += x.is_string() ? x.get<std::string>() : x.dump();
            }
            v = acc;
        } else v = it->dump();
        apply_key(c, it.key(), v, n);
    }
    return c;
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "scenario = " << c.scenario << "\n";
    if (c.exponents) {
        const auto& e = *c.exponents;
        os << "r_k = " << to_string(e.r_k) << "\nr_p = " << to_string(e.r_p)
           << "\nr_q = " << to_string(e.r_q) << "\nr_c = " << to_string(e.r_c) << "\n";
        os << "k0 = " << e.k0 << "\np0 = " << e.p0 << "\nq0 = " << e.q0 << "\nc0 = " << e.c0
           << "\n";
    }
    if (c.M > 0) os << "M = " << c.M << "\n";
    if (c.K > 0) os << "K = " << c.K << "\n";
    os << "P_dB = " << c.p_db << "\nQ_dB = " << c.q_db << "\n";
    if (c.p_c) os << "P_c = " << *c.p_c << "\n";
    if (c.tau) os << "tau = " << *c.tau << "\n";
    if (c.pt_db) os << "Pt_dB = " << *c.pt_db << "\n";
    if (!c.m_grid.empty()) {
        os << "M_grid = ";
        for (std::size_t i = 0; i < c.m_grid.size(); ++i)
            os << (i ? "," : "") << c.m_grid[i];
        os << "\n";
    }
    os << "trials = " << c.trials << "\nseed = " << c.seed << "\n";
    if (!c.gamma_th_db.empty()) {
        os << "gamma_th_dB = ";
        for (std::size_t i = 0; i < c.gamma_th_db.size(); ++i)
            os << (i ? "," : "") << c.gamma_th_db[i];
        os << "\n";
    }
    os << "mod_A = " << c.mod_a << "\nmod_B = " << c.mod_b << "\n";
    os << "threads = " << c.threads << "\n";
    if (!c.out.empty()) os << "out = " << c.out << "\n";
    return os.str();
}

const std::vector<Scenario>& table1_scenarios() {
    static const std::vector<Scenario> cases = [] {
        std::vector<Scenario> v;
        auto mk = [](std::string name, Rational rk, double k0, Rational rp, double p0,
                     Rational rq, double q0, Rational rc, double c0) {
            Scenario s;
            s.name = std::move(name);
            s.exponents = ScalingExponents{rk, rp, rq, rc, k0, p0, q0, c0};
            return s;
        };
        // K = M/10, P = Q = 10, P_c = 0.8
        v.push_back(mk("case1", Rational(1), 0.1, Rational(0), 0.1, Rational(0), 0.1,
                       Rational(0), 1.25));
        // K = 10, P = Q = 10, P_c = 100/M
        v.push_back(mk("case2", Rational(0), 10, Rational(0), 0.1, Rational(0), 0.1,
                       Rational(1), 0.01));
        // K = floor(sqrt(M)), P = 10, Q = 1/sqrt(M), P_c = 0.8
        v.push_back(mk("case3", Rational(1, 2), 1, Rational(0), 0.1, Rational(1, 2), 1,
                       Rational(0), 1.25));
        // K = 20, P = Q = 1, P_c = 0.8
        v.push_back(mk("case4", Rational(0), 20, Rational(0), 1, Rational(0), 1, Rational(0),
                       1.25));
        // K = 20, P = Q = 10, P_c = 10/sqrt(M)
        v.push_back(mk("case5", Rational(0), 20, Rational(0), 0.1, Rational(0), 0.1,
                       Rational(1, 2), 0.1));
        return v;
    }();
    return cases;
}

const std::vector<Scenario>& determinism_scenarios() {
    static const std::vector<Scenario> cases = [] {
        std::vector<Scenario> v;
        Scenario s1;  // r_s = 1/2 via relay power scaling: Q = 0.4/sqrt(M)
        s1.name = "det1";
        s1.exponents = ScalingExponents{Rational(0), Rational(0), Rational(1, 2), Rational(0),
                                        10.0, 0.1, 2.5, 1.25};
        v.push_back(s1);
        Scenario s2;  // r_s = 0 with r_c = 1/2: P_c = 6.4/sqrt(M), P anchored at 1, Q at 0.1
        s2.name = "det2b";
        s2.exponents = ScalingExponents{Rational(0), Rational(1, 4), Rational(1, 2),
                                        Rational(1, 2), 10.0, 0.35355339059327373, 1.25,
                                        0.15625};
        v.push_back(s2);
        return v;
    }();
    return cases;
}

std::optional<Scenario> find_scenario(const std::string& name) {
    for (const auto& s : table1_scenarios())
        if (s.name == name) return s;
    for (const auto& s : determinism_scenarios())
        if (s.name == name) return s;
    return std::nullopt;
}

ScalingExponents clamp_base_constants(ScalingExponents e, int m_min) {
    // Realized P_c = 1/(c0 M^r_c) must stay within (0, 1] over the grid, so
    // raise c0 to 1/m_min^r_c when the configured constant undershoots.
    const double floor_c0 = 1.0 / pow_rational(m_min, e.r_c);
    e.c0 = std::max(e.c0, floor_c0);
    return e;
}

NetworkParams params_from_config(const ExperimentConfig& c, int M) {
    if (c.exponents) return realize_parameters(*c.exponents, M);
    const double P = db_to_linear(c.p_db);
    const double Q = db_to_linear(c.q_db);
    if (c.p_c) return make_params_from_quality(M, c.K, P, Q, *c.p_c);
    if (c.tau && c.pt_db) return make_params(M, c.K, P, Q, *c.tau, db_to_linear(*c.pt_db));
    throw ConfigError("config needs either P_c or (tau, Pt_dB), or an exponent model");
}

std::vector<ResultRecord> run(const ExperimentConfig& c) {
    std::vector<int> grid = c.m_grid;
    if (grid.empty()) {
        if (c.M <= 0) throw ConfigError("config needs M or M_grid");
        grid.push_back(c.M);
    }
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw ConfigError("M_grid must be ascending");

    ExperimentConfig cfg = c;
    if (cfg.exponents) cfg.exponents = clamp_base_constants(*cfg.exponents, grid.front());

    std::vector<ResultRecord> records;
    for (int M : grid) {
        const auto t0 = std::chrono::steady_clock::now();
        ResultRecord r;
        r.params = params_from_config(cfg, M);
        r.seed = cfg.seed;
        r.trials = cfg.trials;
        SimulateOptions opt;
        opt.threads = cfg.threads;
        const SampleSet s = simulate(r.params, cfg.trials, cfg.seed, opt);
        StatsOptions so;
        so.mod_a = cfg.mod_a;
        so.mod_b = cfg.mod_b;
        for (double db : cfg.gamma_th_db) so.thresholds.push_back(db_to_linear(db));
        r.stats = empirical_stats(s, so);
        r.bound = rate_lower_bound(r.params);
        if (r.params.K >= 2) {
            for (double g : so.thresholds) {
                r.outage_eq24.push_back(outage_probability(g, r.params, OutageForm::exact));
                r.outage_eq25.push_back(outage_probability(g, r.params, OutageForm::high_snr));
            }
            r.aber_eq27 = aber(r.params, cfg.mod_a, cfg.mod_b);
            r.high_snr_valid = so.thresholds.empty()
                                   ? r.aber_eq27.valid
                                   : outage_context(so.thresholds.front(), r.params).m_large;
        }
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        records.push_back(std::move(r));
    }
    return records;
}

namespace {

std::ofstream open_new(const fs::path& p, bool force) {
    if (fs::exists(p) && !force)
        throw ConfigError("refusing to overwrite " + p.string() + " (pass --force)");
    fs::create_directories(p.parent_path().empty() ? "." : p.parent_path());
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot open " + p.string() + " for writing");
    return os;
}

void write_meta(const fs::path& csv, const json& meta, bool force) {
    fs::path p = csv;
    p += ".meta.json";
    auto os = open_new(p, force);
    os << meta.dump(1) << "\n";
}

json params_json(const NetworkParams& p) {
    return json{{"M", p.M},     {"K", p.K},     {"P", p.P},  {"Q", p.Q},
                {"tau", p.tau}, {"P_t", std::isfinite(p.P_t) ? json(p.P_t) : json("inf")},
                {"P_c", p.P_c}};
}

char buf_line[1024];

void figure_fig1(const RunContext& ctx) {
    const std::vector<int> grid = {64, 128, 256, 512};
    const std::size_t trials = ctx.trials.value_or(10000);
    auto csv = open_new(fs::path(ctx.out_dir) / "fig1.csv", ctx.force);
    csv << "scenario,M,mean_sinr_emp,mean_sinr_db\n";
    json meta{{"figure", "fig1"}, {"seed", ctx.seed}, {"trials", trials}, {"grid", grid},
              {"columns",
               {{"mean_sinr_emp", "trial-average of the instantaneous SINR, linear"},
                {"mean_sinr_db", "10*log10 of mean_sinr_emp"}}},
              {"rows", json::array()}};
    for (const auto& sc : table1_scenarios()) {
        const ScalingExponents e = clamp_base_constants(sc.exponents, grid.front());
        for (int M : grid) {
            const NetworkParams p = realize_parameters(e, M);
            SimulateOptions opt;
            opt.threads = ctx.threads;
            const SampleSet s = simulate(p, trials, ctx.seed, opt);
            const Moments m = running_moments(s.sinr);
            std::snprintf(buf_line, sizeof buf_line, "%s,%d,%.17g,%.17g\n", sc.name.c_str(), M,
                          m.mean, linear_to_db(m.mean));
            csv << buf_line;
            meta["rows"].push_back({{"scenario", sc.name}, {"params", params_json(p)}});
        }
    }
    write_meta(fs::path(ctx.out_dir) / "fig1.csv", meta, ctx.force);
}

void figure_fig2(const RunContext& ctx) {
    const std::size_t trials = ctx.trials.value_or(10000);
    auto csv = open_new(fs::path(ctx.out_dir) / "fig2.csv", ctx.force);
    csv << "K,M,rate_emp,rate_lb\n";
    json meta{{"figure", "fig2"}, {"seed", ctx.seed}, {"trials", trials},
              {"P_dB", 0.0},      {"Q_dB", 0.0},      {"P_c", 0.5},
              {"columns",
               {{"rate_emp", "trial-average of 0.5*log2(1+SINR)"},
                {"rate_lb", "achievable-rate lower bound C_LB"}}}};
    for (int M : {100, 200}) {
        for (int K = 2; K <= 20; ++K) {
            const NetworkParams p = make_params_from_quality(M, K, 1.0, 1.0, 0.5);
            SimulateOptions opt;
            opt.threads = ctx.threads;
            const SampleSet s = simulate(p, trials, ctx.seed, opt);
            const EmpiricalStats st = empirical_stats(s);
            std::snprintf(buf_line, sizeof buf_line, "%d,%d,%.17g,%.17g\n", K, M, st.rate,
                          rate_lower_bound(p).c_lb);
            csv << buf_line;
        }
    }
    write_meta(fs::path(ctx.out_dir) / "fig2.csv", meta, ctx.force);
}

void figure_fig3(const RunContext& ctx) {
    const std::size_t trials = ctx.trials.value_or(100000);
    auto csv = open_new(fs::path(ctx.out_dir) / "fig3.csv", ctx.force);
    csv << "bin_lo,bin_hi,density_emp,density_eq23,K\n";
    json meta{{"figure", "fig3"}, {"seed", ctx.seed}, {"trials", trials}, {"M", 200},
              {"P_c", 0.8},
              {"columns",
               {{"density_emp", "normalized histogram of P_ie"},
                {"density_eq23", "closed-form gamma-mixture density at the bin center"}}}};
    for (int K : {10, 20}) {
        const NetworkParams p = make_params_from_quality(200, K, 10.0, 10.0, 0.8);
        SimulateOptions opt;
        opt.threads = ctx.threads;
        const SampleSet s = simulate(p, trials, ctx.seed, opt);
        const Histogram h = make_histogram(s.p_ie);
        const GammaMixParams g = gamma_mix_params(p);
        for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
            const double lo = h.edges[b], hi = h.edges[b + 1];
            const double dens = double(h.counts[b]) / (double(trials) * (hi - lo));
            const double mid = 0.5 * (lo + hi);
            std::snprintf(buf_line, sizeof buf_line, "%.17g,%.17g,%.17g,%.17g,%d\n", lo, hi,
                          dens, interference_pdf(mid, g), K);
            csv << buf_line;
        }
    }
    write_meta(fs::path(ctx.out_dir) / "fig3.csv", meta, ctx.force);
}

void figure_fig4(const RunContext& ctx) {
    const std::size_t trials = ctx.trials.value_or(1000000);
    const double gamma = db_to_linear(8.0);
    auto csv = open_new(fs::path(ctx.out_dir) / "fig4.csv", ctx.force);
    csv << "M,K,outage_emp,outage_eq24,outage_eq25\n";
    json meta{{"figure", "fig4"},      {"seed", ctx.seed}, {"trials", trials},
              {"P_dB", 10.0},          {"Q_dB", 10.0},     {"gamma_th_dB", 8.0},
              {"P_c", 0.95},
              {"columns",
               {{"outage_emp", "fraction of trials with SINR below gamma_th"},
                {"outage_eq24", "closed-form outage, exact form"},
                {"outage_eq25", "closed-form outage, high-SNR form"}}}};
    auto sweep = [&](int K, const std::vector<int>& grid) {
        for (int M : grid) {
            const NetworkParams p = make_params_from_quality(M, K, 10.0, 10.0, 0.95);
            SimulateOptions opt;
            opt.threads = ctx.threads;
            const SampleSet s = simulate(p, trials, ctx.seed, opt);
            StatsOptions so;
            so.thresholds = {gamma};
            const EmpiricalStats st = empirical_stats(s, so);
            std::snprintf(buf_line, sizeof buf_line, "%d,%d,%.17g,%.17g,%.17g\n", M, K,
                          st.outage[0], outage_probability(gamma, p, OutageForm::exact).value,
                          outage_probability(gamma, p, OutageForm::high_snr).value);
            csv << buf_line;
        }
    };
    sweep(8, {128, 160, 192, 224, 256});
    sweep(12, {160, 192, 224, 256, 288, 320});
    write_meta(fs::path(ctx.out_dir) / "fig4.csv", meta, ctx.force);
}

void figure_fig5(const RunContext& ctx) {
    const std::size_t trials = ctx.trials.value_or(1000000);
    auto csv = open_new(fs::path(ctx.out_dir) / "fig5.csv", ctx.force);
    csv << "M,K,aber_emp,aber_eq27\n";
    json meta{{"figure", "fig5"}, {"seed", ctx.seed}, {"trials", trials}, {"P_dB", 10.0},
              {"Q_dB", 10.0},     {"P_c", 0.95},      {"mod_A", 0.5},    {"mod_B", 1.0},
              {"columns",
               {{"aber_emp", "trial-average of A*erfc(sqrt(B*SINR)) for BPSK"},
                {"aber_eq27", "closed-form ABER approximation"}}}};
    auto sweep = [&](int K, const std::vector<int>& grid) {
        for (int M : grid) {
            const NetworkParams p = make_params_from_quality(M, K, 10.0, 10.0, 0.95);
            SimulateOptions opt;
            opt.threads = ctx.threads;
            const SampleSet s = simulate(p, trials, ctx.seed, opt);
            const EmpiricalStats st = empirical_stats(s);
            std::snprintf(buf_line, sizeof buf_line, "%d,%d,%.17g,%.17g\n", M, K, st.aber,
                          aber(p, 0.5, 1.0).value);
            csv << buf_line;
        }
    };
    sweep(8, {96, 128, 160, 192});
    sweep(12, {128, 160, 192, 224, 256});
    write_meta(fs::path(ctx.out_dir) / "fig5.csv", meta, ctx.force);
}

}  // namespace

void figure(const std::string& name, const RunContext& ctx) {
    if (name == "fig1") figure_fig1(ctx);
    else if (name == "fig2") figure_fig2(ctx);
    else if (name == "fig3") figure_fig3(ctx);
    else if (name == "fig4") figure_fig4(ctx);
    else if (name == "fig5") figure_fig5(ctx);
    else throw ConfigError("unknown figure '" + name + "' (fig1..fig5)");
}

std::string format_scale_report(const ScalingExponents& e, bool json_out) {
    const SinrScaleReport rep = scaling_exponent(e);
    if (json_out) {
        json j{{"r_k", to_string(e.r_k)},
               {"r_p", to_string(e.r_p)},
               {"r_q", to_string(e.r_q)},
               {"r_c", to_string(e.r_c)},
               {"k0", e.k0},
               {"p0", e.p0},
               {"q0", e.q0},
               {"c0", e.c0},
               {"r_s", to_string(rep.r_s)},
               {"favourable", rep.favourable},
               {"deterministic_sufficient", rep.deterministic_sufficient},
               {"linear_regime", rep.linear_regime},
               {"binding_term", rep.binding_term == BindingTerm::source_power
                                    ? "source-power"
                                    : "relay-per-user-power"}};
        return j.dump(1) + "\n";
    }
    std::ostringstream os;
    os << "r_s = " << to_string(rep.r_s) << "\n"
       << "favourable = " << (rep.favourable ? "yes" : "no") << "\n"
       << "asymptotically deterministic (sufficient) = "
       << (rep.deterministic_sufficient ? "yes" : "no") << "\n"
       << "linear regime = " << (rep.linear_regime ? "yes" : "no") << "\n"
       << "binding term = "
       << (rep.binding_term == BindingTerm::source_power ? "source-power"
                                                         : "relay-per-user-power")
       << "\n";
    return os.str();
}

}  // namespace relaylab
