#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "relaylab/harness.hpp"

using namespace relaylab;
namespace fs = std::filesystem;

namespace {

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
    if (a.scenario != b.scenario || a.M != b.M || a.K != b.K) return false;
    if (a.p_db != b.p_db || a.q_db != b.q_db) return false;
    if (a.p_c != b.p_c || a.tau != b.tau || a.pt_db != b.pt_db) return false;
    if (a.m_grid != b.m_grid || a.trials != b.trials || a.seed != b.seed) return false;
    if (a.gamma_th_db != b.gamma_th_db || a.mod_a != b.mod_a || a.mod_b != b.mod_b) return false;
    if (a.threads != b.threads || a.out != b.out) return false;
    if (a.exponents.has_value() != b.exponents.has_value()) return false;
    if (a.exponents) {
        const auto &x = *a.exponents, &y = *b.exponents;
        if (x.r_k != y.r_k || x.r_p != y.r_p || x.r_q != y.r_q || x.r_c != y.r_c) return false;
        if (x.k0 != y.k0 || x.p0 != y.p0 || x.q0 != y.q0 || x.c0 != y.c0) return false;
    }
    return true;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("relaylab_test_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("flat config parses, serializes and round-trips") {
    const std::string text = R"(# comment line
scenario = case4
M = 200
K = 10
P_dB = 10     # trailing comment
Q_dB = 10
P_c = 0.8
M_grid = 64,128,256
trials = 5000
seed = 42
gamma_th_dB = 8,10
mod_A = 0.5
mod_B = 1
threads = 2
out = results
)";
    std::istringstream in(text);
    const ExperimentConfig c = parse_config(in);
    CHECK(c.scenario == "case4");
    CHECK(c.M == 200);
    CHECK(*c.p_c == 0.8);
    CHECK(c.m_grid == std::vector<int>{64, 128, 256});
    CHECK(c.gamma_th_db == std::vector<double>{8.0, 10.0});
    CHECK(c.seed == 42);

    std::istringstream again(serialize_config(c));
    const ExperimentConfig c2 = parse_config(again);
    CHECK(same_config(c, c2));
    std::istringstream third(serialize_config(c2));
    CHECK(same_config(c2, parse_config(third)));

    std::istringstream bad("foo");
    CHECK_THROWS(parse_config(bad));
    std::istringstream badkey("nope = 3");
    CHECK_THROWS(parse_config(badkey));
}

TEST_CASE("json config is accepted") {
    const std::string text = R"({"scenario":"case2","M":128,"K":10,"P_dB":10,"Q_dB":10,
        "P_c":0.5,"trials":100,"seed":7,"r_k":"0","r_c":"1","c0":0.01})";
    std::istringstream in(text);
    const ExperimentConfig c = parse_config_json(in);
    CHECK(c.scenario == "case2");
    CHECK(c.exponents.has_value());
    CHECK(c.exponents->r_c == Rational(1));
    CHECK(c.seed == 7);
    std::istringstream bad("{not json");
    CHECK_THROWS(parse_config_json(bad));
}

TEST_CASE("scenario constants realize the Table I operating points") {
    const auto c3 = find_scenario("case3");
    REQUIRE(c3.has_value());
    const NetworkParams p = realize_parameters(c3->exponents, 100);
    CHECK(p.K == 10);
    CHECK(p.Q == doctest::Approx(0.1));
    const auto c4 = find_scenario("case4");
    const NetworkParams q = realize_parameters(c4->exponents, 333);
    CHECK(q.K == 20);
    CHECK(q.P_c == doctest::Approx(0.8));
    CHECK_FALSE(find_scenario("case9").has_value());
}

TEST_CASE("grid clamp keeps realized P_c a power law inside (0,1]") {
    const auto c2 = clamp_base_constants(find_scenario("case2")->exponents, 64);
    CHECK(realize_parameters(c2, 64).P_c == doctest::Approx(1.0));
    CHECK(realize_parameters(c2, 128).P_c == doctest::Approx(0.5));
    CHECK(realize_parameters(c2, 512).P_c == doctest::Approx(0.125));
    const auto c5 = clamp_base_constants(find_scenario("case5")->exponents, 64);
    CHECK(realize_parameters(c5, 64).P_c == doctest::Approx(1.0));
    CHECK(realize_parameters(c5, 256).P_c == doctest::Approx(0.5));
    // no clamp needed when the constants are already feasible
    const auto c4 = clamp_base_constants(find_scenario("case4")->exponents, 64);
    CHECK(realize_parameters(c4, 64).P_c == doctest::Approx(0.8));
}

TEST_CASE("run() produces analytic overlays alongside the stats") {
    ExperimentConfig cfg;
    cfg.M = 64;
    cfg.K = 4;
    cfg.p_db = 10.0;
    cfg.q_db = 10.0;
    cfg.p_c = 0.8;
    cfg.trials = 500;
    cfg.seed = 3;
    cfg.gamma_th_db = {8.0};
    const auto records = run(cfg);
    REQUIRE(records.size() == 1);
    const auto& r = records[0];
    CHECK(r.stats.trials == 500);
    CHECK(r.bound.c_lb > 0.0);
    REQUIRE(r.outage_eq24.size() == 1);
    CHECK(r.outage_eq24[0].value >= 0.0);
    CHECK(r.outage_eq24[0].value <= 1.0);
    CHECK(r.aber_eq27.value > 0.0);
    ExperimentConfig bad = cfg;
    bad.m_grid = {128, 64};
    CHECK_THROWS(run(bad));
}

TEST_CASE("figure datasets: schema, metadata, overwrite guard") {
    TempDir tmp;
    RunContext ctx;
    ctx.out_dir = tmp.path.string();
    ctx.seed = 5;
    ctx.trials = 300;  // smoke-level trial count
    figure("fig2", ctx);
    std::ifstream csv(tmp.path / "fig2.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "K,M,rate_emp,rate_lb");
    int rows = 0;
    std::string line;
    double rate_lb_k2 = 0.0;
    while (std::getline(csv, line)) {
        ++rows;
        if (line.rfind("2,100,", 0) == 0)
            rate_lb_k2 = std::stod(line.substr(line.rfind(',') + 1));
    }
    CHECK(rows == 2 * 19);
    const NetworkParams p = make_params_from_quality(100, 2, 1.0, 1.0, 0.5);
    CHECK(rate_lb_k2 == doctest::Approx(rate_lower_bound(p).c_lb).epsilon(1e-12));

    std::ifstream meta(tmp.path / "fig2.csv.meta.json");
    REQUIRE(meta.good());
    nlohmann::json j;
    meta >> j;
    CHECK(j["seed"] == 5);
    CHECK(j["trials"] == 300);
    CHECK(j.contains("columns"));

    CHECK_THROWS(figure("fig2", ctx));  // refuses to overwrite without force
    ctx.force = true;
    CHECK_NOTHROW(figure("fig2", ctx));
    CHECK_THROWS(figure("fig9", ctx));
}

TEST_CASE("fig3 dataset overlays the closed-form density") {
    TempDir tmp;
    RunContext ctx;
    ctx.out_dir = tmp.path.string();
    ctx.trials = 2000;
    figure("fig3", ctx);
    std::ifstream csv(tmp.path / "fig3.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "bin_lo,bin_hi,density_emp,density_eq23,K");
    // every row's analytic column should re-evaluate exactly
    const NetworkParams p10 = make_params_from_quality(200, 10, 10.0, 10.0, 0.8);
    const GammaMixParams g10 = gamma_mix_params(p10);
    std::string line;
    int checked = 0;
    while (std::getline(csv, line) && checked < 5) {
        std::stringstream ss(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        REQUIRE(cols.size() == 5);
        if (cols[4] != "10") continue;
        const double mid = 0.5 * (std::stod(cols[0]) + std::stod(cols[1]));
        CHECK(std::stod(cols[3]) == doctest::Approx(interference_pdf(mid, g10)).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked == 5);
}

TEST_CASE("scaling report JSON round-trips") {
    ScalingExponents e;
    e.r_k = Rational(1, 2);
    e.r_q = Rational(1, 2);
    e.k0 = 1.0;
    const std::string out = format_scale_report(e, true);
    const nlohmann::json j = nlohmann::json::parse(out);
    CHECK(j["r_s"] == "0");
    CHECK(j["binding_term"] == "relay-per-user-power");
    // feed the echoed exponents back through the parser
    ScalingExponents e2;
    e2.r_k = parse_rational(j["r_k"].get<std::string>());
    e2.r_p = parse_rational(j["r_p"].get<std::string>());
    e2.r_q = parse_rational(j["r_q"].get<std::string>());
    e2.r_c = parse_rational(j["r_c"].get<std::string>());
    const nlohmann::json j2 = nlohmann::json::parse(format_scale_report(e2, true));
    CHECK(j2["r_s"] == j["r_s"]);
}

TEST_CASE("negative control: a tampered d_e breaks the PDF fit") {
    // The acceptance KS machinery must actually be able to fail.
    const NetworkParams p = make_params_from_quality(200, 10, 10.0, 10.0, 0.8);
    const SampleSet s = simulate(p, 20000, 8);
    GammaMixParams good = gamma_mix_params(p);
    GammaMixParams bad = good;
    bad.d_e *= 1.2;
    auto ks = [&](const GammaMixParams& g) {
        std::vector<double> x(s.p_ie);
        std::sort(x.begin(), x.end());
        double worst = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double cdf = 1.0 - interference_tail(x[i], g);
            worst = std::max(worst, std::abs(double(i + 1) / x.size() - cdf));
            worst = std::max(worst, std::abs(double(i) / x.size() - cdf));
        }
        return worst;
    };
    const double ks_good = ks(good), ks_bad = ks(bad);
    CHECK(ks_good < 0.03);
    CHECK(ks_bad > 0.05);
    CHECK(ks_bad > ks_good);
}

TEST_CASE("acceptance runner: fast suites") {
    RunContext ctx;
    std::ostringstream os;
    CHECK(acceptance("scaling", ctx, os));
    CHECK(os.str().find("PASS scaling") != std::string::npos);
    std::ostringstream js;
    CHECK(acceptance("repro", ctx, js, true));
    const nlohmann::json j = nlohmann::json::parse(js.str());
    CHECK(j.is_array());
    CHECK(j[0]["criterion"] == "repro");
    CHECK(j[0]["pass"] == true);
    CHECK_THROWS(acceptance("bogus", ctx, os));
}
