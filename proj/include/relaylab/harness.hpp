#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "relaylab/analytics.hpp"
#include "relaylab/linksim.hpp"
#include "relaylab/model_core.hpp"

namespace relaylab {

// Experiment description. Powers arrive in dB at this boundary and are the
// only place dB lives; everything behind it is linear scale.
struct ExperimentConfig {
    std::string scenario = "custom";  // case1..case5, det1, det2b or custom
    std::optional<ScalingExponents> exponents;

    // Explicit operating point (used when no exponent model is given).
    int M = 0, K = 0;
    double p_db = 0.0, q_db = 0.0;
    std::optional<double> p_c;            // direct CSI quality...
    std::optional<int> tau;               // ...or a training pair
    std::optional<double> pt_db;

    std::vector<int> m_grid;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    std::vector<double> gamma_th_db;
    double mod_a = 0.5, mod_b = 1.0;
    int threads = 1;
    std::string out;
};

ExperimentConfig parse_config(std::istream& in);        // flat key=value
ExperimentConfig parse_config_json(std::istream& in);   // JSON alternative
std::string serialize_config(const ExperimentConfig& c);

// Named scenarios with the constants used throughout the figure datasets.
struct Scenario {
    std::string name;
    ScalingExponents exponents;
};
const std::vector<Scenario>& table1_scenarios();
const std::vector<Scenario>& determinism_scenarios();
std::optional<Scenario> find_scenario(const std::string& name);

// Raises c0 just enough that the realized P_c stays in (0,1] over a grid
// whose smallest antenna count is m_min.
ScalingExponents clamp_base_constants(ScalingExponents e, int m_min);

NetworkParams params_from_config(const ExperimentConfig& c, int M);

// One row of an experiment: realized point, empirical stats, analytic
// overlays and their validity flags.
struct ResultRecord {
    NetworkParams params;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    double wall_seconds = 0.0;
    EmpiricalStats stats;
    RateBound bound{};
    std::vector<Probability> outage_eq24, outage_eq25;
    AberResult aber_eq27{};
    bool high_snr_valid = false;
};

std::vector<ResultRecord> run(const ExperimentConfig& c);

// Shared execution options for figure datasets.
struct RunContext {
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int threads = 1;
    bool force = false;
    std::optional<std::size_t> trials;  // override per-figure default
};

// Figure datasets (CSV plus a .meta.json sidecar each).
void figure(const std::string& name, const RunContext& ctx);

// Human- or JSON-printed scaling report for one exponent tuple.
std::string format_scale_report(const ScalingExponents& e, bool json);

// Exit codes shared by the CLI.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_config = 2, exit_acceptance = 3 };

// Acceptance suites; returns true when every checked criterion passed.
// Names: scaling, slopes, moments, bound, pdf, outage, aber, determinism,
// repro, or "all".
bool acceptance(const std::string& suite, const RunContext& ctx, std::ostream& os,
                bool json_out = false);

}  // namespace relaylab
