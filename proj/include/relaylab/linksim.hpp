#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "relaylab/channel.hpp"
#include "relaylab/model_core.hpp"

namespace relaylab {

// The six normalized power terms of one trial, probed at one user.
struct SinrComponents {
    double p_se = 0, p_ie = 0, p_ne = 0, p_e1 = 0, p_e2 = 0, p_e3 = 0;
    int user = 1;                // 1-based probed index
    bool degenerate_k1 = false;  // K == 1: interference term reported as 0
};

// Closed-form a_e^2 normalizing the relay transmit power to Q.
double amplification_factor_sq(const NetworkParams& p);

SinrComponents sinr_components(const EstimatedChannel& est, const NetworkParams& p, int user);

// Eq.-(8)-style instantaneous SINR with the closed-form a_e baked in.
double instantaneous_sinr(const SinrComponents& c, const NetworkParams& p);

// Deterministic relay-noise term of the SINR denominator.
double relay_denominator_term(const NetworkParams& p);

enum class EstimationPath { direct, pilot };

struct SimulateOptions {
    EstimationPath path = EstimationPath::direct;
    bool average_all_users = false;  // average components over all K users per realization
    int threads = 1;
    bool validate_ae = false;  // also record empirical relay output power a_e^2 ||...||^2
};

// Per-trial records; reproducible bit-exactly from (seed, params, trials).
struct SampleSet {
    NetworkParams params;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    SimulateOptions options;
    std::vector<double> p_se, p_ie, p_ne, p_e1, p_e2, p_e3, sinr;
    std::vector<double> relay_power;  // only with validate_ae

    std::vector<double> denominator() const;  // SINR denominators per trial
};

SampleSet simulate(const NetworkParams& p, std::size_t trials, std::uint64_t seed,
                   const SimulateOptions& opt = {});

struct Histogram {
    std::vector<double> edges;       // bins + 1 entries
    std::vector<std::size_t> counts;
};

// Freedman-Diaconis width unless a bin count is forced.
Histogram make_histogram(const std::vector<double>& x, int bins = 0);

struct Moments {
    double mean = 0, variance = 0, scv = 0;
};

Moments running_moments(const std::vector<double>& x);

struct StatsOptions {
    std::vector<double> thresholds;  // outage gamma_th list, linear scale
    double mod_a = 0.5, mod_b = 1.0;
    int bins = 0;
};

struct EmpiricalStats {
    std::size_t trials = 0;
    Moments p_se, p_ie, p_ne, p_e1, p_e2, p_e3, sinr, denominator;
    Histogram sinr_hist, p_ie_hist;
    std::vector<double> thresholds;
    std::vector<double> outage;  // fraction of trials with SINR < gamma_th
    double rate = 0;             // 0.5 * mean log2(1 + SINR)
    double aber = 0;             // mean A erfc(sqrt(B SINR))
    double mod_a = 0.5, mod_b = 1.0;
};

EmpiricalStats empirical_stats(const SampleSet& s, const StatsOptions& opt = {});

// CSV: header `trial,P_se,P_ie,P_ne,P_e1,P_e2,P_e3,sinr`, full precision.
void write_samples_csv(const SampleSet& s, std::ostream& os);
// JSON object with keys mirroring EmpiricalStats.
void write_stats_json(const EmpiricalStats& st, std::ostream& os);

}  // namespace relaylab
