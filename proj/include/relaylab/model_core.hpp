#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace relaylab {

// Exponent algebra is exact: the deterministic-SINR condition contains an
// equality constraint that floating comparison would misclassify.
using Rational = boost::rational<long long>;

Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);

// Concrete operating point of the relay network. Powers are linear scale.
struct NetworkParams {
    int M = 0;           // relay antennas
    int K = 0;           // source-destination pairs
    double P = 0.0;      // per-source data power
    double Q = 0.0;      // relay power budget
    int tau = 0;         // pilot length
    double P_t = 0.0;    // training power (may be +inf when P_c == 1)
    double P_c = 0.0;    // CSI quality, tau*P_t/(tau*P_t+1)

    double training_energy() const { return double(tau) * P_t; }
    void validate() const;
};

NetworkParams make_params(int M, int K, double P, double Q, int tau, double P_t);
// Builds the (tau, P_t) pair from a target quality instead (tau = K).
NetworkParams make_params_from_quality(int M, int K, double P, double Q, double P_c);

// CSI quality P_c = tau*P_t/(tau*P_t + 1); depends on inputs only through
// the training energy E_t = tau*P_t.
double csi_quality(int tau, double P_t);

// Relative scales of K, 1/P, 1/Q, 1/P_c against the antenna count:
//   K = k0*M^r_k, 1/P = p0*M^r_p, 1/Q = q0*M^r_q, 1/P_c = c0*M^r_c.
struct ScalingExponents {
    Rational r_k{0}, r_p{0}, r_q{0}, r_c{0};
    double k0 = 1.0, p0 = 1.0, q0 = 1.0, c0 = 1.0;

    void validate() const;
};

enum class BindingTerm { source_power, relay_per_user_power };

struct SinrScaleReport {
    Rational r_s;
    bool favourable = false;
    bool deterministic_sufficient = false;
    bool linear_regime = false;
    BindingTerm binding_term = BindingTerm::source_power;
};

// r_s = 1 - r_c - max(r_p, r_k + r_q), with the argmax label. Ties report
// relay-per-user-power.
SinrScaleReport scaling_exponent(const ScalingExponents& e);

// r_c + max(r_p, r_k + r_q) <= 1.
bool is_favourable(const ScalingExponents& e);

// Sufficient condition for the SINR to be asymptotically deterministic:
//   1) r_s + r_c + max(r_p, r_k+r_q) = 1
//   2) 2 r_s + 2 r_c + r_k <= 1
//   3) 2 r_s + 3 r_c + 2 r_p <= 2
//   4) all exponents in [0, 1]
// The two-argument form checks a caller-supplied r_s instead of Theorem-1's.
bool is_asymptotically_deterministic(const ScalingExponents& e);
bool is_asymptotically_deterministic(const ScalingExponents& e, const Rational& r_s);

// Average SINR grows linearly in M iff every other parameter stays constant.
bool linear_sinr_condition(const ScalingExponents& e);

// M^r for rational r, snapping to the exact integer when M^r is one.
double pow_rational(int M, const Rational& r);

// Concretizes the exponent model at finite M. K = max(1, floor(k0*M^r_k)),
// P_c is clamped into (0, 1], and a (tau = K, P_t) pair realizing P_c is
// synthesized. Throws if the realized K exceeds M.
NetworkParams realize_parameters(const ScalingExponents& e, int M);

}  // namespace relaylab
