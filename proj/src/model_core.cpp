#include "relaylab/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relaylab {

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            // Accept plain integers and short decimals like "0.25".
            const auto dot = text.find('.');
            if (dot == std::string::npos) return Rational(std::stoll(text));
            const std::string frac = text.substr(dot + 1);
            if (frac.size() > 9) throw std::invalid_argument("too many decimals");
            long long den = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
            const long long whole = dot == 0 ? 0 : std::stoll(text.substr(0, dot));
            const long long num = std::stoll(frac.empty() ? "0" : frac);
            const bool neg = !text.empty() && text[0] == '-';
            return Rational(whole * den + (neg ? -num : num), den);
        }
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational: '" + text + "'");
    }
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

void NetworkParams::validate() const {
    if (M < 1 || K < 1) throw std::invalid_argument("M and K must be positive");
    if (K > M) throw std::invalid_argument("K must not exceed M");
    if (!(P > 0.0) || !(Q > 0.0)) throw std::invalid_argument("powers must be positive");
    if (tau < K) throw std::invalid_argument("pilot length must be at least K");
    if (!(P_t > 0.0)) throw std::invalid_argument("training power must be positive");
    if (!(P_c > 0.0) || P_c > 1.0) throw std::invalid_argument("P_c must lie in (0,1]");
}

double csi_quality(int tau, double P_t) {
    if (tau < 1) throw std::invalid_argument("tau must be >= 1");
    if (!(P_t > 0.0)) throw std::invalid_argument("P_t must be > 0");
    if (std::isinf(P_t)) return 1.0;
    const double et = double(tau) * P_t;
    return et / (et + 1.0);
}

NetworkParams make_params(int M, int K, double P, double Q, int tau, double P_t) {
    NetworkParams p{M, K, P, Q, tau, P_t, csi_quality(tau, P_t)};
    p.validate();
    return p;
}

NetworkParams make_params_from_quality(int M, int K, double P, double Q, double P_c) {
    if (!(P_c > 0.0) || P_c > 1.0) throw std::invalid_argument("P_c must lie in (0,1]");
    const double P_t = P_c < 1.0 ? P_c / (double(K) * (1.0 - P_c))
                                 : std::numeric_limits<double>::infinity();
    NetworkParams p{M, K, P, Q, K, P_t, P_c};
    p.validate();
    return p;
}

void ScalingExponents::validate() const {
    for (const auto* r : {&r_k, &r_p, &r_q, &r_c}) {
        if (*r < Rational(0) || *r > Rational(1))
            throw std::invalid_argument("scaling exponents must lie in [0,1]");
    }
    if (!(k0 > 0.0) || !(p0 > 0.0) || !(q0 > 0.0) || !(c0 > 0.0))
        throw std::invalid_argument("base constants must be positive");
}

SinrScaleReport scaling_exponent(const ScalingExponents& e) {
    e.validate();
    SinrScaleReport rep;
    const Rational relay = e.r_k + e.r_q;
    rep.binding_term = (e.r_p > relay) ? BindingTerm::source_power
                                       : BindingTerm::relay_per_user_power;
    const Rational worst = std::max(e.r_p, relay);
    rep.r_s = Rational(1) - e.r_c - worst;
    rep.favourable = rep.r_s >= Rational(0);
    rep.deterministic_sufficient = is_asymptotically_deterministic(e, rep.r_s);
    rep.linear_regime = linear_sinr_condition(e);
    return rep;
}

bool is_favourable(const ScalingExponents& e) {
    e.validate();
    return e.r_c + std::max(e.r_p, e.r_k + e.r_q) <= Rational(1);
}

bool is_asymptotically_deterministic(const ScalingExponents& e, const Rational& r_s) {
    e.validate();
    if (e.r_c + std::max(e.r_p, e.r_k + e.r_q) + r_s != Rational(1)) return false;
    if (2 * r_s + 2 * e.r_c + e.r_k > Rational(1)) return false;
    if (2 * r_s + 3 * e.r_c + 2 * e.r_p > Rational(2)) return false;
    return true;
}

bool is_asymptotically_deterministic(const ScalingExponents& e) {
    return is_asymptotically_deterministic(e, scaling_exponent(e).r_s);
}

bool linear_sinr_condition(const ScalingExponents& e) {
    e.validate();
    const Rational z(0);
    return e.r_k == z && e.r_p == z && e.r_q == z && e.r_c == z;
}

double pow_rational(int M, const Rational& r) {
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    if (r.numerator() == 0) return 1.0;
    const double v = std::pow(double(M), double(r.numerator()) / double(r.denominator()));
    // Snap to exact integers (e.g. 100^(1/2)) so floor() conventions hold.
    const double n = std::nearbyint(v);
    if (n >= 1.0 && std::abs(v - n) < 1e-9 * std::max(1.0, n)) return n;
    return v;
}

NetworkParams realize_parameters(const ScalingExponents& e, int M) {
    e.validate();
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    const double k_real = e.k0 * pow_rational(M, e.r_k);
    const int K = std::max(1, int(std::floor(k_real + 1e-12)));
    if (K > M) throw std::invalid_argument("realized K exceeds M");
    const double P = 1.0 / (e.p0 * pow_rational(M, e.r_p));
    const double Q = 1.0 / (e.q0 * pow_rational(M, e.r_q));
    const double P_c = std::min(1.0, 1.0 / (e.c0 * pow_rational(M, e.r_c)));
    return make_params_from_quality(M, K, P, Q, P_c);
}

}  // namespace relaylab
