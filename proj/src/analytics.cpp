#include "relaylab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relaylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(exp(a) - exp(b)) for a > b.
double log_diff_exp(double a, double b) { return a + std::log1p(-std::exp(b - a)); }

Probability from_log(double lp, bool clamped = false) {
    Probability out;
    out.log_value = lp;
    out.clamped = clamped;
    out.value = lp < -690.0 ? 0.0 : std::exp(lp);  // e^-690 ~ 1e-300
    if (out.value > 1.0) out.value = 1.0;
    return out;
}

}  // namespace

ComponentMoments component_moments(const NetworkParams& p) {
    p.validate();
    const double M = p.M, K = p.K, Pc = p.P_c;
    ComponentMoments m{};
    m.small_m_warning = p.M < 64;
    m.mean_se = std::pow(Pc, 4);
    m.scv_se = 8.0 / M;
    m.mean_ie = std::pow(Pc, 3) * (2.0 + K / (M * Pc));
    m.scv_ie = (4.0 / (K - 1) + (8.0 + 10.0 * Pc) / (Pc * M) +
                (K * K + 18.0 * (K - 2) * Pc) / ((K - 1) * Pc * Pc * M * M)) /
               (4.0 + K * K / (M * M * Pc * Pc) + 4.0 * K / (M * Pc));
    m.mean_ne = std::pow(Pc, 3) + K / M * Pc * Pc;
    m.scv_ne = (2.0 + 5.0 * Pc - 2.0 * Pc * Pc) / (M * Pc + K * K / (M * Pc) + 2.0 * K);
    m.mean_e1 = K / M * Pc * Pc * (1.0 - Pc) * (1.0 - Pc);
    m.scv_e1 = 3.0 / K;
    m.mean_e2 = m.mean_e3 = std::pow(Pc, 3) * (1.0 - Pc);
    m.scv_e2 = m.scv_e3 = 1.0;
    return m;
}

RateBound rate_lower_bound(const NetworkParams& p) {
    p.validate();
    const double M = p.M, K = p.K, Pc = p.P_c, P = p.P, Q = p.Q;
    const double den = 2.0 * K / (M * Pc) + K * K / (M * M * Pc * Pc) + 1.0 / (M * P * Pc) +
                       K / (M * M * P * Pc * Pc) + K / (M * Pc * Q) +
                       K * K / (M * M * Pc * Pc * Q) + K / (M * M * P * Pc * Pc * Q);
    RateBound rb;
    rb.tilde_sinr = 1.0 / den;
    rb.c_lb = 0.5 * std::log2(1.0 + rb.tilde_sinr);
    return rb;
}

double xi_term(const NetworkParams& p) {
    const double M = p.M, K = p.K, Pc = p.P_c;
    return (1.0 / p.P + K / p.Q) * (1.0 / Pc + K / (M * Pc * Pc)) + 2.0 * (1.0 / Pc - 1.0) +
           K / M * (1.0 / Pc - 1.0) * (1.0 / Pc - 1.0);
}

double linear_regime_sinr(double p_ie, const NetworkParams& p) {
    p.validate();
    if (p_ie < 0.0) throw std::invalid_argument("interference power must be nonnegative");
    const double den = p_ie * (p.K - 1) / std::pow(p.P_c, 4) + xi_term(p);
    if (den <= 0.0) return kInf;
    return p.M / den;
}

GammaMixParams gamma_mix_params(const NetworkParams& p, bool simplified) {
    p.validate();
    if (p.K < 2) throw std::invalid_argument("gamma mixture needs K >= 2");
    const double M = p.M, K = p.K, Pc = p.P_c;
    const double corr = simplified ? 0.0 : K / (M * Pc);
    GammaMixParams g;
    g.rho_e = (1.0 / std::sqrt(M)) * std::sqrt(4.0 / Pc + 10.0) / (2.0 + corr);
    g.b_e = (K - 1) * g.rho_e;
    g.c_e = 1.0 - g.rho_e;
    g.d_e = std::pow(Pc, 3) / (K - 1) * (2.0 + corr);
    g.K = p.K;
    g.M = p.M;
    g.P_c = Pc;
    return g;
}

int series_truncation(const GammaMixParams& g, double eps) {
    const double r = g.weight_ratio();
    // tail weight after J terms: r^(J+1) / (1 - r)
    const int J = int(std::ceil(std::log(eps * (1.0 - r)) / std::log(r))) - 1;
    return std::max(J, g.K);
}

namespace {

double interference_pdf_series(double y, const GammaMixParams& g, int J) {
    if (y == 0.0) return g.K == 2 ? 1.0 / g.d_e : 0.0;
    const double beta = g.d_e * g.c_e;
    const double r = g.weight_ratio();
    const double log_w0 = std::log1p(-r);  // log(c/(b+c))
    const double log_y = std::log(y), log_beta = std::log(beta), log_r = std::log(r);
    double acc = 0.0;
    for (int i = 0; i <= J; ++i) {
        const int alpha = g.K - 1 + i;
        const double lt = log_w0 + i * log_r + (alpha - 1) * log_y - y / beta -
                          alpha * log_beta - std::lgamma(alpha);
        acc += std::exp(lt);
    }
    return acc;
}

double log_sum_exp_step(double acc, double term) {
    if (acc == -kInf) return term;
    return std::max(acc, term) + std::log1p(std::exp(-std::abs(acc - term)));
}

}  // namespace

double interference_pdf(double y, const GammaMixParams& g, PdfForm form, int J) {
    if (y < 0.0) throw std::invalid_argument("density argument must be >= 0");
    if (g.K < 2) throw std::invalid_argument("need K >= 2");
    if (form == PdfForm::series) {
        if (J < 0) J = series_truncation(g);
        return interference_pdf_series(y, g, J);
    }
    const double b = g.b_e, c = g.c_e, d = g.d_e;
    const int K = g.K;
    if (K == 2) return std::exp(-y / (d * (b + c))) / (d * (b + c));
    if (y == 0.0) return 0.0;
    // Both branches in log space: la for the heavy-tail exponential, lb for
    // e^{-y/(dc)} sum_{n<=K-3} (by/(dc(b+c)))^n / n!.
    const double la = -y / (d * (b + c));
    const double z = b * y / (d * c * (b + c));
    double lsum = -kInf;
    for (int n = 0; n <= K - 3; ++n)
        lsum = log_sum_exp_step(lsum, n * std::log(z) - std::lgamma(n + 1));
    const double lb = -y / (d * c) + lsum;
    // The difference loses six digits once la - lb < ~1e-6; the series is
    // exact there, so use it instead.
    if (!(la - lb > 1.0000005e-6))
        return interference_pdf_series(y, g, series_truncation(g));
    const double log_coef = (K - 3) * std::log(b + c) - std::log(d) - (K - 2) * std::log(b);
    return std::exp(log_coef + log_diff_exp(la, lb));
}

double interference_tail(double y, const GammaMixParams& g) {
    if (y < 0.0) throw std::invalid_argument("tail argument must be >= 0");
    const double b = g.b_e, c = g.c_e, d = g.d_e;
    const int K = g.K;
    if (K == 2) return std::exp(-y / (d * (b + c)));
    const double r = g.weight_ratio();
    const double first = (2 - K) * std::log(r) - y / (d * (b + c));
    double sum = 0.0;
    for (int n = 0; n <= K - 3; ++n)
        sum += std::pow(r, n - K + 2) * regularized_gamma_q(n + 1, y / (d * c));
    const double tail = std::exp(first) - c / (b + c) * sum;
    return std::clamp(tail, 0.0, 1.0);
}

OutageContext outage_context(double gamma_th, const NetworkParams& p) {
    p.validate();
    if (!(gamma_th > 0.0)) throw std::invalid_argument("threshold must be positive");
    const GammaMixParams g = gamma_mix_params(p);
    OutageContext ctx;
    ctx.gamma_th = gamma_th;
    ctx.xi = xi_term(p);
    ctx.D = (2.0 * (1.0 - p.P_c) + 1.0 / p.P + double(p.K) / p.Q) * std::pow(p.P_c, 3) /
            ((p.K - 1) * g.d_e * (g.b_e + g.c_e));
    ctx.support_sup = p.M / ctx.xi;
    ctx.et_large = p.training_energy() >= 10.0;
    const double bound = gamma_th * (2.0 * g.d_e * g.c_e * (1.0 + g.c_e / g.b_e) * p.K * (p.K - 1) +
                                     1.0 / p.P + double(p.K) / p.Q);
    ctx.m_large = p.M >= 10.0 * bound;
    return ctx;
}

Probability outage_probability(double gamma_th, const NetworkParams& p, OutageForm form) {
    const OutageContext ctx = outage_context(gamma_th, p);
    const GammaMixParams g = gamma_mix_params(p);
    if (form == OutageForm::exact) {
        if (gamma_th >= ctx.support_sup) return Probability{1.0, 0.0, false};
        const double y = (p.M / gamma_th - ctx.xi) * std::pow(p.P_c, 4) / (p.K - 1);
        const double b = g.b_e, c = g.c_e, d = g.d_e;
        const double la = (2 - g.K) * std::log(g.weight_ratio()) - y / (d * (b + c));
        if (g.K == 2) return from_log(la);
        double lsum = -kInf;
        for (int n = 0; n <= g.K - 3; ++n)
            lsum = log_sum_exp_step(
                lsum, (n - g.K + 2) * std::log(g.weight_ratio()) +
                          log_upper_incomplete_gamma(n + 1, y / (d * c)) - std::lgamma(n + 1));
        const double lb = std::log(c / (b + c)) + lsum;
        if (lb >= la) return from_log(-kInf);
        return from_log(log_diff_exp(la, lb));
    }
    // High-SNR form, Prop. 4.
    if (gamma_th >= ctx.support_sup) return Probability{1.0, 0.0, true};
    const double lp = (2 - g.K) * std::log(g.weight_ratio()) + ctx.D -
                      p.M * std::pow(p.P_c, 4) /
                          (gamma_th * (p.K - 1) * g.d_e * (g.b_e + g.c_e));
    return from_log(lp, lp > 0.0);
}

double sinr_pdf(double r, const NetworkParams& p) {
    p.validate();
    const double xi = xi_term(p);
    const double sup = p.M / xi;
    if (!(r > 0.0) || r >= sup) return 0.0;
    const GammaMixParams g = gamma_mix_params(p);
    const double M = p.M, K = p.K, Pc = p.P_c;
    const double b = g.b_e, c = g.c_e, d = g.d_e;
    const double z = M / r - xi;
    if (!(z > 0.0)) return 0.0;
    // Deep left tail: the mixture density underflows long before the
    // Jacobian overflows, so settle it in log space first.
    const double y_of_r = z * std::pow(Pc, 4) / (K - 1);
    if (y_of_r / (d * (b + c)) > 690.0) return 0.0;
    const double lead = (K - 3) * std::log(b + c) + std::log(M) + 4.0 * std::log(Pc) -
                        2.0 * std::log(r) - std::log((K - 1) * d) - (K - 2) * std::log(b) -
                        z * std::pow(Pc, 4) / ((K - 1) * d * (b + c));
    if (K == 2) return std::exp(lead);
    double sum_log = -kInf;
    for (int n = 0; n <= K - 3; ++n)
        sum_log = log_sum_exp_step(
            sum_log, (K - n - 3) * std::log(b + c) + std::log(M) + (4.0 * n + 4.0) * std::log(Pc) -
                         std::lgamma(n + 1) - (n + 1) * std::log((K - 1) * d) - n * std::log(c) -
                         (K - n - 2) * std::log(b) + n * std::log(z) - 2.0 * std::log(r) -
                         z * std::pow(Pc, 4) / ((K - 1) * d * c));
    const double first = std::exp(lead);
    const double second = std::exp(sum_log);
    if (second >= first) {
        // Cancellation region near the support edge: change of variables on
        // the series form is exact and stable.
        const double y = z * std::pow(Pc, 4) / (K - 1);
        const double jac = M * std::pow(Pc, 4) / (r * r * (K - 1));
        return interference_pdf(y, g, PdfForm::series) * jac;
    }
    return first - second;
}

AberResult aber(const NetworkParams& p, double A, double B) {
    p.validate();
    if (!(A > 0.0) || A > 1.0 || !(B > 0.0)) throw std::invalid_argument("bad modulation constants");
    const GammaMixParams g = gamma_mix_params(p);
    const OutageContext ctx = outage_context(1.0, p);  // D and xi do not depend on gamma_th
    AberResult out;
    const double scale = (p.K - 1) * g.d_e * (g.b_e + g.c_e);
    const double lp = std::log(A) + (2 - g.K) * std::log(g.weight_ratio()) + ctx.D -
                      2.0 * p.P_c * p.P_c * std::sqrt(B * p.M / scale);
    out.clamped = lp > std::log(A);
    out.log_value = lp;
    out.value = lp < -690.0 ? 0.0 : std::min(std::exp(lp), 1.0);
    const double bound = 2.0 * g.d_e * g.c_e * (1.0 + g.c_e / g.b_e) * p.K * (p.K - 1) +
                         1.0 / p.P + double(p.K) / p.Q;
    out.valid = p.training_energy() >= 10.0 && p.M >= 10.0 * bound;
    out.bridge_gamma_th = std::sqrt(p.M * std::pow(p.P_c, 4) / (4.0 * B * scale));
    return out;
}

double upper_incomplete_gamma(int s, double x) {
    return std::exp(log_upper_incomplete_gamma(s, x));
}

double log_upper_incomplete_gamma(int s, double x) {
    if (s < 1) throw std::invalid_argument("integer order must be >= 1");
    if (x < 0.0) throw std::invalid_argument("x must be >= 0");
    if (x == 0.0) return std::lgamma(s);
    // Gamma(s, x) = (s-1)! e^-x sum_{m=0}^{s-1} x^m/m!
    const double lx = std::log(x);
    double lsum = -kInf;
    for (int m = 0; m < s; ++m) lsum = log_sum_exp_step(lsum, m * lx - std::lgamma(m + 1));
    return std::lgamma(s) - x + lsum;
}

double regularized_gamma_q(int s, double x) {
    return std::exp(log_upper_incomplete_gamma(s, x) - std::lgamma(s));
}

double erfc(double x) { return std::erfc(x); }

std::vector<double> mixture_weights_recursive(const CorrelatedGammaSum& s, int J) {
    const std::size_t n = s.eigenvalues.size();
    if (n == 0) throw std::invalid_argument("need at least one eigenvalue");
    for (double e : s.eigenvalues)
        if (!(e > 0.0)) throw std::invalid_argument("eigenvalues must be positive");
    const double s1 = s.eigenvalues.front();
    // Power sums q_m = sum_i (1 - s1/sigma_i)^m feed the recursion.
    std::vector<double> delta(J + 1, 0.0);
    delta[0] = 1.0;
    std::vector<double> q(J + 2, 0.0);
    for (int m = 1; m <= J + 1; ++m) {
        double acc = 0.0;
        for (double e : s.eigenvalues) acc += std::pow(1.0 - s1 / e, m);
        q[m] = acc;
    }
    for (int j = 0; j < J; ++j) {
        double acc = 0.0;
        for (int m = 1; m <= j + 1; ++m) acc += q[m] * delta[j + 1 - m];
        delta[j + 1] = acc / (j + 1);
    }
    return delta;
}

double correlated_gamma_sum_pdf(const CorrelatedGammaSum& s, double y, double eps) {
    if (y < 0.0) throw std::invalid_argument("density argument must be >= 0");
    const int n = int(s.eigenvalues.size());
    if (n == 0) throw std::invalid_argument("need at least one eigenvalue");
    std::vector<double> eig = s.eigenvalues;
    std::sort(eig.begin(), eig.end());
    const double s1 = eig.front();
    if (!(s1 > 0.0)) throw std::invalid_argument("eigenvalues must be positive");
    double log_pref = 0.0;
    for (double e : eig) log_pref += std::log(s1 / e);
    if (y == 0.0) return n == 1 ? std::exp(log_pref) / s1 : 0.0;

    CorrelatedGammaSum sorted{eig};
    const int kMaxJ = 4096;
    std::vector<double> delta = mixture_weights_recursive(sorted, kMaxJ);
    const double ly = std::log(y), ls = std::log(s1);
    double acc = 0.0;
    int quiet = 0;
    for (int j = 0; j <= kMaxJ; ++j) {
        if (delta[j] == 0.0) continue;
        const int shape = n + j;
        const double lt = std::log(delta[j]) + (shape - 1) * ly - y / s1 - shape * ls -
                          std::lgamma(shape);
        const double term = std::exp(log_pref + lt);
        acc += term;
        if (j >= n && term < eps * std::max(acc, 1e-300)) {
            if (++quiet >= 8) break;
        } else {
            quiet = 0;
        }
    }
    return acc;
}

}  // namespace relaylab
