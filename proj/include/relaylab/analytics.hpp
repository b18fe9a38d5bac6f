#pragma once

#include <vector>

#include "relaylab/model_core.hpp"

namespace relaylab {

// Large-M means and squared coefficients of variation of the six SINR
// component powers.
struct ComponentMoments {
    double mean_se, scv_se;
    double mean_ie, scv_ie;
    double mean_ne, scv_ne;
    double mean_e1, scv_e1;
    double mean_e2, scv_e2;
    double mean_e3, scv_e3;
    bool small_m_warning = false;  // set below M = 64
};

ComponentMoments component_moments(const NetworkParams& p);

struct RateBound {
    double tilde_sinr;  // asymptotic effective SINR
    double c_lb;        // bits per channel use, 0.5*log2(1 + tilde_sinr)
};

RateBound rate_lower_bound(const NetworkParams& p);

// Linear-SINR-regime approximation: everything deterministic except the
// supplied interference draw. Returns +inf when the denominator vanishes.
double linear_regime_sinr(double p_ie, const NetworkParams& p);

// Deterministic denominator offset of the linear-regime SINR.
double xi_term(const NetworkParams& p);

// Parameters of the correlated-gamma interference model.
struct GammaMixParams {
    double rho_e, b_e, c_e, d_e;
    int K = 0, M = 0;
    double P_c = 0.0;

    double weight_ratio() const { return b_e / (b_e + c_e); }
};

// Set `simplified` to drop the K/(M*P_c) correction (high-quality-CSI
// shortcut; sensitivity studies only).
GammaMixParams gamma_mix_params(const NetworkParams& p, bool simplified = false);

enum class PdfForm { series, closed };

// Truncation length giving geometric tail weight r^(J+1)/(1-r) <= eps.
int series_truncation(const GammaMixParams& g, double eps = 1e-12);

// PDF of the interference power P_ie. The closed form is evaluated in
// log space and falls back to the series when the two-branch difference
// cancels below 1e-6 relative. K = 2 is the exponential special case.
double interference_pdf(double y, const GammaMixParams& g, PdfForm form = PdfForm::closed,
                        int J = -1);

// P(P_ie > y); shared by the outage exact form and CDF-based tests.
double interference_tail(double y, const GammaMixParams& g);

// Outage context: threshold transform and Prop. 4/5 validity flags,
// with "much greater" operationalized as a factor of 10.
struct OutageContext {
    double gamma_th = 0.0;
    double xi = 0.0;
    double D = 0.0;
    double support_sup = 0.0;  // M/xi
    bool et_large = false;     // E_t >> 1
    bool m_large = false;      // M >> threshold-dependent bound
};

OutageContext outage_context(double gamma_th, const NetworkParams& p);

enum class OutageForm { exact, high_snr };

// A probability in linear and log domains. `clamped` marks a high-SNR
// approximation that exceeded 1 before clamping. Linear values below
// 1e-300 are reported as 0 with the log channel carrying the value.
struct Probability {
    double value = 0.0;
    double log_value = 0.0;
    bool clamped = false;
};

Probability outage_probability(double gamma_th, const NetworkParams& p, OutageForm form);

// PDF of the SINR in the linear regime; zero outside (0, M/xi).
double sinr_pdf(double r, const NetworkParams& p);

struct AberResult {
    double value = 0.0;
    double log_value = 0.0;
    bool clamped = false;
    bool valid = false;        // Prop. 5 precondition at factor 10
    double bridge_gamma_th = 0.0;  // threshold where ABER = A * outage
};

AberResult aber(const NetworkParams& p, double A, double B);

// Upper incomplete gamma for integer order: Gamma(n+1, x) as the exact
// finite sum n! e^-x sum_m x^m/m!, evaluated in log space for large x.
double upper_incomplete_gamma(int s, double x);
double log_upper_incomplete_gamma(int s, double x);
// Regularized Q(s, x) = Gamma(s, x)/Gamma(s).
double regularized_gamma_q(int s, double x);

double erfc(double x);

// Sum of n correlated unit-shape gammas with equal-scale structure given by
// the covariance eigenvalues (ascending). The mixture weights come from the
// general recursive rule; the equicorrelated case reduces to the geometric
// weights used by interference_pdf.
struct CorrelatedGammaSum {
    std::vector<double> eigenvalues;  // ascending, all positive
};

double correlated_gamma_sum_pdf(const CorrelatedGammaSum& s, double y, double eps = 1e-12);

// Recursive mixture weights delta_0..delta_J for the eigenvalue set.
std::vector<double> mixture_weights_recursive(const CorrelatedGammaSum& s, int J);

}  // namespace relaylab
