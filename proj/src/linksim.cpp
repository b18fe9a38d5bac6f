#include "relaylab/linksim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "relaylab/analytics.hpp"

namespace relaylab {

double amplification_factor_sq(const NetworkParams& p) {
    p.validate();
    const double M = p.M, K = p.K, Pc = p.P_c;
    return p.Q / (p.P * K * Pc * Pc * Pc * M * M * M *
                  (1.0 + K / (M * Pc) + 1.0 / (p.P * Pc * M)));
}

double relay_denominator_term(const NetworkParams& p) {
    const double M = p.M, K = p.K, Pc = p.P_c;
    return K * Pc * Pc * Pc * (1.0 + K / (M * Pc) + 1.0 / (p.P * Pc * M)) / p.Q;
}

namespace {

struct Workspace {
    CMatrix Fh, Ef, Ft, gt;  // gt = G_hat^T, all M x K
    CVector eg;              // epsilon_{g,i} as a length-M column
    CVector w1, w2, v1, t;   // K vectors
    CVector u_est, v3, u, gvec;  // M vectors
    CMatrix gram_f, gram_g;  // K x K

    void resize(int M, int K) {
        Fh.resize(M, K); Ef.resize(M, K); Ft.resize(M, K); gt.resize(M, K);
        eg.resize(M); w1.resize(K); w2.resize(K); v1.resize(K); t.resize(K);
        u_est.resize(M); v3.resize(M); u.resize(M); gvec.resize(M);
        gram_f.resize(K, K); gram_g.resize(K, K);
    }
};

// Shared component core. Layout: Fh/Ef/Ft are M x K; gt is Ghat^T (M x K);
// eg is the error row of the probed user. `idx` is 0-based.
SinrComponents components_core(const Workspace& w, int M, int K, double Pc, int idx,
                               Workspace& scratch) {
    SinrComponents c;
    c.user = idx + 1;
    const double m3 = double(M) * M * M;
    const double m4 = m3 * M;

    scratch.w1.noalias() = w.gt.adjoint() * w.gt.col(idx);          // ghat_i Ghat^H
    scratch.w2.noalias() = w.Fh.adjoint() * w.Fh.col(idx);          // Fhat^H fhat_i
    const std::complex<double> num = scratch.w1.cwiseProduct(scratch.w2).sum();
    c.p_se = std::norm(num) / m4;

    scratch.u_est.noalias() = w.Fh.conjugate() * scratch.w1;        // ghat_i Ghat^H Fhat^H
    c.p_e2 = (1.0 - Pc) * scratch.u_est.squaredNorm() / m3;

    scratch.v3.noalias() = w.gt.conjugate() * scratch.w2;           // Ghat^H Fhat^H fhat_i
    c.p_e3 = (1.0 - Pc) * scratch.v3.squaredNorm() / m3;

    scratch.gvec = w.gt.col(idx) - w.eg;                            // true g_i (transposed)
    scratch.v1.noalias() = w.gt.adjoint() * scratch.gvec;           // g_i Ghat^H
    scratch.u.noalias() = w.Fh.conjugate() * scratch.v1;            // g_i Ghat^H Fhat^H
    c.p_ne = scratch.u.squaredNorm() / m3;

    if (K > 1) {
        scratch.t.noalias() = w.Ft.transpose() * scratch.u;         // g_i Ghat^H Fhat^H f_k
        double acc = 0.0;
        for (int k = 0; k < K; ++k)
            if (k != idx) acc += std::norm(scratch.t(k));
        c.p_ie = acc / ((K - 1) * m3);
    } else {
        c.p_ie = 0.0;
        c.degenerate_k1 = true;
    }

    // P_e1 = (1-Pc)^2/M^3 tr(Fhat^H Fhat Ghat Ghat^H); with A = gt^H gt we
    // have A(m,n) = (Ghat Ghat^H)(n,m), so the trace is sum G1 .* A.
    scratch.gram_f.noalias() = w.Fh.adjoint() * w.Fh;
    scratch.gram_g.noalias() = w.gt.adjoint() * w.gt;
    const double tr = scratch.gram_f.cwiseProduct(scratch.gram_g).sum().real();
    c.p_e1 = (1.0 - Pc) * (1.0 - Pc) / m3 * tr;
    return c;
}

void draw_direct(Workspace& w, int M, int K, double Pc, const TrialStream& ts, int idx) {
    fill_cn(w.Fh.data(), std::size_t(M) * K, Pc, ts, Stream::f_hat);
    fill_cn(w.Ef.data(), std::size_t(M) * K, 1.0 - Pc, ts, Stream::e_f);
    fill_cn(w.gt.data(), std::size_t(M) * K, Pc, ts, Stream::g_hat);
    fill_cn(w.eg.data(), std::size_t(M), 1.0 - Pc, ts, Stream::e_g,
            std::uint32_t(idx) * std::uint32_t(M));
    w.Ft = w.Fh - w.Ef;
}

}  // namespace

SinrComponents sinr_components(const EstimatedChannel& est, const NetworkParams& p, int user) {
    p.validate();
    if (user < 1 || user > p.K) throw std::invalid_argument("user index out of range");
    if (est.F_hat.rows() != p.M || est.F_hat.cols() != p.K)
        throw std::invalid_argument("estimate shape does not match params");
    Workspace w, scratch;
    w.resize(p.M, p.K);
    scratch.resize(p.M, p.K);
    w.Fh = est.F_hat;
    w.Ef = est.E_f;
    w.Ft = est.F_hat - est.E_f;
    w.gt = est.G_hat.transpose();
    w.eg = est.E_g.row(user - 1).transpose();
    return components_core(w, p.M, p.K, est.P_c, user - 1, scratch);
}

double instantaneous_sinr(const SinrComponents& c, const NetworkParams& p) {
    const double den = (p.K - 1) * c.p_ie + c.p_ne / p.P + c.p_e1 + c.p_e2 + c.p_e3 +
                       relay_denominator_term(p);
    return p.M * c.p_se / den;
}

std::vector<double> SampleSet::denominator() const {
    const double relay = relay_denominator_term(params);
    std::vector<double> d(trials);
    for (std::size_t t = 0; t < trials; ++t)
        d[t] = (params.K - 1) * p_ie[t] + p_ne[t] / params.P + p_e1[t] + p_e2[t] + p_e3[t] +
               relay;
    return d;
}

SampleSet simulate(const NetworkParams& p, std::size_t trials, std::uint64_t seed,
                   const SimulateOptions& opt) {
    p.validate();
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    if (opt.path == EstimationPath::pilot && !(p.P_t > 0.0 && std::isfinite(p.P_t)))
        throw std::invalid_argument("pilot path needs finite training power");

    SampleSet out;
    out.params = p;
    out.seed = seed;
    out.trials = trials;
    out.options = opt;
    for (auto* v : {&out.p_se, &out.p_ie, &out.p_ne, &out.p_e1, &out.p_e2, &out.p_e3, &out.sinr})
        v->resize(trials);
    if (opt.validate_ae) out.relay_power.resize(trials);

    const int M = p.M, K = p.K;
    const double ae2 = amplification_factor_sq(p);
    const int nthreads = std::max(1, opt.threads);

    auto run_range = [&](std::size_t lo, std::size_t hi) {
        Workspace w, scratch;
        w.resize(M, K);
        scratch.resize(M, K);
        CVector sym(K), nr(M), wx(K), y(M), x(M);
        for (std::size_t t = lo; t < hi; ++t) {
            const TrialStream ts{seed, t};
            SinrComponents c;
            if (opt.path == EstimationPath::direct && !opt.average_all_users) {
                draw_direct(w, M, K, p.P_c, ts, 0);
                c = components_core(w, M, K, p.P_c, 0, scratch);
            } else if (opt.path == EstimationPath::direct) {
                // Average the component vector over all K probes of one
                // realization (same mean as the single-user probe).
                fill_cn(w.Fh.data(), std::size_t(M) * K, p.P_c, ts, Stream::f_hat);
                fill_cn(w.Ef.data(), std::size_t(M) * K, 1.0 - p.P_c, ts, Stream::e_f);
                fill_cn(w.gt.data(), std::size_t(M) * K, p.P_c, ts, Stream::g_hat);
                w.Ft = w.Fh - w.Ef;
                SinrComponents acc;
                for (int i = 0; i < K; ++i) {
                    fill_cn(w.eg.data(), std::size_t(M), 1.0 - p.P_c, ts, Stream::e_g,
                            std::uint32_t(i) * std::uint32_t(M));
                    const SinrComponents ci = components_core(w, M, K, p.P_c, i, scratch);
                    acc.p_se += ci.p_se; acc.p_ie += ci.p_ie; acc.p_ne += ci.p_ne;
                    acc.p_e1 += ci.p_e1; acc.p_e2 += ci.p_e2; acc.p_e3 += ci.p_e3;
                    acc.degenerate_k1 = ci.degenerate_k1;
                }
                const double inv = 1.0 / K;
                c = acc;
                c.p_se *= inv; c.p_ie *= inv; c.p_ne *= inv;
                c.p_e1 *= inv; c.p_e2 *= inv; c.p_e3 *= inv;
                c.user = 0;
            } else {
                const ChannelRealization ch = draw_channels(M, K, ts);
                const PilotConfig pc = PilotConfig::dft(p.tau, K, p.P_t);
                const EstimatedChannel est = mmse_estimate_pilot(ch, pc, ts);
                c = sinr_components(est, p, 1);
            }
            out.p_se[t] = c.p_se; out.p_ie[t] = c.p_ie; out.p_ne[t] = c.p_ne;
            out.p_e1[t] = c.p_e1; out.p_e2[t] = c.p_e2; out.p_e3[t] = c.p_e3;
            out.sinr[t] = instantaneous_sinr(c, p);
            if (opt.validate_ae) {
                // Empirical relay output power a_e^2 ||Ghat^H Fhat^H x||^2.
                fill_cn(sym.data(), K, 1.0, ts, Stream::symbols);
                fill_cn(nr.data(), M, 1.0, ts, Stream::relay_noise);
                x.noalias() = std::sqrt(p.P) * (w.Ft * sym) + nr;
                wx.noalias() = w.Fh.adjoint() * x;
                y.noalias() = w.gt.conjugate() * wx;
                out.relay_power[t] = ae2 * y.squaredNorm();
            }
        }
    };

    if (nthreads == 1 || trials < 2 * std::size_t(nthreads)) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (trials + nthreads - 1) / nthreads;
        for (int j = 0; j < nthreads; ++j) {
            const std::size_t lo = std::size_t(j) * chunk;
            const std::size_t hi = std::min(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

Moments running_moments(const std::vector<double>& x) {
    // Welford with Neumaier-compensated M2 accumulation.
    double mean = 0.0, m2 = 0.0, comp = 0.0;
    std::size_t n = 0;
    for (double v : x) {
        ++n;
        const double d1 = v - mean;
        mean += d1 / double(n);
        const double term = d1 * (v - mean);
        const double s = m2 + term;
        comp += std::abs(m2) >= std::abs(term) ? (m2 - s) + term : (term - s) + m2;
        m2 = s;
    }
    Moments m;
    m.mean = mean;
    m.variance = n > 1 ? (m2 + comp) / double(n - 1) : 0.0;
    m.scv = mean != 0.0 ? m.variance / (mean * mean) : 0.0;
    return m;
}

Histogram make_histogram(const std::vector<double>& x, int bins) {
    Histogram h;
    if (x.empty()) return h;
    std::vector<double> sorted(x);
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front(), hi = sorted.back();
    int nbins = bins;
    if (nbins <= 0) {
        const double q1 = sorted[sorted.size() / 4];
        const double q3 = sorted[(3 * sorted.size()) / 4];
        const double width = 2.0 * (q3 - q1) / std::cbrt(double(sorted.size()));
        nbins = width > 0.0 ? std::max(1, int(std::ceil((hi - lo) / width))) : 1;
        nbins = std::min(nbins, 4096);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    h.edges.resize(nbins + 1);
    for (int b = 0; b <= nbins; ++b) h.edges[b] = lo + span * double(b) / nbins;
    h.counts.assign(nbins, 0);
    for (double v : x) {
        int b = int((v - lo) / span * nbins);
        b = std::clamp(b, 0, nbins - 1);
        ++h.counts[std::size_t(b)];
    }
    return h;
}

EmpiricalStats empirical_stats(const SampleSet& s, const StatsOptions& opt) {
    if (s.trials == 0) throw std::invalid_argument("empty sample set");
    EmpiricalStats st;
    st.trials = s.trials;
    st.p_se = running_moments(s.p_se);
    st.p_ie = running_moments(s.p_ie);
    st.p_ne = running_moments(s.p_ne);
    st.p_e1 = running_moments(s.p_e1);
    st.p_e2 = running_moments(s.p_e2);
    st.p_e3 = running_moments(s.p_e3);
    st.sinr = running_moments(s.sinr);
    st.denominator = running_moments(s.denominator());
    st.sinr_hist = make_histogram(s.sinr, opt.bins);
    st.p_ie_hist = make_histogram(s.p_ie, opt.bins);
    st.thresholds = opt.thresholds;
    st.mod_a = opt.mod_a;
    st.mod_b = opt.mod_b;
    for (double g : opt.thresholds) {
        std::size_t cnt = 0;
        for (double v : s.sinr) cnt += v < g;
        st.outage.push_back(double(cnt) / double(s.trials));
    }
    double rate = 0.0, rc = 0.0, ab = 0.0, ac = 0.0;
    for (double v : s.sinr) {
        // Neumaier sums; the reduction order is the trial order.
        const double r = 0.5 * std::log2(1.0 + v);
        double t = rate + r;
        rc += std::abs(rate) >= std::abs(r) ? (rate - t) + r : (r - t) + rate;
        rate = t;
        const double e = opt.mod_a * std::erfc(std::sqrt(opt.mod_b * v));
        t = ab + e;
        ac += std::abs(ab) >= std::abs(e) ? (ab - t) + e : (e - t) + ab;
        ab = t;
    }
    st.rate = (rate + rc) / double(s.trials);
    st.aber = (ab + ac) / double(s.trials);
    return st;
}

void write_stats_json(const EmpiricalStats& st, std::ostream& os) {
    nlohmann::json j;
    auto mom = [](const Moments& m) {
        return nlohmann::json{{"mean", m.mean}, {"variance", m.variance}, {"scv", m.scv}};
    };
    j["trials"] = st.trials;
    j["P_se"] = mom(st.p_se);
    j["P_ie"] = mom(st.p_ie);
    j["P_ne"] = mom(st.p_ne);
    j["P_e1"] = mom(st.p_e1);
    j["P_e2"] = mom(st.p_e2);
    j["P_e3"] = mom(st.p_e3);
    j["sinr"] = mom(st.sinr);
    j["denominator"] = mom(st.denominator);
    j["rate"] = st.rate;
    j["aber"] = st.aber;
    j["mod_a"] = st.mod_a;
    j["mod_b"] = st.mod_b;
    j["thresholds"] = st.thresholds;
    j["outage"] = st.outage;
    j["sinr_hist"] = {{"edges", st.sinr_hist.edges}, {"counts", st.sinr_hist.counts}};
    j["p_ie_hist"] = {{"edges", st.p_ie_hist.edges}, {"counts", st.p_ie_hist.counts}};
    os << j.dump(1) << "\n";
}

void write_samples_csv(const SampleSet& s, std::ostream& os) {
    os << "trial,P_se,P_ie,P_ne,P_e1,P_e2,P_e3,sinr\n";
    char line[512];
    for (std::size_t t = 0; t < s.trials; ++t) {
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t,
                      s.p_se[t], s.p_ie[t], s.p_ne[t], s.p_e1[t], s.p_e2[t], s.p_e3[t],
                      s.sinr[t]);
        os << line;
    }
}

}  // namespace relaylab
