#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "relaylab/channel.hpp"

using namespace relaylab;

namespace {

// Two-sample KS distance.
double ks2(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ks = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i;
        else ++j;
        ks = std::max(ks, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return ks;
}

}  // namespace

TEST_CASE("draw_channels is deterministic and well scaled") {
    const TrialStream ts{123, 5};
    const ChannelRealization a = draw_channels(4, 2, ts);
    const ChannelRealization b = draw_channels(4, 2, ts);
    CHECK(a.F == b.F);
    CHECK(a.G == b.G);
    CHECK(a.F.rows() == 4);
    CHECK(a.G.rows() == 2);
    CHECK(draw_channels(4, 2, {123, 6}).F != a.F);
    CHECK_THROWS_AS(draw_channels(2, 4, ts), std::invalid_argument);

    // E{||f_i||^2}/M -> 1 over many trials
    double acc = 0.0;
    const int n = 2000;
    for (int t = 0; t < n; ++t)
        acc += draw_channels(16, 1, {9, std::uint64_t(t)}).F.squaredNorm() / 16.0;
    CHECK(acc / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("pilot matrix is exactly orthonormal") {
    for (int tau : {2, 5, 8}) {
        const PilotConfig pc = PilotConfig::dft(tau, 2, 1.0);
        const CMatrix gram = pc.Phi.adjoint() * pc.Phi;
        CHECK((gram - CMatrix::Identity(2, 2)).norm() < 1e-12);
    }
    CHECK_THROWS_AS(PilotConfig::dft(1, 2, 1.0), std::invalid_argument);
}

TEST_CASE("pilot estimation: noiseless limit recovers the channel") {
    const TrialStream ts{77, 0};
    const ChannelRealization ch = draw_channels(8, 2, ts);
    const EstimatedChannel est = mmse_estimate_pilot(ch, PilotConfig::dft(2, 2, 1e12), ts);
    CHECK((est.F_hat - ch.F).norm() < 1e-4);
    CHECK((est.G_hat - ch.G).norm() < 1e-4);
    CHECK(est.P_c == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pilot estimation: entry variances at tau*P_t = 1") {
    // tau = K = 2, P_t = 0.5 -> P_c = 0.5; F_hat entries CN(0, 0.5),
    // errors CN(0, 0.5). 1e5 entries, 1% tolerance.
    const int M = 25, K = 2, trials = 1000;
    double v_hat = 0.0, v_err = 0.0, v_true = 0.0;
    std::complex<double> cross = 0.0;
    const PilotConfig pc = PilotConfig::dft(2, 2, 0.5);
    for (int t = 0; t < trials; ++t) {
        const TrialStream ts{2024, std::uint64_t(t)};
        const ChannelRealization ch = draw_channels(M, K, ts);
        const EstimatedChannel est = mmse_estimate_pilot(ch, pc, ts);
        v_hat += est.F_hat.squaredNorm();
        v_err += est.E_f.squaredNorm();
        v_true += est.true_F().squaredNorm();
        cross += est.F_hat.cwiseProduct(est.E_f.conjugate()).sum();
    }
    const double n = double(M) * K * trials;
    CHECK(v_hat / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(v_err / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(v_true / n == doctest::Approx(1.0).epsilon(0.01));
    // MMSE orthogonality: sample cross-covariance below 3 standard errors
    // of zero (entries have variance P_c*(1-P_c) = 0.25 per complex dim).
    const double se = std::sqrt(0.5 * 0.5 / n);
    CHECK(std::abs(cross.real() / n) < 3.0 * se);
    CHECK(std::abs(cross.imag() / n) < 3.0 * se);
}

TEST_CASE("filtered pilot noise has identity covariance") {
    // N_F = N Phi^* keeps i.i.d. CN(0,1) entries when Phi is orthonormal.
    const int tau = 4, K = 3, M = 10, trials = 3000;
    const PilotConfig pc = PilotConfig::dft(tau, K, 1.0);
    CMatrix cov = CMatrix::Zero(K, K);
    for (int t = 0; t < trials; ++t) {
        CMatrix N(M, tau);
        fill_cn(N.data(), std::size_t(M) * tau, 1.0, {55, std::uint64_t(t)},
                Stream::pilot_noise_f);
        const CMatrix nf = N * pc.Phi.conjugate();  // M x K
        cov += nf.adjoint() * nf / double(M);
    }
    cov /= double(trials);
    CHECK((cov - CMatrix::Identity(K, K)).cwiseAbs().maxCoeff() < 3.0 / std::sqrt(double(M) * trials));
}

TEST_CASE("direct path: edge cases and variances") {
    const TrialStream ts{31, 0};
    const EstimatedChannel perfect = mmse_estimate_direct(6, 2, 1.0, ts);
    CHECK(perfect.E_f.norm() == 0.0);
    CHECK(perfect.true_F() == perfect.F_hat);
    CHECK_THROWS_AS(mmse_estimate_direct(6, 2, 0.0, ts), std::invalid_argument);
    CHECK_THROWS_AS(mmse_estimate_direct(6, 2, 1.5, ts), std::invalid_argument);

    double v = 0.0;
    const int trials = 1000, M = 25, K = 2;
    for (int t = 0; t < trials; ++t)
        v += mmse_estimate_direct(M, K, 0.7, {32, std::uint64_t(t)}).true_F().squaredNorm();
    // independence sum: Var(F) = P_c + (1 - P_c) = 1
    CHECK(v / (double(M) * K * trials) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("pilot and direct paths agree in distribution (KS)") {
    // Pool |F_hat| entries from both paths at P_c = 0.5; two-sample KS on
    // 1e5-per-side samples stays below 0.01 when the laws agree.
    const int M = 25, K = 2, trials = 2000;
    const PilotConfig pc = PilotConfig::dft(2, 2, 0.5);
    std::vector<double> pilot_mag, direct_mag;
    pilot_mag.reserve(M * K * trials);
    direct_mag.reserve(M * K * trials);
    for (int t = 0; t < trials; ++t) {
        const TrialStream ts{404, std::uint64_t(t)};
        const ChannelRealization ch = draw_channels(M, K, ts);
        const EstimatedChannel ep = mmse_estimate_pilot(ch, pc, ts);
        const EstimatedChannel ed = mmse_estimate_direct(M, K, 0.5, ts);
        for (int c = 0; c < K; ++c)
            for (int r = 0; r < M; ++r) {
                pilot_mag.push_back(std::abs(ep.F_hat(r, c)));
                direct_mag.push_back(std::abs(ed.F_hat(r, c)));
            }
    }
    CHECK(ks2(pilot_mag, direct_mag) < 0.01);
}

TEST_CASE("binary dump round-trip") {
    const TrialStream ts{5, 9};
    const ChannelRealization ch = draw_channels(5, 3, ts);
    const std::string path = "test_dump.mmrl";
    dump_matrix(ch.F, 1, path);
    const CMatrix back = load_matrix(path, 1);
    CHECK(back == ch.F);
    CHECK_THROWS(load_matrix(path, 2));
    std::remove(path.c_str());
}
