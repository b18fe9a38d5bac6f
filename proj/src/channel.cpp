#include "relaylab/channel.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace relaylab {

namespace {

CMatrix fill_matrix(Eigen::Index rows, Eigen::Index cols, double var, const TrialStream& ts,
                    Stream s) {
    CMatrix m(rows, cols);
    fill_cn(m.data(), std::size_t(rows) * std::size_t(cols), var, ts, s);
    return m;
}

}  // namespace

PilotConfig PilotConfig::dft(int tau, int K, double P_t) {
    if (tau < K) throw std::invalid_argument("pilot length must be at least K");
    if (!(P_t > 0.0)) throw std::invalid_argument("training power must be positive");
    PilotConfig pc;
    pc.tau = tau;
    pc.P_t = P_t;
    pc.Phi.resize(tau, K);
    const double scale = 1.0 / std::sqrt(double(tau));
    for (int t = 0; t < tau; ++t)
        for (int k = 0; k < K; ++k) {
            const double ang = -2.0 * M_PI * double(t) * double(k) / double(tau);
            pc.Phi(t, k) = std::polar(scale, ang);
        }
    return pc;
}

ChannelRealization draw_channels(int M, int K, const TrialStream& ts) {
    if (M < K || K < 1) throw std::invalid_argument("need M >= K >= 1");
    ChannelRealization ch;
    ch.F = fill_matrix(M, K, 1.0, ts, Stream::f_true);
    // G entry (k, m) sits at counter index k*M + m, so row k is one
    // contiguous counter span and can be regenerated on its own.
    ch.G = fill_matrix(M, K, 1.0, ts, Stream::g_true).transpose();
    return ch;
}

EstimatedChannel mmse_estimate_pilot(const ChannelRealization& ch, const PilotConfig& pc,
                                     const TrialStream& ts) {
    const int M = int(ch.F.rows());
    const int K = int(ch.F.cols());
    if (pc.tau < K) throw std::invalid_argument("pilot length must be at least K");
    if (std::isinf(pc.P_t)) throw std::invalid_argument("pilot path needs finite P_t");
    const double et = double(pc.tau) * pc.P_t;
    const double P_c = et / (et + 1.0);
    const double root = std::sqrt(et);

    EstimatedChannel est;
    est.P_c = P_c;

    // Uplink training: Y = sqrt(tau P_t) F Phi^T + N, filter back through
    // Phi^* and shrink by tau P_t / (1 + tau P_t).
    const CMatrix Nf = fill_matrix(M, pc.tau, 1.0, ts, Stream::pilot_noise_f);
    const CMatrix Yf = root * ch.F * pc.Phi.transpose() + Nf;
    est.F_hat = (Yf * pc.Phi.conjugate()) * (P_c / root);
    est.E_f = est.F_hat - ch.F;

    // Reciprocity: destinations send pilots, so the same pipeline runs on G^T.
    const CMatrix Ng = fill_matrix(M, pc.tau, 1.0, ts, Stream::pilot_noise_g);
    const CMatrix Yg = root * ch.G.transpose() * pc.Phi.transpose() + Ng;
    est.G_hat = ((Yg * pc.Phi.conjugate()) * (P_c / root)).transpose();
    est.E_g = est.G_hat - ch.G;
    return est;
}

EstimatedChannel mmse_estimate_direct(int M, int K, double P_c, const TrialStream& ts) {
    if (M < K || K < 1) throw std::invalid_argument("need M >= K >= 1");
    if (!(P_c > 0.0) || P_c > 1.0) throw std::invalid_argument("P_c must lie in (0,1]");
    EstimatedChannel est;
    est.P_c = P_c;
    est.F_hat = fill_matrix(M, K, P_c, ts, Stream::f_hat);
    est.E_f = fill_matrix(M, K, 1.0 - P_c, ts, Stream::e_f);
    CMatrix ghat_t(M, K), eg_t(M, K);
    fill_cn(ghat_t.data(), std::size_t(M) * K, P_c, ts, Stream::g_hat);
    fill_cn(eg_t.data(), std::size_t(M) * K, 1.0 - P_c, ts, Stream::e_g);
    est.G_hat = ghat_t.transpose();
    est.E_g = eg_t.transpose();
    return est;
}

void dump_matrix(const CMatrix& m, std::uint32_t kind, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path);
    const char magic[4] = {'M', 'M', 'R', 'L'};
    const std::uint32_t rows = std::uint32_t(m.rows());
    const std::uint32_t cols = std::uint32_t(m.cols());
    std::fwrite(magic, 1, 4, f);
    std::fwrite(&rows, 4, 1, f);
    std::fwrite(&cols, 4, 1, f);
    std::fwrite(&kind, 4, 1, f);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double re = m(r, c).real(), im = m(r, c).imag();
            std::fwrite(&re, 8, 1, f);
            std::fwrite(&im, 8, 1, f);
        }
    std::fclose(f);
}

CMatrix load_matrix(const std::string& path, std::uint32_t expect_kind) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open " + path);
    char magic[4];
    std::uint32_t rows = 0, cols = 0, kind = 0;
    if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "MMRL", 4) != 0) {
        std::fclose(f);
        throw std::runtime_error("bad magic in " + path);
    }
    if (std::fread(&rows, 4, 1, f) != 1 || std::fread(&cols, 4, 1, f) != 1 ||
        std::fread(&kind, 4, 1, f) != 1) {
        std::fclose(f);
        throw std::runtime_error("truncated header in " + path);
    }
    if (kind != expect_kind) {
        std::fclose(f);
        throw std::runtime_error("unexpected matrix kind in " + path);
    }
    CMatrix m(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c) {
            double re = 0, im = 0;
            if (std::fread(&re, 8, 1, f) != 1 || std::fread(&im, 8, 1, f) != 1) {
                std::fclose(f);
                throw std::runtime_error("truncated dump " + path);
            }
            m(r, c) = {re, im};
        }
    std::fclose(f);
    return m;
}

}  // namespace relaylab
