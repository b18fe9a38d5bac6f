#pragma once

#include <Eigen/Dense>

#include <string>

#include "relaylab/rng.hpp"

namespace relaylab {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// True i.i.d. Rayleigh channels: F is source->relay (M x K), G is
// relay->destination (K x M), entries CN(0,1).
struct ChannelRealization {
    CMatrix F;
    CMatrix G;
};

// MMSE estimates and error matrices; E_f = F_hat - F, E_g = G_hat - G.
// Estimate entries are CN(0, P_c); error entries are CN(0, 1 - P_c) and
// independent of the estimates.
struct EstimatedChannel {
    CMatrix F_hat;
    CMatrix G_hat;
    CMatrix E_f;
    CMatrix E_g;
    double P_c = 0.0;

    CMatrix true_F() const { return F_hat - E_f; }
    CMatrix true_G() const { return G_hat - E_g; }
};

// Orthonormal pilot block: Phi is tau x K with Phi^H Phi = I_K.
struct PilotConfig {
    int tau = 0;
    double P_t = 0.0;
    CMatrix Phi;

    // First K columns of the tau-point DFT basis, unit columns; exactly
    // orthonormal and deterministic.
    static PilotConfig dft(int tau, int K, double P_t);
};

ChannelRealization draw_channels(int M, int K, const TrialStream& ts);

// Explicit pilot simulation: Y = sqrt(tau P_t) F Phi^T + N, then the MMSE
// filter. G is estimated the same way via TDD reciprocity (destinations
// send pilots).
EstimatedChannel mmse_estimate_pilot(const ChannelRealization& ch, const PilotConfig& pc,
                                     const TrialStream& ts);

// Distributional shortcut: F_hat ~ CN(0,P_c) and E_f ~ CN(0,1-P_c) drawn
// independently, F = F_hat - E_f. Joint law matches the pilot path.
EstimatedChannel mmse_estimate_direct(int M, int K, double P_c, const TrialStream& ts);

// Debug dump: 16-byte header (magic "MMRL", u32 M, u32 K, u32 kind) then
// row-major little-endian f64 pairs (re, im).
void dump_matrix(const CMatrix& m, std::uint32_t kind, const std::string& path);
CMatrix load_matrix(const std::string& path, std::uint32_t expect_kind);

}  // namespace relaylab
