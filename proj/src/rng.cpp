#include "relaylab/rng.hpp"

#include <cmath>

namespace relaylab {

namespace {

inline std::array<std::uint32_t, 4> raw_block(const TrialStream& ts, Stream s,
                                              std::uint32_t idx) {
    const std::array<std::uint32_t, 4> ctr = {idx, std::uint32_t(ts.trial),
                                              std::uint32_t(ts.trial >> 32),
                                              static_cast<std::uint32_t>(s)};
    const std::array<std::uint32_t, 2> key = {std::uint32_t(ts.seed),
                                              std::uint32_t(ts.seed >> 32)};
    return Philox4x32::block(ctr, key);
}

}  // namespace

std::complex<double> cn_sample(const TrialStream& ts, Stream s, std::uint32_t idx,
                               double var) {
    const auto b = raw_block(ts, s, idx);
    const double u1 = unit_from(b[0], b[1]);
    const double u2 = unit_from(b[2], b[3]);
    // Box-Muller pair; -log(u1) is the exponential radius^2 of a CN(0,1) draw.
    const double r = std::sqrt(-var * std::log(u1));
    return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
}

void fill_cn(std::complex<double>* dst, std::size_t n, double var, const TrialStream& ts,
             Stream s, std::uint32_t idx0) {
    // Split into plain loops so the compiler can vectorize the counter pass
    // and the libm pass independently.
    constexpr std::size_t kChunk = 512;
    double u[2 * kChunk];
    for (std::size_t base = 0; base < n; base += kChunk) {
        const std::size_t m = (n - base < kChunk) ? n - base : kChunk;
        for (std::size_t j = 0; j < m; ++j) {
            const auto b = raw_block(ts, s, idx0 + std::uint32_t(base + j));
            u[2 * j] = unit_from(b[0], b[1]);
            u[2 * j + 1] = unit_from(b[2], b[3]);
        }
        for (std::size_t j = 0; j < m; ++j) {
            const double r = std::sqrt(-var * std::log(u[2 * j]));
            const double a = 2.0 * M_PI * u[2 * j + 1];
            dst[base + j] = {r * std::cos(a), r * std::sin(a)};
        }
    }
}

}  // namespace relaylab
