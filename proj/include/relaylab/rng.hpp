#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>

namespace relaylab {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11 constants).
// Every random quantity in the simulator is addressed by an explicit
// (seed, trial, stream, index) tuple, so trials can run on any number of
// threads and still produce identical bits.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> x,
                                              std::array<std::uint32_t, 2> k) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(kMul0) * x[0];
            const std::uint64_t p1 = std::uint64_t(kMul1) * x[2];
            x = {std::uint32_t(p1 >> 32) ^ x[1] ^ k[0], std::uint32_t(p1),
                 std::uint32_t(p0 >> 32) ^ x[3] ^ k[1], std::uint32_t(p0)};
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        return x;
    }
};

// Substream labels. Disjoint labels make every matrix of a trial an
// independent, addressable lane of the counter space.
enum class Stream : std::uint32_t {
    f_true = 0,
    g_true = 1,
    pilot_noise_f = 2,
    pilot_noise_g = 3,
    f_hat = 4,
    e_f = 5,
    g_hat = 6,
    e_g = 7,
    symbols = 8,
    relay_noise = 9,
};

// Uniform in (0, 1] from one 64-bit lane; never returns 0 so log() is safe.
inline double unit_from(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t u = (std::uint64_t(hi) << 32) | lo;
    return double((u >> 11) + 1) * 0x1.0p-53;
}

// Identifies one trial of one experiment.
struct TrialStream {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
};

// CN(0, var) sample at counter position `idx` of stream `s`.
std::complex<double> cn_sample(const TrialStream& ts, Stream s, std::uint32_t idx, double var);

// Bulk fill: n consecutive counter positions starting at idx0.
void fill_cn(std::complex<double>* dst, std::size_t n, double var, const TrialStream& ts,
             Stream s, std::uint32_t idx0 = 0);

}  // namespace relaylab
