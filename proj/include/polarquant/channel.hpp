#pragma once

#include <array>
#include <vector>

#include "polarquant/rng.hpp"
#include "polarquant/types.hpp"

namespace polarquant {

/// BPSK over AWGN at a given Eb/N0 and code rate.
struct NoiseConfig {
    double ebn0_db = 0.0;
    double rate = 0.5;
    double sigma = 1.0; // per-dimension noise standard deviation
};

double ebn0_to_sigma(double ebn0_db, double rate);
NoiseConfig make_noise(double ebn0_db, double rate);

/// Exact channel LLR of one BPSK symbol: s = 1-2bit, y = s + noise.
inline double symbol_llr(std::uint8_t bit, double noise, double sigma) {
    double s = bit ? -1.0 : 1.0;
    return 2.0 * (s + noise) / (sigma * sigma);
}

/// Per-symbol channel LLRs for a transmitted codeword.
std::vector<double> transmit(const BitBlock& x, const NoiseConfig& noise, RngStream& rng);

/// Fine discretization of the binary-input AWGN channel in the LLR domain.
/// Uniform bins over [-clip_llr, clip_llr], tail mass folded into the edge
/// bins; exactly symmetric: joint[i][0] == joint[mirror(i)][1].
struct FineChannel {
    std::vector<double> support;               // bin centers, ascending
    std::vector<std::array<double, 2>> joint;  // {p(x=0,bin), p(x=1,bin)}
    int bin_count = 0;
    double clip_llr = 0.0;
};

FineChannel discretize_channel(const NoiseConfig& noise, int bin_count = 2000,
                               double clip_llr = 24.0);

} // namespace polarquant
