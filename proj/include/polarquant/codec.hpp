#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "polarquant/types.hpp"

namespace polarquant {

/// pi(i) = n-bit reversal of i; an involution on {0..2^n-1}. n = 0 gives {0}.
std::vector<int> bit_reversal_permutation(int n);

/// Butterfly network F^{(x)n} over GF(2), natural index order. Self-inverse.
BitBlock polar_transform(const BitBlock& v);

/// x = F^{(x)n} B u.
BitBlock polar_encode(const BitBlock& u, const CodeConfig& cfg);

/// Scatter `payload` into the information positions of u (index order),
/// zeros elsewhere.
BitBlock build_message(const BitBlock& payload, const CodeConfig& cfg);

enum class Construction { nr5g, bhattacharyya };

/// K most reliable bit-channel indices for block length N.
/// nr5g filters the standardized 1024-entry reliability order (N <= 1024);
/// bhattacharyya folds z <- 2z-z^2 / z^2 over the bits of each index.
std::vector<int> construct_information_set(int N, int K, Construction method,
                                           double bhattacharyya_z0 = 0.5);

CodeConfig make_code_config(int N, int K, Construction method);

/// The 38.212 polar sequence, ascending reliability (entry 0 least reliable).
const std::array<std::uint16_t, 1024>& nr5g_reliability_sequence();

/// payload + remainder bits of the CRC long division.
BitBlock crc_attach(const BitBlock& payload, const CrcConfig& crc);
bool crc_check(const BitBlock& block, const CrcConfig& crc);

} // namespace polarquant
