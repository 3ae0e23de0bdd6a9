#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace polarquant {

/// Binary vector: messages, codewords, CRC payloads. Elements are 0 or 1.
using BitBlock = std::vector<std::uint8_t>;

/// Polar code parameters. Frozen positions carry the value 0.
struct CodeConfig {
    int n = 0;                 // tree depth, N = 2^n
    int block_length = 0;      // N
    int info_length = 0;       // K = |info_set|
    std::vector<int> info_set; // strictly increasing indices < N

    void validate() const;

    /// 0/1 mask over all N positions, 1 = information position.
    std::vector<std::uint8_t> info_mask() const;
};

/// CRC over GF(2). `polynomial` holds the coefficients below the implicit
/// leading term, so x^16+x^12+x^5+1 with length 16 is 0x1021.
struct CrcConfig {
    std::uint32_t polynomial = 0x1021;
    std::uint32_t init = 0;
    int length = 16;
};

} // namespace polarquant
