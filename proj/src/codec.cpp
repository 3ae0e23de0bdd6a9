#include "polarquant/codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polarquant {

void CodeConfig::validate() const {
    if (n < 0 || block_length != (1 << n))
        throw std::invalid_argument("CodeConfig: N must equal 2^n");
    if (info_length <= 0 || info_length > block_length)
        throw std::invalid_argument("CodeConfig: need 0 < K <= N");
    if (static_cast<int>(info_set.size()) != info_length)
        throw std::invalid_argument("CodeConfig: |info_set| != K");
    for (std::size_t i = 0; i < info_set.size(); ++i) {
        if (info_set[i] < 0 || info_set[i] >= block_length)
            throw std::invalid_argument("CodeConfig: info index out of range");
        if (i > 0 && info_set[i] <= info_set[i - 1])
            throw std::invalid_argument("CodeConfig: info_set not strictly increasing");
    }
}

std::vector<std::uint8_t> CodeConfig::info_mask() const {
    std::vector<std::uint8_t> mask(block_length, 0);
    for (int i : info_set) mask[i] = 1;
    return mask;
}

std::vector<int> bit_reversal_permutation(int n) {
    if (n < 0) throw std::invalid_argument("bit_reversal_permutation: n < 0");
    const int size = 1 << n;
    std::vector<int> perm(size);
    for (int i = 0; i < size; ++i) {
        int r = 0;
        for (int b = 0; b < n; ++b) r |= ((i >> b) & 1) << (n - 1 - b);
        perm[i] = r;
    }
    return perm;
}

BitBlock polar_transform(const BitBlock& v) {
    const int size = static_cast<int>(v.size());
    if (size == 0 || (size & (size - 1)) != 0)
        throw std::invalid_argument("polar_transform: length must be a power of two");
    BitBlock x = v;
    for (int h = 1; h < size; h <<= 1)
        for (int i = 0; i < size; i += 2 * h)
            for (int j = i; j < i + h; ++j) x[j] ^= x[j + h];
    return x;
}

BitBlock polar_encode(const BitBlock& u, const CodeConfig& cfg) {
    if (static_cast<int>(u.size()) != cfg.block_length)
        throw std::invalid_argument("polar_encode: length mismatch");
    const auto perm = bit_reversal_permutation(cfg.n);
    BitBlock v(u.size());
    for (int i = 0; i < cfg.block_length; ++i) v[i] = u[perm[i]];
    return polar_transform(v);
}

BitBlock build_message(const BitBlock& payload, const CodeConfig& cfg) {
    if (payload.size() != cfg.info_set.size())
        throw std::invalid_argument("build_message: payload length != |info_set|");
    BitBlock u(cfg.block_length, 0);
    for (std::size_t j = 0; j < payload.size(); ++j) u[cfg.info_set[j]] = payload[j];
    return u;
}

std::vector<int> construct_information_set(int N, int K, Construction method,
                                           double bhattacharyya_z0) {
    if (N <= 0 || (N & (N - 1)) != 0)
        throw std::invalid_argument("construct_information_set: N must be a power of two");
    if (K > N || K <= 0)
        throw std::invalid_argument("construct_information_set: need 0 < K <= N");

    std::vector<int> picked;
    picked.reserve(K);
    if (method == Construction::nr5g) {
        if (N > 1024)
            throw std::invalid_argument("construct_information_set: nr5g sequence covers N <= 1024");
        const auto& seq = nr5g_reliability_sequence();
        // walk from the most reliable end, keeping indices < N
        for (int i = 1023; i >= 0 && static_cast<int>(picked.size()) < K; --i)
            if (seq[i] < N) picked.push_back(seq[i]);
    } else {
        int n = 0;
        while ((1 << n) < N) ++n;
        std::vector<double> z(N);
        for (int i = 0; i < N; ++i) {
            double zi = bhattacharyya_z0;
            for (int b = n - 1; b >= 0; --b)
                zi = ((i >> b) & 1) ? zi * zi : 2.0 * zi - zi * zi;
            z[i] = zi;
        }
        std::vector<int> order(N);
        for (int i = 0; i < N; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return z[a] < z[b]; });
        picked.assign(order.begin(), order.begin() + K);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

CodeConfig make_code_config(int N, int K, Construction method) {
    CodeConfig cfg;
    cfg.block_length = N;
    cfg.n = 0;
    while ((1 << cfg.n) < N) ++cfg.n;
    cfg.info_length = K;
    cfg.info_set = construct_information_set(N, K, method);
    cfg.validate();
    return cfg;
}

namespace {

// Long division of block * x^len by (x^len + polynomial); returns remainder bits.
BitBlock crc_remainder(const BitBlock& block, const CrcConfig& crc) {
    const int len = crc.length;
    std::uint32_t reg = crc.init & ((len >= 32) ? 0xFFFFFFFFu : ((1u << len) - 1));
    const std::uint32_t top = 1u << (len - 1);
    for (std::uint8_t bit : block) {
        std::uint32_t fb = ((reg >> (len - 1)) ^ bit) & 1u;
        reg = (reg << 1) & ((top << 1) - 1);
        if (fb) reg ^= crc.polynomial;
    }
    BitBlock rem(len);
    for (int i = 0; i < len; ++i) rem[i] = (reg >> (len - 1 - i)) & 1u;
    return rem;
}

} // namespace

BitBlock crc_attach(const BitBlock& payload, const CrcConfig& crc) {
    if (payload.empty()) throw std::invalid_argument("crc_attach: empty payload");
    BitBlock out = payload;
    BitBlock rem = crc_remainder(payload, crc);
    out.insert(out.end(), rem.begin(), rem.end());
    return out;
}

bool crc_check(const BitBlock& block, const CrcConfig& crc) {
    if (static_cast<int>(block.size()) <= crc.length) return false;
    BitBlock payload(block.begin(), block.end() - crc.length);
    BitBlock rem = crc_remainder(payload, crc);
    return std::equal(rem.begin(), rem.end(), block.end() - crc.length);
}

} // namespace polarquant
