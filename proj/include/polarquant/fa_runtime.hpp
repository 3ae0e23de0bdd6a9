#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "polarquant/fa_design.hpp"
#include "polarquant/scl_engine.hpp"
#include "polarquant/types.hpp"

namespace polarquant {

/// Sign-magnitude word: bit width-1 is the sign, below it the magnitude.
struct SignMagnitude {
    std::uint32_t pattern = 0;
    int width = 0;

    static SignMagnitude make(bool negative, std::uint32_t magnitude, int width) {
        return {((negative ? 1u : 0u) << (width - 1)) | magnitude, width};
    }
    bool sign() const { return (pattern >> (width - 1)) & 1u; }
    std::uint32_t magnitude() const { return pattern & ((1u << (width - 1)) - 1u); }
    int value() const { return sign() ? -static_cast<int>(magnitude()) : static_cast<int>(magnitude()); }
};

/// Two's-complement word of the given width.
struct TwosComplement {
    std::uint32_t pattern = 0;
    int width = 0;

    static TwosComplement from_value(int v, int width) {
        return {static_cast<std::uint32_t>(v) & ((1u << width) - 1u), width};
    }
    bool sign() const { return (pattern >> (width - 1)) & 1u; }
    int value() const {
        std::uint32_t sext = pattern;
        if (sign()) sext |= ~((1u << width) - 1u);
        return static_cast<int>(sext);
    }
};

/// Carry-propagating conversions (value preserving; Table I rows).
TwosComplement sm_to_twos_accurate(SignMagnitude a);
/// Saturates the unrepresentable most-negative input to -(2^(w'-1)-1).
SignMagnitude twos_to_sm_accurate(TwosComplement b, bool* saturated = nullptr);

/// Carry-free conversions (sign bit XORed into the magnitude; Table II rows,
/// bias included).
TwosComplement sm_to_twos_simplified(SignMagnitude a);
SignMagnitude twos_to_sm_simplified(TwosComplement b);

enum class Conversion { accurate, simplified };

inline int minsum_upper(int ta, int tb) {
    int m = std::abs(ta) < std::abs(tb) ? std::abs(ta) : std::abs(tb);
    return ((ta < 0) != (tb < 0)) ? -m : m;
}

/// Clip-shift quantization of an integer sum; sign from the two's MSB rule,
/// y = 0 maps to +1.
inline int uniform_quantize(int y, int r, int w) {
    const int half = 1 << (w - 1);
    int mag = (std::abs(y) >> r) + 1;
    if (mag > half) mag = half;
    return y < 0 ? -mag : mag;
}

/// Same mapping computed the hardware way: OR-reduction of the clipped high
/// bits broadcast into the kept window.
int uniform_quantize_bitlogic(TwosComplement y, int r, int w);

/// Threshold quantization by binary search over the 2^(w-1)-1 thresholds.
int nonuniform_quantize(int y, std::span<const int> thresholds, int w);

inline int pack_upper(int ta, int tb, int w) {
    return message_index(ta, w) * (1 << w) + message_index(tb, w);
}
inline int pack_lower(int ta, int tb, std::uint8_t u0, int w) {
    return pack_upper(ta, tb, w) * 2 + u0;
}

inline int lut_upper_update(int ta, int tb, std::span<const std::int8_t> lut, int w) {
    return lut[pack_upper(ta, tb, w)];
}
inline int lut_lower_update(int ta, int tb, std::uint8_t u0, std::span<const std::int8_t> lut,
                            int w) {
    return lut[pack_lower(ta, tb, u0, w)];
}

/// Lower-branch computational-domain update: translate both operands,
/// convert to two's complement, add in a (w'+1)-bit adder, convert back,
/// quantize. `invert` flips the signs of inputs and output (bias spreading
/// for the simplified conversion).
int cd_lower_update(int ta, int tb, std::uint8_t u0, const NodeLower& params, int w,
                    int w_internal, Conversion conversion, bool invert = false);

struct FaOptions {
    Conversion conversion = Conversion::accurate;
    bool alt_sign_invert = false;  // invert odd tree levels (simplified only)
    bool metric_full_precision = false; // diagnostics: bypass the w'-bit metric
    // The channel thresholds are fixed at design time in the received-value
    // domain; mapping operating-point LLRs onto the design LLR domain takes
    // a factor sigma_op^2 / sigma_design^2 (1 = LLRs already in that domain).
    double channel_llr_scale = 1.0;
};

/// Bit-accurate datapath bound to an immutable DecoderSpec; shareable across
/// concurrent decodes.
class FaDatapath {
public:
    using Msg = std::int8_t;

    FaDatapath(const DecoderSpec& spec, const FaOptions& options = {});

    Msg upper(Msg a, Msg b, int level, int node) const {
        if (upper_lut_stride_ == 0) return static_cast<Msg>(minsum_upper(a, b));
        const std::int8_t* lut = upper_luts_ + node_offset(level, node) * upper_lut_stride_;
        return lut[pack_upper(a, b, w_)];
    }

    Msg lower(Msg a, Msg b, std::uint8_t u0, int level, int node) const {
        const std::size_t idx = node_offset(level, node);
        if (lower_lut_stride_ != 0) {
            const std::int8_t* lut = lower_luts_ + idx * lower_lut_stride_;
            return lut[pack_lower(a, b, u0, w_)];
        }
        bool invert = options_.alt_sign_invert && options_.conversion == Conversion::simplified &&
                      (level & 1);
        return static_cast<Msg>(cd_lower_update(a, b, u0, spec_->nodes[idx].lower, w_,
                                                spec_->w_internal, options_.conversion, invert));
    }

    double leaf_llr(Msg m, int leaf) const {
        double mag = leaf_llr_[static_cast<std::size_t>(leaf) * half_ + (std::abs(m) - 1)];
        return m < 0 ? -mag : mag;
    }

    static std::uint8_t decide(Msg m) { return m > 0 ? 0 : 1; }

    /// Channel LLRs -> finite messages through the spec's channel thresholds.
    std::vector<Msg> quantize_channel(const std::vector<double>& llrs) const;

    const DecoderSpec& spec() const { return *spec_; }

private:
    std::size_t node_offset(int level, int node) const {
        return (std::size_t(1) << (level - 1)) - 1 + node;
    }

    const DecoderSpec* spec_;
    FaOptions options_;
    int w_ = 0, half_ = 0;
    const std::int8_t* upper_luts_ = nullptr; // flattened, stride 2^(2w)
    const std::int8_t* lower_luts_ = nullptr; // flattened, stride 2^(2w+1)
    std::size_t upper_lut_stride_ = 0, lower_lut_stride_ = 0;
    std::vector<std::int8_t> upper_storage_, lower_storage_;
    std::vector<double> leaf_llr_; // [leaf][|t|-1] dequantized decision levels
};

/// Finite-alphabet SC decode; returns the full N-bit input estimate.
class FaScDecoder {
public:
    FaScDecoder(const DecoderSpec& spec, const CodeConfig& cfg, const FaOptions& options = {});
    BitBlock decode(const std::vector<double>& channel_llrs);

private:
    FaDatapath dp_;
    ScCore<FaDatapath> core_;
};

/// Finite-alphabet CRC-aided SCL decode; returns the payload.
class FaSclDecoder {
public:
    FaSclDecoder(const DecoderSpec& spec, const CodeConfig& cfg, int list_size,
                 const CrcConfig* crc = nullptr, const FaOptions& options = {});
    BitBlock decode(const std::vector<double>& channel_llrs);

private:
    FaDatapath dp_;
    ListDecoder<FaDatapath> engine_;
    std::unique_ptr<CrcConfig> crc_;
};

BitBlock fa_sc_decode(const std::vector<double>& channel_llrs, const DecoderSpec& spec,
                      const CodeConfig& cfg, const FaOptions& options = {});
BitBlock fa_scl_decode(const std::vector<double>& channel_llrs, const DecoderSpec& spec,
                       const CodeConfig& cfg, int list_size, const CrcConfig* crc = nullptr,
                       const FaOptions& options = {});

} // namespace polarquant
