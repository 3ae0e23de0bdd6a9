#include "polarquant/fa_runtime.hpp"

#include <cmath>
#include <stdexcept>

namespace polarquant {

TwosComplement sm_to_twos_accurate(SignMagnitude a) {
    const std::uint32_t ones = (1u << (a.width - 1)) - 1u;
    const std::uint32_t mask = (1u << a.width) - 1u;
    std::uint32_t p = a.pattern;
    if (a.sign()) p = ((p ^ ones) + 1u) & mask; // carry may run into the sign bit
    return {p, a.width};
}

SignMagnitude twos_to_sm_accurate(TwosComplement b, bool* saturated) {
    const std::uint32_t ones = (1u << (b.width - 1)) - 1u;
    if (saturated) *saturated = false;
    if (b.pattern == (1u << (b.width - 1))) { // most negative value has no SM twin
        if (saturated) *saturated = true;
        return SignMagnitude::make(true, ones, b.width);
    }
    std::uint32_t mag = b.pattern & ones;
    if (b.sign()) mag = ((mag + ones) & ones) ^ ones; // add -1, then XOR the sign
    return {(b.pattern & (1u << (b.width - 1))) | mag, b.width};
}

TwosComplement sm_to_twos_simplified(SignMagnitude a) {
    const std::uint32_t ones = (1u << (a.width - 1)) - 1u;
    std::uint32_t mag = a.magnitude() ^ (a.sign() ? ones : 0u);
    return {((a.sign() ? 1u : 0u) << (a.width - 1)) | mag, a.width};
}

SignMagnitude twos_to_sm_simplified(TwosComplement b) {
    const std::uint32_t ones = (1u << (b.width - 1)) - 1u;
    std::uint32_t mag = (b.pattern & ones) ^ (b.sign() ? ones : 0u);
    return {(b.pattern & (1u << (b.width - 1))) | mag, b.width};
}

int uniform_quantize_bitlogic(TwosComplement y, int r, int w) {
    SignMagnitude sm = twos_to_sm_accurate(y);
    std::uint32_t m = sm.magnitude();
    const std::uint32_t window = (1u << (w - 1)) - 1u;
    std::uint32_t kept = (m >> r) & window;
    bool clip = (m >> r) >> (w - 1); // OR of the discarded high bits
    std::uint32_t code = clip ? window : kept;
    int mag = static_cast<int>(code) + 1;
    return y.sign() ? -mag : mag;
}

int nonuniform_quantize(int y, std::span<const int> thresholds, int w) {
    const int mag_in = std::abs(y);
    int lo = 0, hi = static_cast<int>(thresholds.size()); // first threshold >= |y|
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (thresholds[mid] < mag_in)
            lo = mid + 1;
        else
            hi = mid;
    }
    int mag = std::min(lo + 1, 1 << (w - 1));
    return y < 0 ? -mag : mag;
}

int cd_lower_update(int ta, int tb, std::uint8_t u0, const NodeLower& params, int w,
                    int w_internal, Conversion conversion, bool invert) {
    if (invert) {
        ta = -ta;
        tb = -tb;
    }
    const bool neg_a = ((ta < 0) != (u0 != 0));
    const bool neg_b = tb < 0;
    SignMagnitude a =
        SignMagnitude::make(neg_a, static_cast<std::uint32_t>(params.phi_a[std::abs(ta) - 1]),
                            w_internal);
    SignMagnitude b =
        SignMagnitude::make(neg_b, static_cast<std::uint32_t>(params.phi_b[std::abs(tb) - 1]),
                            w_internal);

    const bool simplified = conversion == Conversion::simplified;
    TwosComplement ca = simplified ? sm_to_twos_simplified(a) : sm_to_twos_accurate(a);
    TwosComplement cb = simplified ? sm_to_twos_simplified(b) : sm_to_twos_accurate(b);
    // (w'+1)-bit adder; the operand range keeps it overflow-free
    TwosComplement sum = TwosComplement::from_value(ca.value() + cb.value(), w_internal + 1);

    int t1;
    if (params.kind == NodeLower::Kind::cd_uniform && !simplified) {
        t1 = uniform_quantize_bitlogic(sum, params.shift, w);
    } else {
        SignMagnitude sm = simplified ? twos_to_sm_simplified(sum) : twos_to_sm_accurate(sum);
        int mag_in = static_cast<int>(sm.magnitude());
        int mag;
        if (params.kind == NodeLower::Kind::cd_uniform) {
            mag = std::min((mag_in >> params.shift) + 1, 1 << (w - 1));
        } else {
            mag = std::abs(nonuniform_quantize(mag_in, params.thresholds, w));
        }
        t1 = sum.sign() ? -mag : mag;
    }
    return invert ? -t1 : t1;
}

FaDatapath::FaDatapath(const DecoderSpec& spec, const FaOptions& options)
    : spec_(&spec), options_(options), w_(spec.w), half_(1 << (spec.w - 1)) {
    const int n = spec.tree_depth();
    if (static_cast<int>(spec.nodes.size()) != spec.N - 1)
        throw std::invalid_argument("FaDatapath: spec has wrong node count");

    const bool upper_lut = !spec.nodes.empty() && spec.nodes[0].upper.kind == NodeUpper::Kind::lut;
    const bool lower_lut = !spec.nodes.empty() && spec.nodes[0].lower.kind == NodeLower::Kind::lut;
    if (upper_lut) {
        upper_lut_stride_ = std::size_t(1) << (2 * w_);
        upper_storage_.resize(upper_lut_stride_ * spec.nodes.size());
        for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
            if (spec.nodes[i].upper.table.size() != upper_lut_stride_)
                throw std::invalid_argument("FaDatapath: upper table size mismatch");
            std::copy(spec.nodes[i].upper.table.begin(), spec.nodes[i].upper.table.end(),
                      upper_storage_.begin() + i * upper_lut_stride_);
        }
        upper_luts_ = upper_storage_.data();
    }
    if (lower_lut) {
        lower_lut_stride_ = std::size_t(2) << (2 * w_);
        lower_storage_.resize(lower_lut_stride_ * spec.nodes.size());
        for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
            if (spec.nodes[i].lower.table.size() != lower_lut_stride_)
                throw std::invalid_argument("FaDatapath: lower table size mismatch");
            std::copy(spec.nodes[i].lower.table.begin(), spec.nodes[i].lower.table.end(),
                      lower_storage_.begin() + i * lower_lut_stride_);
        }
        lower_luts_ = lower_storage_.data();
    }

    leaf_llr_.assign(static_cast<std::size_t>(spec.N) * half_, 0.0);
    const std::size_t first_deep = (std::size_t(1) << (n - 1)) - 1;
    for (int psi = 0; psi < (1 << (n - 1)); ++psi) {
        const NodeParams& np = spec.nodes[first_deep + psi];
        if (!np.leaf_upper || !np.leaf_lower)
            throw std::invalid_argument("FaDatapath: missing decision LLR tables");
        for (int m = 0; m < half_; ++m) {
            double up = options_.metric_full_precision
                            ? np.leaf_upper->levels[m]
                            : np.leaf_upper->levels_int[m] / np.leaf_upper->scale;
            double lo = options_.metric_full_precision
                            ? np.leaf_lower->levels[m]
                            : np.leaf_lower->levels_int[m] / np.leaf_lower->scale;
            leaf_llr_[(std::size_t(2) * psi) * half_ + m] = up;
            leaf_llr_[(std::size_t(2) * psi + 1) * half_ + m] = lo;
        }
    }
}

std::vector<FaDatapath::Msg> FaDatapath::quantize_channel(const std::vector<double>& llrs) const {
    std::vector<Msg> msgs(llrs.size());
    for (std::size_t i = 0; i < llrs.size(); ++i)
        msgs[i] = static_cast<Msg>(
            spec_->channel_quantizer.classify(options_.channel_llr_scale * llrs[i], w_));
    return msgs;
}

FaScDecoder::FaScDecoder(const DecoderSpec& spec, const CodeConfig& cfg, const FaOptions& options)
    : dp_(spec, options), core_(cfg) {
    if (spec.N != cfg.block_length)
        throw std::invalid_argument("FaScDecoder: spec/config block length mismatch");
}

BitBlock FaScDecoder::decode(const std::vector<double>& channel_llrs) {
    return core_.decode(dp_.quantize_channel(channel_llrs), dp_);
}

FaSclDecoder::FaSclDecoder(const DecoderSpec& spec, const CodeConfig& cfg, int list_size,
                           const CrcConfig* crc, const FaOptions& options)
    : dp_(spec, options), engine_(cfg, list_size),
      crc_(crc ? std::make_unique<CrcConfig>(*crc) : nullptr) {
    if (spec.N != cfg.block_length)
        throw std::invalid_argument("FaSclDecoder: spec/config block length mismatch");
}

BitBlock FaSclDecoder::decode(const std::vector<double>& channel_llrs) {
    BitBlock info = engine_.decode(dp_.quantize_channel(channel_llrs), dp_, crc_.get());
    if (crc_) info.resize(info.size() - crc_->length);
    return info;
}

BitBlock fa_sc_decode(const std::vector<double>& channel_llrs, const DecoderSpec& spec,
                      const CodeConfig& cfg, const FaOptions& options) {
    FaScDecoder dec(spec, cfg, options);
    return dec.decode(channel_llrs);
}

BitBlock fa_scl_decode(const std::vector<double>& channel_llrs, const DecoderSpec& spec,
                       const CodeConfig& cfg, int list_size, const CrcConfig* crc,
                       const FaOptions& options) {
    FaSclDecoder dec(spec, cfg, list_size, crc, options);
    return dec.decode(channel_llrs);
}

} // namespace polarquant
