#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "polarquant/scl_engine.hpp"
#include "polarquant/types.hpp"

namespace polarquant {

/// log((1+e^(a+b)) / (e^a + e^b)) in the standard stable form.
inline double boxplus(double a, double b) {
    double sa = a < 0.0 ? -1.0 : 1.0;
    double sb = b < 0.0 ? -1.0 : 1.0;
    double smin = sa * sb * std::min(std::abs(a), std::abs(b));
    double corr = std::log1p(std::exp(-std::abs(a + b))) -
                  std::log1p(std::exp(-std::abs(a - b)));
    return smin + corr;
}

inline double g_update(double a, double b, std::uint8_t u0) {
    return (u0 ? -a : a) + b;
}

struct FloatDatapath {
    using Msg = double;
    Msg upper(Msg a, Msg b, int, int) const { return boxplus(a, b); }
    Msg lower(Msg a, Msg b, std::uint8_t u0, int, int) const { return g_update(a, b, u0); }
    double leaf_llr(Msg m, int) const { return m; }
    static std::uint8_t decide(Msg m) { return m >= 0.0 ? 0 : 1; }
};

/// Double-precision SC baseline; reusable workspace.
class ScDecoder {
public:
    explicit ScDecoder(const CodeConfig& cfg) : core_(cfg) {}
    /// Full input estimate, frozen positions forced to zero.
    BitBlock decode(const std::vector<double>& channel_llrs) {
        return core_.decode(channel_llrs, dp_);
    }

private:
    ScCore<FloatDatapath> core_;
    FloatDatapath dp_;
};

/// CRC-aided SCL baseline; returns the payload (CRC bits stripped when a
/// CRC is configured).
class SclDecoder {
public:
    SclDecoder(const CodeConfig& cfg, int list_size, const CrcConfig* crc = nullptr)
        : engine_(cfg, list_size), crc_(crc ? std::make_unique<CrcConfig>(*crc) : nullptr) {}

    BitBlock decode(const std::vector<double>& channel_llrs) {
        BitBlock info = engine_.decode(channel_llrs, dp_, crc_.get());
        if (crc_) info.resize(info.size() - crc_->length);
        return info;
    }

    const std::vector<int>& path_count_trace() const { return engine_.path_count_trace(); }

private:
    ListDecoder<FloatDatapath> engine_;
    std::unique_ptr<CrcConfig> crc_;
    FloatDatapath dp_;
};

BitBlock sc_decode(const std::vector<double>& channel_llrs, const CodeConfig& cfg);
BitBlock scl_decode(const std::vector<double>& channel_llrs, const CodeConfig& cfg,
                    int list_size, const CrcConfig* crc = nullptr);

} // namespace polarquant
