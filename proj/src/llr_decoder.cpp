#include "polarquant/llr_decoder.hpp"

namespace polarquant {

BitBlock sc_decode(const std::vector<double>& channel_llrs, const CodeConfig& cfg) {
    ScDecoder dec(cfg);
    return dec.decode(channel_llrs);
}

BitBlock scl_decode(const std::vector<double>& channel_llrs, const CodeConfig& cfg,
                    int list_size, const CrcConfig* crc) {
    SclDecoder dec(cfg, list_size, crc);
    return dec.decode(channel_llrs);
}

} // namespace polarquant
