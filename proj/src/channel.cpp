#include "polarquant/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace polarquant {

double ebn0_to_sigma(double ebn0_db, double rate) {
    if (rate <= 0.0 || rate > 1.0)
        throw std::invalid_argument("ebn0_to_sigma: rate must be in (0,1]");
    double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    return 1.0 / std::sqrt(2.0 * rate * ebn0);
}

NoiseConfig make_noise(double ebn0_db, double rate) {
    return NoiseConfig{ebn0_db, rate, ebn0_to_sigma(ebn0_db, rate)};
}

std::vector<double> transmit(const BitBlock& x, const NoiseConfig& noise, RngStream& rng) {
    std::vector<double> llr(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        llr[i] = symbol_llr(x[i], noise.sigma * rng.gaussian(), noise.sigma);
    return llr;
}

FineChannel discretize_channel(const NoiseConfig& noise, int bin_count, double clip_llr) {
    if (bin_count < 64 || bin_count % 2 != 0)
        throw std::invalid_argument("discretize_channel: bin_count must be even and >= 64");
    if (clip_llr <= 0.0) throw std::invalid_argument("discretize_channel: clip_llr <= 0");

    // Given x=0, the LLR 2y/sigma^2 is N(mean, spread^2).
    const double mean = 2.0 / (noise.sigma * noise.sigma);
    const double spread = 2.0 / noise.sigma;
    const double width = 2.0 * clip_llr / bin_count;

    auto gauss_cdf = [&](double v) {
        return 0.5 * std::erfc(-(v - mean) / (spread * std::sqrt(2.0)));
    };

    FineChannel fc;
    fc.bin_count = bin_count;
    fc.clip_llr = clip_llr;
    fc.support.resize(bin_count);
    fc.joint.resize(bin_count);
    // bin centers built from the positive half so mirrors negate exactly
    const int half = bin_count / 2;
    for (int k = 0; k < half; ++k) {
        double center = (k + 0.5) * width;
        fc.support[half + k] = center;
        fc.support[half - 1 - k] = -center;
    }
    for (int i = 0; i < bin_count; ++i) {
        double lo = -clip_llr + i * width;
        double hi = lo + width;
        double mass = (i == 0 ? gauss_cdf(hi)
                              : (i == bin_count - 1 ? 1.0 - gauss_cdf(lo)
                                                    : gauss_cdf(hi) - gauss_cdf(lo)));
        fc.joint[i][0] = 0.5 * mass;
    }
    // p(x=1, bin) mirrored from p(x=0, .) so symmetry is exact by construction.
    for (int i = 0; i < bin_count; ++i) fc.joint[i][1] = fc.joint[bin_count - 1 - i][0];
    return fc;
}

} // namespace polarquant
