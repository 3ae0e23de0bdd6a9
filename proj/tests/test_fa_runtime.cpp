#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polarquant/channel.hpp"
#include "polarquant/codec.hpp"
#include "polarquant/fa_design.hpp"
#include "polarquant/fa_runtime.hpp"
#include "polarquant/llr_decoder.hpp"
#include "polarquant/rng.hpp"

using namespace polarquant;

namespace {

std::vector<int> all_messages(int w) {
    std::vector<int> out;
    for (int i = 0; i < (1 << w); ++i) out.push_back(message_value(i, w));
    return out;
}

int nonuniform_quantize_linear(int y, const std::vector<int>& thresholds, int w) {
    int mag = 1;
    for (int t : thresholds)
        if (std::abs(y) > t) ++mag;
    mag = std::min(mag, 1 << (w - 1));
    return y < 0 ? -mag : mag;
}

DesignResult design_small(Variant variant, int w = 4, int wint = 6, int N = 16) {
    CodeConfig cfg = make_code_config(N, N / 2, Construction::bhattacharyya);
    return design_decoder(cfg, w, wint, 1.0, variant);
}

} // namespace

TEST_SUITE_BEGIN("fa_runtime");

TEST_CASE("accurate conversions reproduce the golden rows at w'=3") {
    // sign-magnitude pattern -> two's complement pattern
    const std::pair<std::uint32_t, std::uint32_t> rows[] = {
        {0b000, 0b000}, {0b001, 0b001}, {0b010, 0b010}, {0b011, 0b011},
        {0b111, 0b101}, {0b110, 0b110}, {0b101, 0b111}, {0b100, 0b000},
    };
    for (auto [sm, twos] : rows) CHECK(sm_to_twos_accurate({sm, 3}).pattern == twos);

    // two's complement pattern -> sign-magnitude pattern (the -4 row has none)
    const std::pair<std::uint32_t, std::uint32_t> back[] = {
        {0b000, 0b000}, {0b001, 0b001}, {0b010, 0b010}, {0b011, 0b011},
        {0b101, 0b111}, {0b110, 0b110}, {0b111, 0b101},
    };
    for (auto [twos, sm] : back) CHECK(twos_to_sm_accurate({twos, 3}).pattern == sm);

    bool saturated = false;
    SignMagnitude sat = twos_to_sm_accurate({0b100, 3}, &saturated);
    CHECK(saturated);
    CHECK(sat.value() == -3);
}

TEST_CASE("simplified conversions reproduce the golden rows at w'=3") {
    const std::pair<std::uint32_t, std::uint32_t> rows[] = {
        {0b000, 0b000}, {0b001, 0b001}, {0b010, 0b010}, {0b011, 0b011},
        {0b111, 0b100}, {0b110, 0b101}, {0b101, 0b110}, {0b100, 0b111},
    };
    for (auto [sm, twos] : rows) CHECK(sm_to_twos_simplified({sm, 3}).pattern == twos);
    CHECK(sm_to_twos_simplified({0b101, 3}).value() == -2); // the documented bias

    const std::pair<std::uint32_t, std::uint32_t> back[] = {
        {0b000, 0b000}, {0b001, 0b001}, {0b010, 0b010}, {0b011, 0b011},
        {0b101, 0b110}, {0b110, 0b101}, {0b111, 0b100},
    };
    for (auto [twos, sm] : back) CHECK(twos_to_sm_simplified({twos, 3}).pattern == sm);
}

TEST_CASE("conversion round trips and bias bounds, exhaustive w'=3..9") {
    for (int width = 3; width <= 9; ++width) {
        const std::uint32_t count = 1u << width;
        for (std::uint32_t p = 0; p < count; ++p) {
            SignMagnitude a{p, width};
            TwosComplement b = sm_to_twos_accurate(a);
            CHECK(b.value() == a.value()); // value preserving
            if (b.pattern != (1u << (width - 1)))
                CHECK(twos_to_sm_accurate(b).value() == a.value());
            // simplified: positive inputs are exact
            if (!a.sign()) CHECK(sm_to_twos_simplified(a).value() == a.value());
        }
        // simplified adder path deviates from the exact sum by at most 2
        for (std::uint32_t pa = 0; pa < count; ++pa) {
            for (std::uint32_t pb = 0; pb < count; ++pb) {
                SignMagnitude a{pa, width}, b{pb, width};
                int sum = sm_to_twos_simplified(a).value() + sm_to_twos_simplified(b).value();
                int approx = twos_to_sm_simplified(TwosComplement::from_value(sum, width + 1)).value();
                CHECK(std::abs(approx - (a.value() + b.value())) <= 2);
            }
        }
    }
}

TEST_CASE("minsum upper") {
    CHECK(minsum_upper(3, -2) == -2);
    for (int t : all_messages(4)) CHECK(minsum_upper(t, 8) == t); // max magnitude passes through
    for (int a : all_messages(4)) {
        for (int b : all_messages(4)) {
            CHECK(minsum_upper(a, b) == minsum_upper(b, a));
            CHECK(minsum_upper(-a, b) == -minsum_upper(a, b)); // odd under one flip
            CHECK(minsum_upper(-a, -b) == minsum_upper(a, b)); // even under both
            int t = minsum_upper(a, b);
            CHECK(t != 0);
            CHECK(std::abs(t) <= 8);
        }
    }
}

TEST_CASE("uniform quantize: formula, zero rule, bit-logic path") {
    CHECK(uniform_quantize(9, 2, 4) == 3);
    CHECK(uniform_quantize(0, 0, 4) == 1);
    CHECK(uniform_quantize(0, 3, 4) == 1);
    CHECK(uniform_quantize(-9, 2, 4) == -3);
    // bit-logic twin, exhaustive at w'=9 operand width
    for (int r = 0; r <= 5; ++r)
        for (int y = -510; y <= 510; ++y)
            CHECK(uniform_quantize_bitlogic(TwosComplement::from_value(y, 10), r, 4) ==
                  uniform_quantize(y, r, 4));
}

TEST_CASE("nonuniform quantize: edges and binary search vs linear scan") {
    std::vector<int> thresholds{3, 9, 14, 21, 30, 42, 55};
    for (int y = 0; y <= 3; ++y) CHECK(nonuniform_quantize(y, thresholds, 4) == 1);
    CHECK(nonuniform_quantize(56, thresholds, 4) == 8);
    CHECK(nonuniform_quantize(-56, thresholds, 4) == -8);
    for (int y = -128; y <= 128; ++y)
        CHECK(nonuniform_quantize(y, thresholds, 4) == nonuniform_quantize_linear(y, thresholds, 4));
    // uneven spacing with repeats collapses ranges deterministically
    std::vector<int> tight{0, 0, 1, 5, 5, 5, 40};
    for (int y = -64; y <= 64; ++y)
        CHECK(nonuniform_quantize(y, tight, 4) == nonuniform_quantize_linear(y, tight, 4));
}

TEST_CASE("lut index packing is bijective") {
    for (int w : {2, 3, 4}) {
        std::vector<int> seen(1 << (2 * w + 1), 0);
        for (int a : all_messages(w))
            for (int b : all_messages(w))
                for (int u0 = 0; u0 < 2; ++u0) {
                    int idx = pack_lower(a, b, static_cast<std::uint8_t>(u0), w);
                    CHECK(idx >= 0);
                    CHECK(idx < (1 << (2 * w + 1)));
                    ++seen[idx];
                }
        for (int c : seen) CHECK(c == 1);
    }
}

TEST_CASE("cd lower update equals the arithmetic oracle on all inputs") {
    DesignResult d = design_small(Variant::ms_cd_nonuniform);
    for (const NodeParams& np : d.spec.nodes) {
        auto lut = materialize_lower_lut(np.lower, 4);
        for (int a : all_messages(4))
            for (int b : all_messages(4))
                for (int u0 = 0; u0 < 2; ++u0) {
                    int got = cd_lower_update(a, b, static_cast<std::uint8_t>(u0), np.lower, 4, 6,
                                              Conversion::accurate);
                    CHECK(got == lut[pack_lower(a, b, static_cast<std::uint8_t>(u0), 4)]);
                    CHECK(got != 0);
                    CHECK(std::abs(got) <= 8);
                }
    }
}

TEST_CASE("saturated agreeing inputs keep the cd output saturated") {
    for (Variant v : {Variant::ms_cd_nonuniform, Variant::ms_cd_uniform}) {
        DesignResult d = design_small(v);
        for (const NodeParams& np : d.spec.nodes) {
            CHECK(cd_lower_update(8, 8, 0, np.lower, 4, 6, Conversion::accurate) == 8);
            CHECK(cd_lower_update(-8, -8, 0, np.lower, 4, 6, Conversion::accurate) == -8);
            // a flipped first operand under u0=1 agrees with the second again
            CHECK(cd_lower_update(-8, 8, 1, np.lower, 4, 6, Conversion::accurate) == 8);
            // while equal saturated signs cancel into an erasure
            CHECK(cd_lower_update(8, 8, 1, np.lower, 4, 6, Conversion::accurate) == 1);
        }
    }
}

TEST_CASE("cd lower update odd symmetry away from the zero sum") {
    DesignResult d = design_small(Variant::ms_cd_uniform);
    const NodeLower& lower = d.spec.nodes[2].lower;
    for (int a : all_messages(4))
        for (int b : all_messages(4))
            for (int u0 = 0; u0 < 2; ++u0) {
                int va = ((a < 0) != (u0 != 0) ? -1 : 1) * lower.phi_a[std::abs(a) - 1];
                int vb = (b < 0 ? -1 : 1) * lower.phi_b[std::abs(b) - 1];
                int pos = cd_lower_update(a, b, static_cast<std::uint8_t>(u0), lower, 4, 6,
                                          Conversion::accurate);
                int neg = cd_lower_update(-a, -b, static_cast<std::uint8_t>(u0), lower, 4, 6,
                                          Conversion::accurate);
                if (va + vb != 0)
                    CHECK(neg == -pos);
                else {  // a sign function cannot be odd at zero: both sides go positive
                    CHECK(pos == 1);
                    CHECK(neg == 1);
                }
            }
}

TEST_CASE("designed lut tables carry the datapath symmetries") {
    DesignResult d = design_small(Variant::ib_ib, 3, 6, 8);
    for (const NodeParams& np : d.spec.nodes) {
        for (int a : all_messages(3)) {
            for (int b : all_messages(3)) {
                int up = lut_upper_update(a, b, np.upper.table, 3);
                CHECK(lut_upper_update(-a, b, np.upper.table, 3) == -up);
                CHECK(lut_upper_update(-a, -b, np.upper.table, 3) == up);
                CHECK(std::abs(up) <= 4);
                CHECK(up != 0);
                for (int u0 = 0; u0 < 2; ++u0) {
                    int lo = lut_lower_update(a, b, static_cast<std::uint8_t>(u0), np.lower.table, 3);
                    CHECK(lut_lower_update(-a, -b, static_cast<std::uint8_t>(u0), np.lower.table,
                                           3) == -lo);
                    // flipping one operand together with u0 leaves the llr unchanged
                    CHECK(lut_lower_update(-a, b, static_cast<std::uint8_t>(1 - u0),
                                           np.lower.table, 3) == lo);
                }
            }
        }
    }
}

TEST_CASE("minsum sign agrees with boxplus sign on translated levels") {
    auto noise = make_noise(1.0, 0.5);
    auto chq = design_channel_quantizer(noise, 4);
    auto levels = chq.dist.levels();
    auto sgn = [](double v) { return v < 0 ? -1 : 1; };
    for (int a : all_messages(4))
        for (int b : all_messages(4)) {
            double la = levels[message_index(a, 4)], lb = levels[message_index(b, 4)];
            if (la == 0.0 || lb == 0.0) continue;
            CHECK(sgn(minsum_upper(a, b)) == sgn(boxplus(la, lb)));
        }
}

TEST_CASE("fa sc recovers noiseless codewords and matches a materialized run") {
    DesignResult d = design_small(Variant::ms_cd_uniform, 4, 6, 32);
    CodeConfig cfg = make_code_config(32, 16, Construction::bhattacharyya);

    // same spec with every cd node replaced by its materialized table
    DecoderSpec lut_spec = d.spec;
    for (NodeParams& np : lut_spec.nodes) {
        NodeLower materialized;
        materialized.kind = NodeLower::Kind::lut;
        materialized.table = materialize_lower_lut(np.lower, 4);
        np.lower = std::move(materialized);
    }

    FaScDecoder cd(d.spec, cfg), tab(lut_spec, cfg);
    RngStream rng(404);
    NoiseConfig noise = make_noise(3.0, 0.5);
    for (int trial = 0; trial < 300; ++trial) {
        BitBlock payload(16);
        for (auto& bb : payload) bb = rng.bit();
        BitBlock u = build_message(payload, cfg);
        BitBlock x = polar_encode(u, cfg);

        std::vector<double> clean(32);
        for (int i = 0; i < 32; ++i) clean[i] = x[i] ? -40.0 : 40.0;
        CHECK(cd.decode(clean) == u);

        auto llrs = transmit(x, noise, rng);
        CHECK(cd.decode(llrs) == tab.decode(llrs));
    }
}

TEST_CASE("fa scl with list one equals fa sc") {
    DesignResult d = design_small(Variant::ms_cd_uniform, 4, 6, 32);
    CodeConfig cfg = make_code_config(32, 16, Construction::bhattacharyya);
    FaScDecoder sc(d.spec, cfg);
    FaSclDecoder scl(d.spec, cfg, 1);
    RngStream rng(405);
    NoiseConfig noise = make_noise(1.0, 0.5);
    BitBlock x(32, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        auto llrs = transmit(x, noise, rng);
        BitBlock u = sc.decode(llrs);
        BitBlock expect;
        for (int i : cfg.info_set) expect.push_back(u[i]);
        CHECK(scl.decode(llrs) == expect);
    }
}

TEST_CASE("decision metric prefers agreeing saturated messages") {
    DesignResult d = design_small(Variant::ms_cd_uniform, 4, 6, 16);
    FaDatapath dp(d.spec);
    int leaf = 15; // most reliable leaf
    double llr = dp.leaf_llr(8, leaf);
    CHECK(llr > 0.0);
    CHECK(path_metric_update(0.0, llr, 0) < path_metric_update(0.0, llr, 1));
}

TEST_CASE("simplified conversion option stays closed and sign-covariant") {
    DesignResult d = design_small(Variant::ms_cd_uniform);
    const NodeLower& lower = d.spec.nodes[1].lower;
    for (int a : all_messages(4))
        for (int b : all_messages(4))
            for (int u0 = 0; u0 < 2; ++u0)
                for (bool invert : {false, true}) {
                    int t = cd_lower_update(a, b, static_cast<std::uint8_t>(u0), lower, 4, 6,
                                            Conversion::simplified, invert);
                    CHECK(t != 0);
                    CHECK(std::abs(t) <= 8);
                }
}

TEST_SUITE_END();
