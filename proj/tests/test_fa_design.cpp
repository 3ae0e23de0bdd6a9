#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polarquant/channel.hpp"
#include "polarquant/codec.hpp"
#include "polarquant/fa_design.hpp"
#include "polarquant/rng.hpp"

using namespace polarquant;

namespace {

MessageDistribution noiseless_dist(int w) {
    MessageDistribution d;
    d.w = w;
    d.mass.assign(1 << w, {0.0, 0.0});
    d.mass[message_index(1 << (w - 1), w)][0] = 0.5;
    d.mass[message_index(-(1 << (w - 1)), w)][1] = 0.5;
    return d;
}

MessageDistribution uninformative_dist(int w) {
    MessageDistribution d;
    d.w = w;
    const int size = 1 << w;
    d.mass.assign(size, {0.25 / (size / 2), 0.25 / (size / 2)});
    return d;
}

void check_symmetric_normalized(const MessageDistribution& d) {
    const int size = 1 << d.w;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        CHECK(d.mass[i][0] == d.mass[size - 1 - i][1]); // exact by construction
        sum += d.mass[i][0] + d.mass[i][1];
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
}

MessageDistribution channel_dist(double ebn0, int w) {
    return design_channel_quantizer(make_noise(ebn0, 0.5), w).dist;
}

} // namespace

TEST_SUITE_BEGIN("fa_design");

TEST_CASE("channel quantizer design") {
    SUBCASE("alphabet size and symmetry") {
        auto d = design_channel_quantizer(make_noise(1.0, 0.5), 4);
        CHECK(d.dist.mass.size() == 16);
        CHECK(d.quantizer.thresholds.size() == 7);
        CHECK(d.quantizer.llr_levels.size() == 8);
        check_symmetric_normalized(d.dist);
        for (int m = 1; m < 8; ++m)
            CHECK(d.quantizer.llr_levels[m] >= d.quantizer.llr_levels[m - 1]);
    }
    SUBCASE("w=2 preserved MI matches a coarse exhaustive threshold search") {
        NoiseConfig noise = make_noise(1.5, 0.5);
        auto d = design_channel_quantizer(noise, 2);
        // oracle: brute-force one magnitude threshold over a fine grid on the
        // analytic fine channel
        FineChannel fc = discretize_channel(noise, 2000, 24.0);
        BinaryJoint j{fc.support, fc.joint, true};
        double best = 0.0;
        for (double tau = 0.02; tau < 12.0; tau += 0.02) {
            SymmetricQuantizer q{2, {tau}};
            MessageDistribution out;
            out.w = 2;
            out.mass.assign(4, {0.0, 0.0});
            for (std::size_t i = 0; i < j.size(); ++i)
                out.mass[message_index(q.classify(j.label[i]), 2)][0] += j.mass[i][0];
            for (int i = 0; i < 4; ++i) out.mass[i][1] = out.mass[4 - 1 - i][0];
            best = std::max(best, out.mi());
        }
        CHECK(d.preserved_mi >= best - 1e-9);
        CHECK(d.preserved_mi <= best + 1e-3);
    }
    SUBCASE("higher design SNR preserves more information") {
        CHECK(design_channel_quantizer(make_noise(3.5, 0.5), 4).preserved_mi >
              design_channel_quantizer(make_noise(0.5, 0.5), 4).preserved_mi);
    }
}

TEST_CASE("evolve upper minsum") {
    SUBCASE("noiseless inputs stay noiseless") {
        auto out = evolve_upper_minsum(noiseless_dist(3), noiseless_dist(3));
        check_symmetric_normalized(out);
        CHECK(out.mi() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(out.mass[message_index(4, 3)][0] == doctest::Approx(0.5));
    }
    SUBCASE("an uninformative input erases the output") {
        auto out = evolve_upper_minsum(channel_dist(2.0, 3), uninformative_dist(3));
        check_symmetric_normalized(out);
        CHECK(out.mi() == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("w=2 matches a hand enumeration") {
        // alphabet {-2,-1,+1,+2}; both inputs identical
        MessageDistribution p;
        p.w = 2;
        p.mass = {{0.05, 0.20}, {0.10, 0.15}, {0.15, 0.10}, {0.20, 0.05}};
        auto out = evolve_upper_minsum(p, p);
        double expect[4] = {0.0, 0.0, 0.0, 0.0};
        for (int ia = 0; ia < 4; ++ia)
            for (int ib = 0; ib < 4; ++ib) {
                int ta = message_value(ia, 2), tb = message_value(ib, 2);
                int sgn = ((ta < 0) != (tb < 0)) ? -1 : 1;
                int t0 = sgn * std::min(std::abs(ta), std::abs(tb));
                expect[message_index(t0, 2)] +=
                    p.mass[ia][0] * p.mass[ib][0] + p.mass[ia][1] * p.mass[ib][1];
            }
        for (int i = 0; i < 4; ++i) CHECK(out.mass[i][0] == doctest::Approx(expect[i]).epsilon(1e-15));
    }
}

TEST_CASE("evolve upper lut") {
    SUBCASE("beats or ties minsum") {
        for (double ebn0 : {0.0, 1.5, 3.0}) {
            auto d = channel_dist(ebn0, 3);
            auto lut = evolve_upper_lut(d, d);
            double ms = evolve_upper_minsum(d, d).mi();
            CHECK(lut.preserved_mi >= ms - 1e-12);
            check_symmetric_normalized(lut.out);
        }
    }
    SUBCASE("identity when the pair alphabet already fits") {
        auto lut = evolve_upper_lut(noiseless_dist(2), noiseless_dist(2));
        CHECK(lut.preserved_mi == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(lut.out.mi() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("table symmetries") {
        auto d = channel_dist(1.0, 3);
        auto lut = evolve_upper_lut(d, d);
        for (int ia = 0; ia < 8; ++ia)
            for (int ib = 0; ib < 8; ++ib) {
                int t = lut.table[ia * 8 + ib];
                CHECK(lut.table[(7 - ia) * 8 + ib] == -t);
                CHECK(lut.table[(7 - ia) * 8 + (7 - ib)] == t);
            }
    }
}

TEST_CASE("evolve lower variants") {
    const std::vector<double> grid = default_scale_grid();

    SUBCASE("noiseless inputs stay noiseless under every variant") {
        for (auto kind : {NodeLower::Kind::lut, NodeLower::Kind::cd_nonuniform,
                          NodeLower::Kind::cd_uniform}) {
            auto res = evolve_lower(noiseless_dist(4), noiseless_dist(4), kind, 6);
            check_symmetric_normalized(res.out);
            CHECK(res.preserved_mi == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("MI ordering lut >= cd_nonuniform >= cd_uniform") {
        for (double ebn0 : {0.5, 2.0}) {
            for (int w : {2, 3, 4}) {
                auto d = channel_dist(ebn0, w);
                auto probe = probe_lower_variants(d, d, 6);
                CHECK(probe.lut >= probe.cd_nonuniform - 1e-12);
                CHECK(probe.cd_nonuniform >= probe.cd_uniform - 1e-12);
            }
        }
    }
    SUBCASE("integer sum support and normalization, w=2 w'=4") {
        auto d = channel_dist(1.0, 2);
        auto res = evolve_lower(d, d, NodeLower::Kind::cd_nonuniform, 4);
        const int iota = 7;
        for (int v : res.params.phi_a) {
            CHECK(v >= 0);
            CHECK(v <= iota);
        }
        CHECK(res.params.thresholds.size() == 1);
        CHECK(res.params.thresholds[0] >= 0);
        CHECK(res.params.thresholds[0] <= 2 * iota);
        check_symmetric_normalized(res.out);
    }
    SUBCASE("uniform thresholds are what the shift implies") {
        auto d = channel_dist(1.0, 4);
        auto res = evolve_lower(d, d, NodeLower::Kind::cd_uniform, 6);
        CHECK(res.params.shift >= 0);
        CHECK(res.params.shift <= 2);
        CHECK(res.params.phi_a == res.params.phi_b); // identical input distributions
    }
    SUBCASE("uniform never beats free thresholds on its own winner grid") {
        auto d = channel_dist(1.0, 3);
        auto uni = evolve_lower(d, d, NodeLower::Kind::cd_nonuniform, 6, grid);
        auto cs = evolve_lower(d, d, NodeLower::Kind::cd_uniform, 6, grid);
        CHECK(cs.preserved_mi <= uni.preserved_mi + 1e-9);
    }
}

TEST_CASE("design decoder end to end") {
    SUBCASE("node counts") {
        CodeConfig c2 = make_code_config(2, 1, Construction::bhattacharyya);
        auto d2 = design_decoder(c2, 3, 6, 1.0, Variant::ms_cd_uniform);
        CHECK(d2.spec.nodes.size() == 1);
        CHECK(d2.spec.nodes[0].leaf_upper.has_value());

        CodeConfig c16 = make_code_config(16, 8, Construction::bhattacharyya);
        auto d16 = design_decoder(c16, 4, 6, 1.0, Variant::ms_ib);
        CHECK(d16.spec.nodes.size() == 15);
        CHECK(d16.leaf_mi.size() == 16);
    }
    SUBCASE("polarization strengthens with depth") {
        auto fraction_polarized = [](int n) {
            CodeConfig cfg = make_code_config(1 << n, 1 << (n - 1), Construction::bhattacharyya);
            auto d = design_decoder(cfg, 4, 6, 1.5, Variant::ms_cd_uniform);
            double count = 0.0;
            for (double mi : d.leaf_mi) count += (mi > 0.99) + (mi < 0.01);
            return count / (1 << n);
        };
        double f3 = fraction_polarized(3), f6 = fraction_polarized(6), f10 = fraction_polarized(10);
        CHECK(f6 > f3);
        CHECK(f10 > f6);
    }
    SUBCASE("quantization only loses information on average over the leaves") {
        // upgraded (lower) branches legitimately exceed the channel MI; the
        // conserved quantity is the mean, which quantization can only shrink
        CodeConfig cfg = make_code_config(64, 32, Construction::bhattacharyya);
        auto d = design_decoder(cfg, 3, 6, 1.0, Variant::ms_cd_nonuniform);
        double mean = 0.0;
        for (double mi : d.leaf_mi) {
            CHECK(mi >= 0.0);
            CHECK(mi <= 1.0 + 1e-12);
            mean += mi;
        }
        mean /= d.leaf_mi.size();
        CHECK(mean <= d.channel_mi + 1e-9);
    }
}

TEST_CASE("memory footprint reproduces the complexity table") {
    CHECK(memory_footprint(NodeLower::Kind::lut, 4, 6) == 2048);
    CHECK(memory_footprint(NodeLower::Kind::cd_nonuniform, 4, 6) == 128);
    CHECK(memory_footprint(NodeLower::Kind::cd_uniform, 4, 6) == 80);
    CHECK(memory_footprint(NodeLower::Kind::lut, 2, 6) == 64);
    CHECK(memory_footprint(NodeLower::Kind::cd_nonuniform, 2, 6) == 32);
    CHECK(memory_footprint(NodeLower::Kind::cd_uniform, 2, 6) == 20);
    CHECK(memory_footprint(NodeLower::Kind::cd_uniform, 3, 6) == 40);
}

TEST_CASE("spec serialization round trip") {
    CodeConfig cfg = make_code_config(16, 8, Construction::bhattacharyya);
    for (Variant v : {Variant::ms_cd_uniform, Variant::ms_cd_nonuniform, Variant::ib_ib}) {
        DecoderSpec spec = design_decoder(cfg, 3, 6, 0.7, v).spec;
        std::string text = dump_spec(spec);
        DecoderSpec back = parse_spec(text);
        CHECK(dump_spec(back) == text); // byte-identical
        CHECK(back.variant == variant_name(v));
        CHECK(back.nodes.size() == spec.nodes.size());
    }
}

TEST_SUITE_END();
