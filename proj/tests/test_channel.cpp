#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polarquant/channel.hpp"
#include "polarquant/infoquant.hpp"
#include "polarquant/rng.hpp"

using namespace polarquant;

TEST_SUITE_BEGIN("channel");

TEST_CASE("ebn0 to sigma") {
    CHECK(ebn0_to_sigma(0.0, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ebn0_to_sigma(10.0 * std::log10(2.0), 0.25) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ebn0_to_sigma(2.5, 0.5) ==
          doctest::Approx(1.0 / std::sqrt(std::pow(10.0, 0.25))).epsilon(1e-12));
    CHECK_THROWS(ebn0_to_sigma(1.0, 0.0));
    CHECK_THROWS(ebn0_to_sigma(1.0, -0.5));
}

TEST_CASE("transmit statistics and determinism") {
    SUBCASE("near-noiseless sign") {
        NoiseConfig noise{0.0, 0.5, 0.01};
        RngStream rng(5);
        BitBlock x(10000, 0);
        for (double l : transmit(x, noise, rng)) CHECK(l > 0.0);
    }
    SUBCASE("mean LLR approaches 2/sigma^2") {
        NoiseConfig noise = make_noise(1.0, 0.5);
        RngStream rng(6);
        BitBlock x(200000, 0);
        auto llrs = transmit(x, noise, rng);
        double mean = 0.0;
        for (double l : llrs) mean += l;
        mean /= llrs.size();
        double expect = 2.0 / (noise.sigma * noise.sigma);
        double stderr5 = 5.0 * (2.0 / noise.sigma) / std::sqrt(llrs.size());
        CHECK(std::abs(mean - expect) < stderr5);
    }
    SUBCASE("same stream key gives a bit-identical sequence") {
        NoiseConfig noise = make_noise(2.0, 0.5);
        RngStream a(42, 3, 9), b(42, 3, 9);
        BitBlock x(64, 1);
        CHECK(transmit(x, noise, a) == transmit(x, noise, b));
    }
    SUBCASE("antipodal symmetry of the symbol LLR") {
        double sigma = 0.8;
        for (double noise : {-1.3, -0.2, 0.0, 0.4, 2.2})
            CHECK(symbol_llr(0, noise, sigma) == doctest::Approx(-symbol_llr(1, -noise, sigma)));
    }
}

TEST_CASE("fine channel discretization") {
    NoiseConfig noise = make_noise(0.5, 0.5);
    FineChannel fc = discretize_channel(noise, 2000, 24.0);

    SUBCASE("normalization and exact mirror symmetry") {
        double sum = 0.0;
        for (const auto& m : fc.joint) sum += m[0] + m[1];
        CHECK(std::abs(sum - 1.0) < 1e-12);
        for (int i = 0; i < fc.bin_count; ++i)
            CHECK(fc.joint[i][0] == fc.joint[fc.bin_count - 1 - i][1]);
    }
    SUBCASE("fine MI approaches the analytic capacity") {
        FineChannel f2 = discretize_channel(NoiseConfig{0.0, 0.5, 1.0}, 2000, 16.0);
        BinaryJoint j{f2.support, f2.joint, true};
        CHECK(std::abs(mutual_information(j) - oracle::bpsk_awgn_capacity(1.0)) < 1e-4);
    }
    SUBCASE("MI non-decreasing when bins refine") {
        double prev = 0.0;
        for (int bins : {250, 500, 1000, 2000}) {
            FineChannel f = discretize_channel(noise, bins, 24.0);
            double mi = mutual_information(BinaryJoint{f.support, f.joint, true});
            CHECK(mi >= prev - 1e-12);
            prev = mi;
        }
    }
    SUBCASE("degenerate bin counts are rejected") {
        CHECK_THROWS(discretize_channel(noise, 32, 24.0));
        CHECK_THROWS(discretize_channel(noise, 128, -1.0));
    }
}

TEST_SUITE_END();
