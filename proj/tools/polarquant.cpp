#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "polarquant/codec.hpp"
#include "polarquant/fa_design.hpp"
#include "polarquant/fa_runtime.hpp"
#include "polarquant/harness.hpp"

using namespace polarquant;

namespace {

int cmd_design(int N, int K, int w, int wint, double ebn0, const std::string& variant,
               const std::string& out) {
    // the designer only consumes N and the rate K/N; the construction is
    // immaterial here and bhattacharyya supports any power-of-two N
    CodeConfig cfg = make_code_config(N, K, Construction::bhattacharyya);
    DesignResult result = design_decoder(cfg, w, wint, ebn0, variant_from_name(variant));
    save_spec_file(result.spec, out);
    double polarized = 0.0;
    for (double mi : result.leaf_mi) polarized += (mi > 0.99) + (mi < 0.01);
    std::printf("designed %s: N=%d w=%d w'=%d at %.2f dB -> %s\n", variant.c_str(), N, w, wint,
                ebn0, out.c_str());
    std::printf("channel quantizer preserved MI: %.6f bit\n", result.channel_mi);
    std::printf("polarized leaves (MI>0.99 or <0.01): %.1f%%\n", 100.0 * polarized / N);
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out,
                 const std::string& plotdata, const std::string& conversion,
                 bool alt_sign_invert) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    if (!conversion.empty()) cfg.decoder.conversion = conversion;
    if (alt_sign_invert) cfg.decoder.alt_sign_invert = true;
    cfg.validate();
    std::vector<BlerRecord> records = run_bler(cfg, out, /*verbose=*/true);
    if (!plotdata.empty()) emit_results(records, ResultFormat::plotdata, plotdata);
    std::printf("%s", format_csv(records).c_str());
    return 0;
}

int cmd_report(const std::string& spec_path) {
    DecoderSpec spec = load_spec_file(spec_path);
    std::printf("%s", format_complexity(spec).c_str());
    return 0;
}

// Exhaustive oracle-equivalence suite: the computational-domain runtime must
// reproduce the designed mapping on every input at every node, and the
// binary conversions must match their golden tables.
int cmd_verify() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::printf("%s  %s\n", ok ? "PASS" : "FAIL", name.c_str());
        if (!ok) ++failures;
    };

    {
        bool ok = true;
        for (int width = 3; width <= 9 && ok; ++width) {
            for (std::uint32_t p = 0; p < (1u << width) && ok; ++p) {
                SignMagnitude a{p, width};
                TwosComplement b = sm_to_twos_accurate(a);
                if (b.value() != a.value()) ok = false;
                if (b.pattern != (1u << (width - 1))) {
                    SignMagnitude back = twos_to_sm_accurate(b);
                    if (back.value() != a.value()) ok = false;
                }
            }
        }
        check(ok, "accurate conversions value-preserving and invertible (w'=3..9)");
    }
    {
        bool ok = true;
        for (int width = 3; width <= 9 && ok; ++width) {
            for (std::uint32_t pa = 0; pa < (1u << width) && ok; ++pa) {
                for (std::uint32_t pb = 0; pb < (1u << width); ++pb) {
                    SignMagnitude a{pa, width}, b{pb, width};
                    int exact = a.value() + b.value();
                    TwosComplement sum = TwosComplement::from_value(
                        sm_to_twos_simplified(a).value() + sm_to_twos_simplified(b).value(),
                        width + 1);
                    int approx = twos_to_sm_simplified(sum).value();
                    if (std::abs(approx - exact) > 2) {
                        ok = false;
                        break;
                    }
                }
            }
        }
        check(ok, "simplified conversion bias bounded by 2 (exhaustive, w'=3..9)");
    }
    {
        std::printf("designing ms-cd-nonuniform w=4 w'=6 at 0.5 dB (N=1024, R=0.5)...\n");
        CodeConfig cfg = make_code_config(1024, 512, Construction::nr5g);
        DesignResult d = design_decoder(cfg, 4, 6, 0.5, Variant::ms_cd_nonuniform);
        bool ok = true;
        long mismatches = 0;
        for (const NodeParams& np : d.spec.nodes) {
            std::vector<std::int8_t> lut = materialize_lower_lut(np.lower, d.spec.w);
            for (int ia = 0; ia < 16; ++ia) {
                int ta = message_value(ia, 4);
                for (int ib = 0; ib < 16; ++ib) {
                    int tb = message_value(ib, 4);
                    for (int u0 = 0; u0 < 2; ++u0) {
                        int cd = cd_lower_update(ta, tb, static_cast<std::uint8_t>(u0), np.lower,
                                                 4, 6, Conversion::accurate);
                        int ref = lut[pack_lower(ta, tb, static_cast<std::uint8_t>(u0), 4)];
                        if (cd != ref) {
                            ok = false;
                            ++mismatches;
                        }
                    }
                }
            }
        }
        if (mismatches) std::printf("  %ld mismatching inputs\n", mismatches);
        check(ok, "cd_lower_update == materialized lookup table on all 2^9 inputs x 1023 nodes");
    }
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-alphabet polar code toolkit"};
    app.require_subcommand(1);

    auto* design = app.add_subcommand("design", "derive finite-alphabet decoder parameters");
    int N = 1024, K = 512, w = 4, wint = 6;
    double ebn0 = 0.5;
    std::string variant = "ms-cd-uniform", out = "decoder.json";
    design->add_option("--n", N, "block length N (power of two)");
    design->add_option("--k", K, "payload bits K (sets the design rate K/N)");
    design->add_option("--w", w, "message resolution in bits");
    design->add_option("--wint", wint, "internal integer resolution w'");
    design->add_option("--ebn0", ebn0, "design Eb/N0 in dB");
    design->add_option("--variant", variant, "ib-ib | ms-ib | ms-cd-nonuniform | ms-cd-uniform");
    design->add_option("--out", out, "output decoder spec path")->required();

    auto* simulate = app.add_subcommand("simulate", "run a Monte-Carlo BLER sweep");
    std::string config_path, out_csv, out_plot, conversion;
    bool alt_sign_invert = false;
    simulate->add_option("--config", config_path, "experiment config (JSON)")->required();
    simulate->add_option("--out", out_csv, "output CSV path")->required();
    simulate->add_option("--plotdata", out_plot, "also write gnuplot-style blocks");
    simulate->add_option("--conversion", conversion, "accurate|simplified (overrides config)")
        ->check(CLI::IsMember({"accurate", "simplified"}));
    simulate->add_flag("--alt-sign-invert", alt_sign_invert,
                       "invert every second lower update (simplified conversion)");

    auto* report = app.add_subcommand("report", "print the complexity table of a decoder spec");
    std::string spec_path;
    report->add_option("--spec", spec_path, "decoder spec path")->required();

    app.add_subcommand("verify", "run the exhaustive oracle-equivalence suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("design")) return cmd_design(N, K, w, wint, ebn0, variant, out);
        if (app.got_subcommand("simulate"))
            return cmd_simulate(config_path, out_csv, out_plot, conversion, alt_sign_invert);
        if (app.got_subcommand("report")) return cmd_report(spec_path);
        if (app.got_subcommand("verify")) return cmd_verify();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
