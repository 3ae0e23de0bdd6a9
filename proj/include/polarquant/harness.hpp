#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polarquant/fa_design.hpp"
#include "polarquant/types.hpp"

namespace polarquant {

struct StoppingRule {
    std::int64_t min_block_errors = 100;
    std::int64_t max_frames = 200000;
};

struct DecoderSelect {
    std::string kind = "llr-sc"; // llr-sc | llr-scl | fa-sc | fa-scl
    std::string spec_path;       // fa kinds
    std::string conversion = "accurate";
    bool alt_sign_invert = false;
};

struct CrcSelect {
    bool enabled = false;
    std::uint32_t polynomial = 0x1021;
    int length = 16;
};

struct ExperimentConfig {
    int N = 1024;
    int K = 512; // payload bits; CRC bits extend the information set
    std::string construction = "nr5g";
    std::vector<int> info_set; // optional explicit set (overrides construction)
    DecoderSelect decoder;
    int N_L = 1;
    CrcSelect crc;
    std::vector<double> ebn0_sweep_db;
    StoppingRule stopping;
    std::uint64_t seed = 1;
    int workers = 1;
    bool all_zero_payload = false;

    void validate() const;
};

ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& text);

struct BlerRecord {
    double ebn0_db = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t block_errors = 0;
    double bler = 0.0;
    double wallclock_s = 0.0;
    std::string decoder;
    std::uint64_t seed = 0;
};

/// Identifier used in the CSV `decoder` column; a pure function of the
/// configuration (and the decoder spec, for finite-alphabet kinds).
std::string decoder_id(const ExperimentConfig& cfg, const DecoderSpec* spec);

/// One Monte-Carlo frame; the outcome is a pure function of
/// (seed, point_index, frame_index) and the configuration.
bool simulate_frame(std::uint64_t frame_index, std::uint64_t point_index,
                    const ExperimentConfig& cfg, const DecoderSpec* spec);

/// Runs every sweep point until min_block_errors or max_frames, persisting
/// after each point when out_csv is given; completed points found in an
/// existing file (matched on decoder id, seed and Eb/N0) are reused.
std::vector<BlerRecord> run_bler(const ExperimentConfig& cfg,
                                 const std::optional<std::string>& out_csv = std::nullopt,
                                 bool verbose = false);

std::string format_csv(const std::vector<BlerRecord>& records);
std::vector<BlerRecord> parse_csv(const std::string& text);
std::string format_plotdata(const std::vector<BlerRecord>& records);
enum class ResultFormat { csv, plotdata };
void emit_results(const std::vector<BlerRecord>& records, ResultFormat format,
                  const std::string& path);

struct ComplexityRow {
    std::string variant;
    int operations = 0;    // additions/comparisons per lower update
    int bits_per_node = 0; // memory bits per lower-branch node
    long total_bits = 0;   // over the N-1 nodes
};

/// Lower-branch complexity of all three realizations at the spec's (w, w').
std::vector<ComplexityRow> report_complexity(const DecoderSpec& spec);
std::string format_complexity(const DecoderSpec& spec);

/// Worker-count override from POLARQUANT_WORKERS, else the configured value.
int effective_workers(int configured);

} // namespace polarquant
