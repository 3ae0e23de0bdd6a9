#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polarquant/channel.hpp"
#include "polarquant/infoquant.hpp"
#include "polarquant/types.hpp"

namespace polarquant {

enum class Variant { ib_ib, ms_ib, ms_cd_nonuniform, ms_cd_uniform };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// Index of message t in {-2^(w-1),..,-1,+1,..,+2^(w-1)}, ordered ascending.
inline int message_index(int t, int w) {
    const int half = 1 << (w - 1);
    return t < 0 ? t + half : t + half - 1;
}

inline int message_value(int idx, int w) {
    const int half = 1 << (w - 1);
    return idx < half ? idx - half : idx - half + 1;
}

/// Joint p(x, t) over the symmetric message alphabet; odd symmetry
/// p(0, t) = p(1, -t) holds exactly by construction.
struct MessageDistribution {
    int w = 0;
    std::vector<std::array<double, 2>> mass; // indexed by message_index

    BinaryJoint to_joint() const;
    /// L(t) per message, mirror-exact: level(-t) == -level(t).
    std::vector<double> levels(double zero_prob_clip = kZeroProbLlrClip) const;
    double mi() const;
};

struct NodeUpper {
    enum class Kind { minsum, lut } kind = Kind::minsum;
    std::vector<std::int8_t> table; // 2^(2w) entries for Kind::lut
};

struct NodeLower {
    enum class Kind { lut, cd_nonuniform, cd_uniform } kind = Kind::lut;
    std::vector<std::int8_t> table; // 2^(2w+1) entries for Kind::lut
    std::vector<int> phi_a, phi_b;  // translation magnitudes per |t| = 1..2^(w-1)
    std::vector<int> thresholds;    // cd_nonuniform: 2^(w-1)-1 integer magnitudes
    int shift = 0;                  // cd_uniform
};

/// Decision-level LLR table of one leaf: full-precision magnitudes plus the
/// integer-resolution copy the runtime metric uses.
struct LeafLlr {
    std::vector<double> levels;   // |L(+m)| for m = 1..2^(w-1)
    std::vector<int> levels_int;  // round(scale * level), clipped to iota
    double scale = 1.0;
};

struct NodeParams {
    int level = 0; // 1..n, distance from the channel
    int index = 0; // 0..2^(level-1)-1
    NodeUpper upper;
    NodeLower lower;
    std::optional<LeafLlr> leaf_upper, leaf_lower; // deepest level only
};

struct ChannelQuantizer {
    std::vector<double> thresholds; // LLR domain, 2^(w-1)-1 ascending
    std::vector<double> llr_levels; // L(+m) for m = 1..2^(w-1)

    int classify(double llr, int w) const;
};

struct DecoderSpec {
    int schema_version = 1;
    std::string variant;
    int N = 0;
    int w = 0;
    int w_internal = 0;
    double design_ebn0_db = 0.0;
    ChannelQuantizer channel_quantizer;
    std::vector<NodeParams> nodes; // N-1, tree order (level 1 first)

    int tree_depth() const;
    const NodeParams& node(int level, int index) const {
        return nodes[(std::size_t(1) << (level - 1)) - 1 + index];
    }
};

struct DesignOptions {
    int fine_bins = 2000;
    double fine_clip = 24.0;
    std::vector<double> s_grid;   // empty = default_scale_grid()
    bool collect_diagnostics = false;
};

struct ChannelQuantizerDesign {
    ChannelQuantizer quantizer;
    MessageDistribution dist;
    double preserved_mi = 0.0;
};

ChannelQuantizerDesign design_channel_quantizer(const NoiseConfig& noise, int w,
                                                const DesignOptions& opts = {});

/// Exact distribution of t0 = sgn(ta)sgn(tb) min(|ta|,|tb|) with u0 = xa^xb.
MessageDistribution evolve_upper_minsum(const MessageDistribution& pa,
                                        const MessageDistribution& pb);

struct UpperLutDesign {
    std::vector<std::int8_t> table; // 2^(2w)
    MessageDistribution out;
    double preserved_mi = 0.0;
};

UpperLutDesign evolve_upper_lut(const MessageDistribution& pa, const MessageDistribution& pb);

struct LowerDesign {
    NodeLower params;
    MessageDistribution out;
    double preserved_mi = 0.0;
    double scale = 0.0; // s chosen for the translations (cd variants)
    bool degenerate = false;
};

LowerDesign evolve_lower(const MessageDistribution& pa, const MessageDistribution& pb,
                         NodeLower::Kind kind, int w_internal,
                         const std::vector<double>& s_grid = {});

/// Preserved MI of all three lower-branch realizations on the same inputs.
struct LowerMiProbe {
    double lut = 0.0, cd_nonuniform = 0.0, cd_uniform = 0.0;
};
LowerMiProbe probe_lower_variants(const MessageDistribution& pa, const MessageDistribution& pb,
                                  int w_internal, const std::vector<double>& s_grid = {});

struct DesignResult {
    DecoderSpec spec;
    std::vector<double> leaf_mi;        // N entries
    double channel_mi = 0.0;            // preserved MI of the channel quantizer
    std::vector<double> node_upper_mi;  // diagnostics, N-1 entries when collected
    std::vector<double> node_lower_mi;
};

/// Quantized density evolution through the n tree levels; one NodeParams per
/// internal node, decision LLR tables on the deepest level.
DesignResult design_decoder(const CodeConfig& cfg, int w, int w_internal,
                            double design_ebn0_db, Variant variant,
                            const DesignOptions& opts = {});

/// Bits per lower-branch node (Table of lower-branch update complexity).
int memory_footprint(NodeLower::Kind kind, int w, int w_internal);

/// Materialize the mapping a cd_* node realizes, by plain integer arithmetic
/// (reference path; the runtime uses the bit-level datapath).
std::vector<std::int8_t> materialize_lower_lut(const NodeLower& params, int w);

std::string dump_spec(const DecoderSpec& spec);
DecoderSpec parse_spec(const std::string& text);
DecoderSpec load_spec_file(const std::string& path);
void save_spec_file(const DecoderSpec& spec, const std::string& path);

} // namespace polarquant
