#include "polarquant/fa_design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polarquant/llr_decoder.hpp"

namespace polarquant {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::ib_ib: return "ib-ib";
        case Variant::ms_ib: return "ms-ib";
        case Variant::ms_cd_nonuniform: return "ms-cd-nonuniform";
        case Variant::ms_cd_uniform: return "ms-cd-uniform";
    }
    throw std::logic_error("variant_name");
}

Variant variant_from_name(const std::string& name) {
    if (name == "ib-ib") return Variant::ib_ib;
    if (name == "ms-ib") return Variant::ms_ib;
    if (name == "ms-cd-nonuniform") return Variant::ms_cd_nonuniform;
    if (name == "ms-cd-uniform") return Variant::ms_cd_uniform;
    throw std::invalid_argument("unknown decoder variant: " + name);
}

BinaryJoint MessageDistribution::to_joint() const {
    BinaryJoint j;
    const int size = 1 << w;
    j.label.resize(size);
    for (int i = 0; i < size; ++i) j.label[i] = static_cast<double>(message_value(i, w));
    j.mass = mass;
    j.odd_symmetric = true;
    return j;
}

std::vector<double> MessageDistribution::levels(double zero_prob_clip) const {
    const int half = 1 << (w - 1);
    std::vector<double> lv(2 * half);
    for (int m = 1; m <= half; ++m) {
        double a = mass[half - 1 + m][0], b = mass[half - 1 + m][1];
        double val;
        if (a > 0.0 && b > 0.0)
            val = std::log(a / b);
        else if (a > 0.0)
            val = zero_prob_clip;
        else if (b > 0.0)
            val = -zero_prob_clip;
        else
            val = zero_prob_clip; // dead positive-side message
        lv[half - 1 + m] = val;
        lv[half - m] = -val;
    }
    return lv;
}

double MessageDistribution::mi() const { return mutual_information(to_joint()); }

int ChannelQuantizer::classify(double llr, int w) const {
    const int half = 1 << (w - 1);
    double mag = std::abs(llr);
    int c = 1;
    for (double t : thresholds) {
        if (mag > t) ++c;
        else break;
    }
    if (c > half) c = half;
    return llr < 0.0 ? -c : c;
}

int DecoderSpec::tree_depth() const {
    int n = 0;
    while ((1 << n) < N) ++n;
    return n;
}

namespace {

void check_same_alphabet(const MessageDistribution& pa, const MessageDistribution& pb) {
    if (pa.w != pb.w || pa.mass.size() != pb.mass.size())
        throw std::invalid_argument("message alphabets do not match");
}

void check_normalized(const MessageDistribution& d, const char* where) {
    double sum = 0.0;
    for (const auto& m : d.mass) sum += m[0] + m[1];
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::runtime_error(std::string("distribution drifted off normalization in ") + where);
}

// Odd-symmetric joint over canonical mirror-pair representatives:
// labels are |proxy| magnitudes, mirror masses filled from the mirrored item.
struct SymmetricItems {
    std::vector<double> proxy_mag; // per representative
    std::vector<double> mass_rep;  // p(x=0, representative)
    std::vector<double> mass_mir;  // p(x=0, mirrored item)
    std::vector<int> rep_id;       // caller's item id of the representative
};

BinaryJoint items_to_joint(SymmetricItems& it, std::vector<int>& order) {
    const std::size_t half = it.proxy_mag.size();
    order.resize(half);
    for (std::size_t i = 0; i < half; ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (it.proxy_mag[a] != it.proxy_mag[b]) return it.proxy_mag[a] < it.proxy_mag[b];
        return it.rep_id[a] < it.rep_id[b];
    });
    BinaryJoint j;
    j.odd_symmetric = true;
    j.label.resize(2 * half);
    j.mass.resize(2 * half);
    for (std::size_t k = 0; k < half; ++k) {
        int i = order[k];
        j.label[half + k] = it.proxy_mag[i];
        j.label[half - 1 - k] = -it.proxy_mag[i];
        j.mass[half + k] = {it.mass_rep[i], it.mass_mir[i]};
        j.mass[half - 1 - k] = {it.mass_mir[i], it.mass_rep[i]};
    }
    return j;
}

} // namespace

ChannelQuantizerDesign design_channel_quantizer(const NoiseConfig& noise, int w,
                                                const DesignOptions& opts) {
    FineChannel fc = discretize_channel(noise, opts.fine_bins, opts.fine_clip);
    BinaryJoint j;
    j.label = fc.support;
    j.mass = fc.joint;
    j.odd_symmetric = true;
    QuantizerResult q = optimal_symmetric_quantizer(j, w);

    ChannelQuantizerDesign out;
    out.quantizer.thresholds = q.quantizer.thresholds;
    out.dist.w = w;
    out.dist.mass = q.output.mass;
    std::vector<double> lv = out.dist.levels();
    const int half = 1 << (w - 1);
    out.quantizer.llr_levels.assign(lv.begin() + half, lv.end());
    out.preserved_mi = q.preserved_mi;
    return out;
}

MessageDistribution evolve_upper_minsum(const MessageDistribution& pa,
                                        const MessageDistribution& pb) {
    check_same_alphabet(pa, pb);
    const int w = pa.w;
    const int size = 1 << w;
    MessageDistribution out;
    out.w = w;
    out.mass.assign(size, {0.0, 0.0});
    for (int ia = 0; ia < size; ++ia) {
        int ta = message_value(ia, w);
        for (int ib = 0; ib < size; ++ib) {
            int tb = message_value(ib, w);
            int sgn = ((ta < 0) != (tb < 0)) ? -1 : 1;
            int t0 = sgn * std::min(std::abs(ta), std::abs(tb));
            // u0 = xa ^ xb = 0 row only; the mirror fills the other one
            double mass0 = pa.mass[ia][0] * pb.mass[ib][0] + pa.mass[ia][1] * pb.mass[ib][1];
            out.mass[message_index(t0, w)][0] += mass0;
        }
    }
    for (int i = 0; i < size; ++i) out.mass[i][1] = out.mass[size - 1 - i][0];
    return out;
}

UpperLutDesign evolve_upper_lut(const MessageDistribution& pa, const MessageDistribution& pb) {
    check_same_alphabet(pa, pb);
    const int w = pa.w;
    const int size = 1 << w;
    const std::vector<double> la = pa.levels(), lb = pb.levels();

    SymmetricItems items;
    const int pairs = size * size;
    items.proxy_mag.reserve(pairs / 2);
    for (int ia = 0; ia < size; ++ia) {
        for (int ib = 0; ib < size; ++ib) {
            double proxy = boxplus(la[ia], lb[ib]);
            // zero-LLR side rule chosen so the table is odd in each operand
            // alone and even under flipping both
            bool rep = proxy > 0.0 ||
                       (proxy == 0.0 && (ia >= size / 2) == (ib >= size / 2));
            if (!rep) continue;
            int ia_m = size - 1 - ia; // mirror flips the first operand
            items.proxy_mag.push_back(std::abs(proxy));
            items.rep_id.push_back(ia * size + ib);
            items.mass_rep.push_back(pa.mass[ia][0] * pb.mass[ib][0] +
                                     pa.mass[ia][1] * pb.mass[ib][1]);
            items.mass_mir.push_back(pa.mass[ia_m][0] * pb.mass[ib][0] +
                                     pa.mass[ia_m][1] * pb.mass[ib][1]);
        }
    }
    if (static_cast<int>(items.proxy_mag.size()) != pairs / 2)
        throw std::logic_error("evolve_upper_lut: mirror pairing broke");

    std::vector<int> order;
    BinaryJoint joint = items_to_joint(items, order);
    QuantizerResult q = optimal_symmetric_quantizer(joint, w);

    UpperLutDesign res;
    res.table.assign(pairs, 0);
    const std::size_t half = items.proxy_mag.size();
    for (std::size_t k = 0; k < half; ++k) {
        int item = order[k];
        int id = items.rep_id[item];
        int ia = id / size, ib = id % size;
        int msg = q.assignment[half + k];
        res.table[id] = static_cast<std::int8_t>(msg);
        res.table[(size - 1 - ia) * size + ib] = static_cast<std::int8_t>(-msg);
    }
    res.out.w = w;
    res.out.mass = q.output.mass;
    res.preserved_mi = q.preserved_mi;
    return res;
}

namespace {

struct TripleJoint {
    SymmetricItems items;
    std::vector<int> order;
    BinaryJoint joint;
};

// q(u1=0, (ta,tb,u0)) = pa(u0, ta) pb(0, tb); proxy LLR (-1)^u0 La(ta) + Lb(tb)
TripleJoint build_triple_joint(const MessageDistribution& pa, const MessageDistribution& pb) {
    const int w = pa.w;
    const int size = 1 << w;
    const std::vector<double> la = pa.levels(), lb = pb.levels();
    TripleJoint tj;
    for (int ia = 0; ia < size; ++ia) {
        for (int ib = 0; ib < size; ++ib) {
            for (int u0 = 0; u0 < 2; ++u0) {
                double proxy = (u0 ? -la[ia] : la[ia]) + lb[ib];
                // zero-LLR side rule invariant under (flip ta, flip u0)
                bool rep = proxy > 0.0 || (proxy == 0.0 && ib >= size / 2);
                if (!rep) continue;
                int ia_m = size - 1 - ia, ib_m = size - 1 - ib;
                tj.items.proxy_mag.push_back(std::abs(proxy));
                tj.items.rep_id.push_back((ia * size + ib) * 2 + u0);
                tj.items.mass_rep.push_back(pa.mass[ia][u0] * pb.mass[ib][0]);
                tj.items.mass_mir.push_back(pa.mass[ia_m][u0] * pb.mass[ib_m][0]);
            }
        }
    }
    if (static_cast<int>(tj.items.proxy_mag.size()) != size * size)
        throw std::logic_error("build_triple_joint: mirror pairing broke");
    tj.joint = items_to_joint(tj.items, tj.order);
    return tj;
}

std::vector<int> translation_table(const std::vector<double>& levels, int w, double s, int iota) {
    const int half = 1 << (w - 1);
    std::vector<int> phi(half);
    for (int m = 1; m <= half; ++m) {
        double mag = std::abs(levels[half - 1 + m]);
        phi[m - 1] = std::min(static_cast<int>(std::floor(s * mag + 0.5)), iota);
    }
    return phi;
}

// Histogram of q(u1=0, v) over the integer sum v = +-phi_a +- phi_b.
std::vector<double> integer_sum_hist(const MessageDistribution& pa, const MessageDistribution& pb,
                                     const std::vector<int>& phi_a, const std::vector<int>& phi_b,
                                     int iota) {
    const int w = pa.w;
    const int size = 1 << w;
    std::vector<double> hist(4 * iota + 1, 0.0);
    for (int ia = 0; ia < size; ++ia) {
        int ta = message_value(ia, w);
        int va = (ta < 0 ? -1 : 1) * phi_a[std::abs(ta) - 1];
        for (int ib = 0; ib < size; ++ib) {
            int tb = message_value(ib, w);
            int vb = (tb < 0 ? -1 : 1) * phi_b[std::abs(tb) - 1];
            for (int u0 = 0; u0 < 2; ++u0) {
                int v = (u0 ? -va : va) + vb;
                hist[v + 2 * iota] += pa.mass[ia][u0] * pb.mass[ib][0];
            }
        }
    }
    return hist;
}

// Full-grid symmetric joint over v in [-2 iota, 2 iota]; v = 0 is split into
// a +-0 label pair so odd symmetry stays exact.
BinaryJoint integer_sum_joint(const std::vector<double>& hist, int iota) {
    const int top = 2 * iota;
    BinaryJoint j;
    j.odd_symmetric = true;
    const int half = top + 1; // magnitudes 0..2 iota
    j.label.resize(2 * half);
    j.mass.resize(2 * half);
    for (int m = 0; m <= top; ++m) {
        double pos = (m == 0) ? 0.5 * hist[top] : hist[top + m];
        double neg = (m == 0) ? 0.5 * hist[top] : hist[top - m];
        j.label[half + m] = static_cast<double>(m);
        j.label[half - 1 - m] = static_cast<double>(-m);
        j.mass[half + m] = {pos, neg};
        j.mass[half - 1 - m] = {neg, pos};
    }
    return j;
}

MessageDistribution clip_shift_output(const std::vector<double>& hist, int iota, int r, int w) {
    const int half = 1 << (w - 1);
    const int top = 2 * iota;
    MessageDistribution out;
    out.w = w;
    out.mass.assign(2 * half, {0.0, 0.0});
    for (int v = -top; v <= top; ++v) {
        double m0 = hist[top + v];
        if (v == 0) {
            out.mass[message_index(1, w)][0] += 0.5 * m0;
            out.mass[message_index(-1, w)][0] += 0.5 * m0;
            continue;
        }
        int mag = std::min((std::abs(v) >> r) + 1, half);
        out.mass[message_index(v < 0 ? -mag : mag, w)][0] += m0;
    }
    for (int i = 0; i < 2 * half; ++i) out.mass[i][1] = out.mass[2 * half - 1 - i][0];
    return out;
}

bool all_clipped(const std::vector<int>& phi, int iota) {
    for (int v : phi)
        if (v != iota) return false;
    return true;
}

} // namespace

LowerDesign evolve_lower(const MessageDistribution& pa, const MessageDistribution& pb,
                         NodeLower::Kind kind, int w_internal,
                         const std::vector<double>& s_grid) {
    check_same_alphabet(pa, pb);
    const int w = pa.w;
    const int iota = (1 << (w_internal - 1)) - 1;
    LowerDesign res;
    res.params.kind = kind;

    if (kind == NodeLower::Kind::lut) {
        TripleJoint tj = build_triple_joint(pa, pb);
        QuantizerResult q = optimal_symmetric_quantizer(tj.joint, w);
        const int size = 1 << w;
        res.params.table.assign(2 * size * size, 0);
        const std::size_t half = tj.items.proxy_mag.size();
        for (std::size_t k = 0; k < half; ++k) {
            int item = tj.order[k];
            int id = tj.items.rep_id[item];
            int u0 = id & 1;
            int ia = (id >> 1) / size, ib = (id >> 1) % size;
            int msg = q.assignment[half + k];
            res.params.table[id] = static_cast<std::int8_t>(msg);
            int id_m = ((size - 1 - ia) * size + (size - 1 - ib)) * 2 + u0;
            res.params.table[id_m] = static_cast<std::int8_t>(-msg);
        }
        res.out.w = w;
        res.out.mass = q.output.mass;
        res.preserved_mi = q.preserved_mi;
        return res;
    }

    const std::vector<double> grid = s_grid.empty() ? default_scale_grid() : s_grid;
    const std::vector<double> la = pa.levels(), lb = pb.levels();

    if (kind == NodeLower::Kind::cd_nonuniform) {
        double best_mi = -1.0;
        for (double s : grid) {
            auto phi_a = translation_table(la, w, s, iota);
            auto phi_b = translation_table(lb, w, s, iota);
            auto hist = integer_sum_hist(pa, pb, phi_a, phi_b, iota);
            QuantizerResult q = optimal_symmetric_quantizer(integer_sum_joint(hist, iota), w);
            if (q.preserved_mi > best_mi) {
                best_mi = q.preserved_mi;
                res.scale = s;
                res.params.phi_a = phi_a;
                res.params.phi_b = phi_b;
                res.params.thresholds.clear();
                for (int b : q.boundaries)
                    res.params.thresholds.push_back(static_cast<int>(q.class_magnitude[b]));
                res.out.w = w;
                res.out.mass = q.output.mass;
                res.preserved_mi = q.preserved_mi;
            }
        }
    } else {
        auto quantized = [&](double s, int r) {
            auto phi_a = translation_table(la, w, s, iota);
            auto phi_b = translation_table(lb, w, s, iota);
            auto hist = integer_sum_hist(pa, pb, phi_a, phi_b, iota);
            return clip_shift_output(hist, iota, r, w).to_joint();
        };
        UniformQuantizerParams p =
            uniform_grid_search(quantized, grid, 0, w_internal - w, w, w_internal);
        res.scale = p.s;
        res.params.shift = p.r;
        res.params.phi_a = translation_table(la, w, p.s, iota);
        res.params.phi_b = translation_table(lb, w, p.s, iota);
        auto hist = integer_sum_hist(pa, pb, res.params.phi_a, res.params.phi_b, iota);
        res.out = clip_shift_output(hist, iota, p.r, w);
        res.preserved_mi = res.out.mi();
    }

    res.degenerate = all_clipped(res.params.phi_a, iota) && all_clipped(res.params.phi_b, iota);
    return res;
}

LowerMiProbe probe_lower_variants(const MessageDistribution& pa, const MessageDistribution& pb,
                                  int w_internal, const std::vector<double>& s_grid) {
    LowerMiProbe probe;
    probe.lut = evolve_lower(pa, pb, NodeLower::Kind::lut, w_internal, s_grid).preserved_mi;
    probe.cd_nonuniform =
        evolve_lower(pa, pb, NodeLower::Kind::cd_nonuniform, w_internal, s_grid).preserved_mi;
    probe.cd_uniform =
        evolve_lower(pa, pb, NodeLower::Kind::cd_uniform, w_internal, s_grid).preserved_mi;
    return probe;
}

namespace {

LeafLlr make_leaf_llr(const MessageDistribution& d, int iota) {
    const int half = 1 << (d.w - 1);
    std::vector<double> lv = d.levels();
    LeafLlr leaf;
    leaf.levels.resize(half);
    double max_finite = 0.0;
    for (int m = 1; m <= half; ++m) {
        leaf.levels[m - 1] = std::abs(lv[half - 1 + m]);
        if (leaf.levels[m - 1] < kZeroProbLlrClip)
            max_finite = std::max(max_finite, leaf.levels[m - 1]);
    }
    leaf.scale = max_finite > 0.0 ? iota / max_finite : 1.0;
    leaf.levels_int.resize(half);
    for (int m = 0; m < half; ++m)
        leaf.levels_int[m] =
            std::min(static_cast<int>(std::floor(leaf.scale * leaf.levels[m] + 0.5)), iota);
    return leaf;
}

NodeLower::Kind lower_kind_of(Variant v) {
    switch (v) {
        case Variant::ib_ib:
        case Variant::ms_ib: return NodeLower::Kind::lut;
        case Variant::ms_cd_nonuniform: return NodeLower::Kind::cd_nonuniform;
        case Variant::ms_cd_uniform: return NodeLower::Kind::cd_uniform;
    }
    throw std::logic_error("lower_kind_of");
}

} // namespace

DesignResult design_decoder(const CodeConfig& cfg, int w, int w_internal,
                            double design_ebn0_db, Variant variant, const DesignOptions& opts) {
    cfg.validate();
    if (w < 2 || w > 6) throw std::invalid_argument("design_decoder: supported w is 2..6");
    if (w_internal < w || w_internal > 12)
        throw std::invalid_argument("design_decoder: need w <= w' <= 12");

    const double rate = static_cast<double>(cfg.info_length) / cfg.block_length;
    NoiseConfig noise = make_noise(design_ebn0_db, rate);
    ChannelQuantizerDesign chq = design_channel_quantizer(noise, w, opts);

    DesignResult result;
    DecoderSpec& spec = result.spec;
    spec.variant = variant_name(variant);
    spec.N = cfg.block_length;
    spec.w = w;
    spec.w_internal = w_internal;
    spec.design_ebn0_db = design_ebn0_db;
    spec.channel_quantizer = chq.quantizer;
    spec.nodes.reserve(cfg.block_length - 1);
    result.channel_mi = chq.preserved_mi;

    const int iota = (1 << (w_internal - 1)) - 1;
    const NodeLower::Kind lower_kind = lower_kind_of(variant);
    const std::vector<double> grid = opts.s_grid.empty() ? default_scale_grid() : opts.s_grid;

    std::vector<MessageDistribution> current{chq.dist};
    for (int level = 1; level <= cfg.n; ++level) {
        std::vector<MessageDistribution> next(std::size_t(1) << level);
        for (int psi = 0; psi < (1 << (level - 1)); ++psi) {
            const MessageDistribution& d = current[psi];
            NodeParams np;
            np.level = level;
            np.index = psi;

            MessageDistribution up_out;
            if (variant == Variant::ib_ib) {
                UpperLutDesign ul = evolve_upper_lut(d, d);
                np.upper.kind = NodeUpper::Kind::lut;
                np.upper.table = std::move(ul.table);
                up_out = std::move(ul.out);
                if (opts.collect_diagnostics) result.node_upper_mi.push_back(ul.preserved_mi);
            } else {
                np.upper.kind = NodeUpper::Kind::minsum;
                up_out = evolve_upper_minsum(d, d);
                if (opts.collect_diagnostics) result.node_upper_mi.push_back(up_out.mi());
            }

            LowerDesign ld = evolve_lower(d, d, lower_kind, w_internal, grid);
            if (ld.degenerate)
                throw std::runtime_error("design_decoder: degenerate design (level " +
                                         std::to_string(level) + ", node " + std::to_string(psi) +
                                         "): every translation magnitude clips to iota");
            np.lower = std::move(ld.params);
            if (opts.collect_diagnostics) result.node_lower_mi.push_back(ld.preserved_mi);

            check_normalized(up_out, "upper evolution");
            check_normalized(ld.out, "lower evolution");

            if (level == cfg.n) {
                np.leaf_upper = make_leaf_llr(up_out, iota);
                np.leaf_lower = make_leaf_llr(ld.out, iota);
            }
            spec.nodes.push_back(std::move(np));
            next[2 * psi] = std::move(up_out);
            next[2 * psi + 1] = std::move(ld.out);
        }
        current = std::move(next);
    }

    result.leaf_mi.resize(cfg.block_length);
    for (int i = 0; i < cfg.block_length; ++i) result.leaf_mi[i] = current[i].mi();
    return result;
}

int memory_footprint(NodeLower::Kind kind, int w, int w_internal) {
    switch (kind) {
        case NodeLower::Kind::lut: return w * (1 << (2 * w + 1));
        case NodeLower::Kind::cd_nonuniform:
            return (2 * (w_internal - 1) + w_internal) * (1 << (w - 1));
        case NodeLower::Kind::cd_uniform: return 2 * (w_internal - 1) * (1 << (w - 1));
    }
    throw std::logic_error("memory_footprint");
}

std::vector<std::int8_t> materialize_lower_lut(const NodeLower& params, int w) {
    if (params.kind == NodeLower::Kind::lut) return params.table;
    const int size = 1 << w;
    const int half = size / 2;
    std::vector<std::int8_t> table(2 * size * size);
    for (int ia = 0; ia < size; ++ia) {
        int ta = message_value(ia, w);
        for (int ib = 0; ib < size; ++ib) {
            int tb = message_value(ib, w);
            for (int u0 = 0; u0 < 2; ++u0) {
                bool neg_a = (ta < 0) != (u0 != 0);
                int va = (neg_a ? -1 : 1) * params.phi_a[std::abs(ta) - 1];
                int vb = (tb < 0 ? -1 : 1) * params.phi_b[std::abs(tb) - 1];
                int v = va + vb;
                int mag;
                if (params.kind == NodeLower::Kind::cd_nonuniform) {
                    mag = 1;
                    for (int t : params.thresholds)
                        if (std::abs(v) > t) ++mag;
                    mag = std::min(mag, half);
                } else {
                    mag = std::min((std::abs(v) >> params.shift) + 1, half);
                }
                int t1 = (v < 0) ? -mag : mag;
                table[(ia * size + ib) * 2 + u0] = static_cast<std::int8_t>(t1);
            }
        }
    }
    return table;
}

} // namespace polarquant
