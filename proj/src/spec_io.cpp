#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "polarquant/fa_design.hpp"

namespace polarquant {

namespace {

// Canonical writer: fixed key order, fixed layout, doubles at 17 significant
// digits, so serialize -> parse -> serialize is byte-identical.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_doubles(std::ostream& os, const std::vector<double>& vals) {
    os << '[';
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) os << ", ";
        os << fmt(vals[i]);
    }
    os << ']';
}

template <class Int>
void write_ints(std::ostream& os, const std::vector<Int>& vals) {
    os << '[';
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) os << ", ";
        os << static_cast<long long>(vals[i]);
    }
    os << ']';
}

void write_leaf(std::ostream& os, const LeafLlr& leaf) {
    os << "{\"levels\": ";
    write_doubles(os, leaf.levels);
    os << ", \"levels_int\": ";
    write_ints(os, leaf.levels_int);
    os << ", \"scale\": " << fmt(leaf.scale) << "}";
}

const char* lower_kind_name(NodeLower::Kind k) {
    switch (k) {
        case NodeLower::Kind::lut: return "lut";
        case NodeLower::Kind::cd_nonuniform: return "cd_nonuniform";
        case NodeLower::Kind::cd_uniform: return "cd_uniform";
    }
    throw std::logic_error("lower_kind_name");
}

} // namespace

std::string dump_spec(const DecoderSpec& spec) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"schema_version\": " << spec.schema_version << ",\n";
    os << "  \"variant\": \"" << spec.variant << "\",\n";
    os << "  \"N\": " << spec.N << ",\n";
    os << "  \"w\": " << spec.w << ",\n";
    os << "  \"w_internal\": " << spec.w_internal << ",\n";
    os << "  \"design_ebn0_db\": " << fmt(spec.design_ebn0_db) << ",\n";
    os << "  \"channel_quantizer\": {\"thresholds\": ";
    write_doubles(os, spec.channel_quantizer.thresholds);
    os << ", \"llr_levels\": ";
    write_doubles(os, spec.channel_quantizer.llr_levels);
    os << "},\n";
    os << "  \"nodes\": [\n";
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const NodeParams& np = spec.nodes[i];
        os << "    {\"level\": " << np.level << ", \"index\": " << np.index;
        os << ", \"upper\": {\"kind\": \""
           << (np.upper.kind == NodeUpper::Kind::minsum ? "minsum" : "lut") << "\"";
        if (np.upper.kind == NodeUpper::Kind::lut) {
            os << ", \"table\": ";
            write_ints(os, np.upper.table);
        }
        os << "}, \"lower\": {\"kind\": \"" << lower_kind_name(np.lower.kind) << "\"";
        switch (np.lower.kind) {
            case NodeLower::Kind::lut:
                os << ", \"table\": ";
                write_ints(os, np.lower.table);
                break;
            case NodeLower::Kind::cd_nonuniform:
                os << ", \"phi_a\": ";
                write_ints(os, np.lower.phi_a);
                os << ", \"phi_b\": ";
                write_ints(os, np.lower.phi_b);
                os << ", \"thresholds\": ";
                write_ints(os, np.lower.thresholds);
                break;
            case NodeLower::Kind::cd_uniform:
                os << ", \"phi_a\": ";
                write_ints(os, np.lower.phi_a);
                os << ", \"phi_b\": ";
                write_ints(os, np.lower.phi_b);
                os << ", \"shift\": " << np.lower.shift;
                break;
        }
        os << "}";
        if (np.leaf_upper) {
            os << ", \"decision_llr\": {\"upper\": ";
            write_leaf(os, *np.leaf_upper);
            os << ", \"lower\": ";
            write_leaf(os, *np.leaf_lower);
            os << "}";
        }
        os << "}" << (i + 1 < spec.nodes.size() ? "," : "") << "\n";
    }
    os << "  ]\n}\n";
    return os.str();
}

namespace {

using nlohmann::json;

std::vector<double> get_doubles(const json& arr) {
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) out.push_back(v.get<double>());
    return out;
}

std::vector<int> get_ints(const json& arr) {
    std::vector<int> out;
    out.reserve(arr.size());
    for (const auto& v : arr) out.push_back(v.get<int>());
    return out;
}

std::vector<std::int8_t> get_table(const json& arr, int w) {
    const int half = 1 << (w - 1);
    std::vector<std::int8_t> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        int t = v.get<int>();
        if (t == 0 || t < -half || t > half)
            throw std::runtime_error("parse_spec: table entry outside message alphabet");
        out.push_back(static_cast<std::int8_t>(t));
    }
    return out;
}

void check_translation(const std::vector<int>& phi, int half, int iota) {
    if (static_cast<int>(phi.size()) != half)
        throw std::runtime_error("parse_spec: translation table size");
    for (int v : phi)
        if (v < 0 || v > iota)
            throw std::runtime_error("parse_spec: translation magnitude exceeds iota");
}

LeafLlr get_leaf(const json& j) {
    LeafLlr leaf;
    leaf.levels = get_doubles(j.at("levels"));
    leaf.levels_int = get_ints(j.at("levels_int"));
    leaf.scale = j.at("scale").get<double>();
    return leaf;
}

} // namespace

DecoderSpec parse_spec(const std::string& text) {
    json j = json::parse(text);
    DecoderSpec spec;
    spec.schema_version = j.at("schema_version").get<int>();
    if (spec.schema_version != 1)
        throw std::runtime_error("parse_spec: unsupported schema_version");
    spec.variant = j.at("variant").get<std::string>();
    variant_from_name(spec.variant);
    spec.N = j.at("N").get<int>();
    spec.w = j.at("w").get<int>();
    spec.w_internal = j.at("w_internal").get<int>();
    spec.design_ebn0_db = j.at("design_ebn0_db").get<double>();
    spec.channel_quantizer.thresholds = get_doubles(j.at("channel_quantizer").at("thresholds"));
    spec.channel_quantizer.llr_levels = get_doubles(j.at("channel_quantizer").at("llr_levels"));

    const int half = 1 << (spec.w - 1);
    if (static_cast<int>(spec.channel_quantizer.thresholds.size()) != half - 1 ||
        static_cast<int>(spec.channel_quantizer.llr_levels.size()) != half)
        throw std::runtime_error("parse_spec: channel quantizer has wrong sizes");

    const int iota = (1 << (spec.w_internal - 1)) - 1;
    for (const auto& jn : j.at("nodes")) {
        NodeParams np;
        np.level = jn.at("level").get<int>();
        np.index = jn.at("index").get<int>();
        const auto& ju = jn.at("upper");
        std::string ukind = ju.at("kind").get<std::string>();
        if (ukind == "minsum") {
            np.upper.kind = NodeUpper::Kind::minsum;
        } else if (ukind == "lut") {
            np.upper.kind = NodeUpper::Kind::lut;
            np.upper.table = get_table(ju.at("table"), spec.w);
            if (static_cast<int>(np.upper.table.size()) != (1 << (2 * spec.w)))
                throw std::runtime_error("parse_spec: upper table size");
        } else {
            throw std::runtime_error("parse_spec: unknown upper kind " + ukind);
        }
        const auto& jl = jn.at("lower");
        std::string lkind = jl.at("kind").get<std::string>();
        if (lkind == "lut") {
            np.lower.kind = NodeLower::Kind::lut;
            np.lower.table = get_table(jl.at("table"), spec.w);
            if (static_cast<int>(np.lower.table.size()) != (1 << (2 * spec.w + 1)))
                throw std::runtime_error("parse_spec: lower table size");
        } else if (lkind == "cd_nonuniform") {
            np.lower.kind = NodeLower::Kind::cd_nonuniform;
            np.lower.phi_a = get_ints(jl.at("phi_a"));
            np.lower.phi_b = get_ints(jl.at("phi_b"));
            np.lower.thresholds = get_ints(jl.at("thresholds"));
            if (static_cast<int>(np.lower.thresholds.size()) != half - 1)
                throw std::runtime_error("parse_spec: threshold count");
            for (std::size_t i = 0; i < np.lower.thresholds.size(); ++i) {
                int t = np.lower.thresholds[i];
                if (t < 0 || t > 2 * iota || (i > 0 && t <= np.lower.thresholds[i - 1]))
                    throw std::runtime_error("parse_spec: thresholds not strictly increasing");
            }
        } else if (lkind == "cd_uniform") {
            np.lower.kind = NodeLower::Kind::cd_uniform;
            np.lower.phi_a = get_ints(jl.at("phi_a"));
            np.lower.phi_b = get_ints(jl.at("phi_b"));
            np.lower.shift = jl.at("shift").get<int>();
            if (np.lower.shift < 0 || np.lower.shift > spec.w_internal)
                throw std::runtime_error("parse_spec: shift out of range");
        } else {
            throw std::runtime_error("parse_spec: unknown lower kind " + lkind);
        }
        if (np.lower.kind != NodeLower::Kind::lut) {
            check_translation(np.lower.phi_a, half, iota);
            check_translation(np.lower.phi_b, half, iota);
        }
        if (jn.contains("decision_llr")) {
            np.leaf_upper = get_leaf(jn.at("decision_llr").at("upper"));
            np.leaf_lower = get_leaf(jn.at("decision_llr").at("lower"));
        }
        spec.nodes.push_back(std::move(np));
    }
    if (static_cast<int>(spec.nodes.size()) != spec.N - 1)
        throw std::runtime_error("parse_spec: node count != N-1");
    // nodes must appear in tree order, decision tables on the deepest level
    const int depth = spec.tree_depth();
    std::size_t pos = 0;
    for (int level = 1; level <= depth; ++level) {
        for (int idx = 0; idx < (1 << (level - 1)); ++idx, ++pos) {
            const NodeParams& np = spec.nodes[pos];
            if (np.level != level || np.index != idx)
                throw std::runtime_error("parse_spec: nodes out of tree order");
            if ((level == depth) != (np.leaf_upper && np.leaf_lower))
                throw std::runtime_error("parse_spec: decision tables misplaced");
        }
    }
    return spec;
}

DecoderSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str());
}

void save_spec_file(const DecoderSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write spec file: " + path);
    out << dump_spec(spec);
}

} // namespace polarquant
