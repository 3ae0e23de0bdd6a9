#include "polarquant/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "polarquant/channel.hpp"
#include "polarquant/codec.hpp"
#include "polarquant/fa_runtime.hpp"
#include "polarquant/llr_decoder.hpp"
#include "polarquant/rng.hpp"

namespace polarquant {

namespace {

constexpr std::int64_t kFrameBatch = 1024; // stop-rule granularity, scheduling-independent

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool is_fa(const std::string& kind) { return kind == "fa-sc" || kind == "fa-scl"; }
bool is_list(const std::string& kind) { return kind == "llr-scl" || kind == "fa-scl"; }

CodeConfig build_code_config(const ExperimentConfig& cfg) {
    int total = cfg.K + (cfg.crc.enabled ? cfg.crc.length : 0);
    if (!cfg.info_set.empty()) {
        CodeConfig code;
        code.block_length = cfg.N;
        code.n = 0;
        while ((1 << code.n) < cfg.N) ++code.n;
        code.info_length = total;
        code.info_set = cfg.info_set;
        code.validate();
        return code;
    }
    Construction method =
        cfg.construction == "nr5g" ? Construction::nr5g : Construction::bhattacharyya;
    return make_code_config(cfg.N, total, method);
}

CrcConfig build_crc(const ExperimentConfig& cfg) {
    return CrcConfig{cfg.crc.polynomial, 0, cfg.crc.length};
}

// Per-worker decode state for one sweep point, reused across its frames.
struct FrameContext {
    const ExperimentConfig* cfg = nullptr;
    std::uint64_t point = 0;
    CodeConfig code;
    CrcConfig crc;
    NoiseConfig noise;
    std::unique_ptr<ScDecoder> llr_sc;
    std::unique_ptr<SclDecoder> llr_scl;
    std::unique_ptr<FaScDecoder> fa_sc;
    std::unique_ptr<FaSclDecoder> fa_scl;

    FrameContext(const ExperimentConfig& c, const DecoderSpec* spec, std::uint64_t point_index)
        : cfg(&c), point(point_index) {
        code = build_code_config(c);
        crc = build_crc(c);
        const double rate = static_cast<double>(c.K) / c.N;
        noise = make_noise(c.ebn0_sweep_db[point_index], rate);
        const CrcConfig* crc_ptr = c.crc.enabled ? &crc : nullptr;
        FaOptions fa_opt;
        if (spec) {
            fa_opt.conversion = c.decoder.conversion == "simplified" ? Conversion::simplified
                                                                     : Conversion::accurate;
            fa_opt.alt_sign_invert = c.decoder.alt_sign_invert;
            // the channel quantizer is a fixed receiver: map the operating
            // LLRs onto the design LLR domain
            double sigma_design = ebn0_to_sigma(spec->design_ebn0_db, rate);
            fa_opt.channel_llr_scale =
                (noise.sigma * noise.sigma) / (sigma_design * sigma_design);
        }
        if (c.decoder.kind == "llr-sc") {
            llr_sc = std::make_unique<ScDecoder>(code);
        } else if (c.decoder.kind == "llr-scl") {
            llr_scl = std::make_unique<SclDecoder>(code, c.N_L, crc_ptr);
        } else if (c.decoder.kind == "fa-sc") {
            fa_sc = std::make_unique<FaScDecoder>(*spec, code, fa_opt);
        } else if (c.decoder.kind == "fa-scl") {
            fa_scl = std::make_unique<FaSclDecoder>(*spec, code, c.N_L, crc_ptr, fa_opt);
        } else {
            throw std::invalid_argument("unknown decoder kind: " + c.decoder.kind);
        }
    }

    bool run(std::uint64_t frame_index) {
        const ExperimentConfig& c = *cfg;
        RngStream rng(c.seed, point, frame_index);
        BitBlock payload(c.K);
        if (!c.all_zero_payload)
            for (auto& b : payload) b = rng.bit();
        BitBlock block = c.crc.enabled ? crc_attach(payload, crc) : payload;
        BitBlock u = build_message(block, code);
        BitBlock x = polar_encode(u, code);
        std::vector<double> llrs = transmit(x, noise, rng);

        BitBlock decoded;
        if (llr_sc) {
            BitBlock u_hat = llr_sc->decode(llrs);
            decoded.reserve(c.K);
            for (int i = 0; i < c.K; ++i) decoded.push_back(u_hat[code.info_set[i]]);
        } else if (fa_sc) {
            BitBlock u_hat = fa_sc->decode(llrs);
            decoded.reserve(c.K);
            for (int i = 0; i < c.K; ++i) decoded.push_back(u_hat[code.info_set[i]]);
        } else if (llr_scl) {
            decoded = llr_scl->decode(llrs);
        } else {
            decoded = fa_scl->decode(llrs);
        }
        if (static_cast<int>(decoded.size()) > c.K) decoded.resize(c.K);
        return decoded != payload;
    }
};

struct PointOutcome {
    std::uint64_t frames = 0;
    std::uint64_t errors = 0;
    double wallclock_s = 0.0;
};

PointOutcome run_point(const ExperimentConfig& cfg, const DecoderSpec* spec,
                       std::uint64_t point_index, int workers) {
    auto t0 = std::chrono::steady_clock::now();
    PointOutcome out;
    std::int64_t frames_done = 0;
    std::int64_t errors = 0;

    std::vector<std::unique_ptr<FrameContext>> ctx;
    for (int i = 0; i < workers; ++i)
        ctx.push_back(std::make_unique<FrameContext>(cfg, spec, point_index));

    while (frames_done < cfg.stopping.max_frames && errors < cfg.stopping.min_block_errors) {
        const std::int64_t batch = std::min(kFrameBatch, cfg.stopping.max_frames - frames_done);
        std::atomic<std::int64_t> next{frames_done};
        std::atomic<std::int64_t> batch_errors{0};
        const std::int64_t batch_end = frames_done + batch;
        auto work = [&](int worker) {
            std::int64_t local = 0;
            for (;;) {
                std::int64_t i0 = next.fetch_add(16);
                if (i0 >= batch_end) break;
                std::int64_t i1 = std::min(i0 + 16, batch_end);
                for (std::int64_t i = i0; i < i1; ++i)
                    local += ctx[worker]->run(static_cast<std::uint64_t>(i));
            }
            batch_errors.fetch_add(local);
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < workers; ++t) pool.emplace_back(work, t);
            for (auto& th : pool) th.join();
        }
        errors += batch_errors.load();
        frames_done += batch;
    }
    out.frames = static_cast<std::uint64_t>(frames_done);
    out.errors = static_cast<std::uint64_t>(errors);
    out.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace

void ExperimentConfig::validate() const {
    if (ebn0_sweep_db.empty()) throw std::invalid_argument("config: empty ebn0 sweep");
    if (stopping.min_block_errors < 1 || stopping.max_frames < 1)
        throw std::invalid_argument("config: stopping rule must be >= 1");
    if (K < 1 || N < 2) throw std::invalid_argument("config: bad code dimensions");
    if (construction != "nr5g" && construction != "bhattacharyya")
        throw std::invalid_argument("config: unknown construction: " + construction);
    if (decoder.kind != "llr-sc" && decoder.kind != "llr-scl" && !is_fa(decoder.kind))
        throw std::invalid_argument("config: unknown decoder kind: " + decoder.kind);
    if (decoder.conversion != "accurate" && decoder.conversion != "simplified")
        throw std::invalid_argument("config: unknown conversion: " + decoder.conversion);
    if (is_list(decoder.kind) && N_L < 1) throw std::invalid_argument("config: N_L < 1");
    if (is_fa(decoder.kind) && decoder.spec_path.empty())
        throw std::invalid_argument("config: finite-alphabet decoder needs spec_path");
}

ExperimentConfig parse_experiment_config(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentConfig cfg;
    const auto& code = j.at("code");
    cfg.N = code.at("N").get<int>();
    cfg.K = code.at("K").get<int>();
    cfg.construction = code.value("construction", std::string("nr5g"));
    if (code.contains("info_set"))
        cfg.info_set = code.at("info_set").get<std::vector<int>>();
    const auto& dec = j.at("decoder");
    cfg.decoder.kind = dec.at("kind").get<std::string>();
    cfg.decoder.spec_path = dec.value("spec_path", std::string());
    cfg.decoder.conversion = dec.value("conversion", std::string("accurate"));
    cfg.decoder.alt_sign_invert = dec.value("alt_sign_invert", false);
    cfg.N_L = j.value("N_L", 1);
    if (j.contains("crc")) {
        const auto& crc = j.at("crc");
        cfg.crc.enabled = crc.value("enabled", true);
        cfg.crc.length = crc.value("length", 16);
        if (crc.contains("polynomial")) {
            const auto& poly = crc.at("polynomial");
            cfg.crc.polynomial = poly.is_string()
                                     ? static_cast<std::uint32_t>(
                                           std::stoul(poly.get<std::string>(), nullptr, 16))
                                     : poly.get<std::uint32_t>();
        }
    }
    cfg.ebn0_sweep_db = j.at("ebn0_sweep_db").get<std::vector<double>>();
    if (j.contains("stopping")) {
        cfg.stopping.min_block_errors = j.at("stopping").value("min_block_errors", 100);
        cfg.stopping.max_frames = j.at("stopping").value("max_frames", 200000);
    }
    cfg.seed = j.value("seed", 1ull);
    cfg.workers = j.value("workers", 1);
    cfg.all_zero_payload = j.value("all_zero_payload", false);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

std::string decoder_id(const ExperimentConfig& cfg, const DecoderSpec* spec) {
    std::string id;
    if (is_fa(cfg.decoder.kind)) {
        id = "fa-" + spec->variant + "-w" + std::to_string(spec->w);
        id += (cfg.decoder.kind == "fa-sc") ? "-sc" : "-scl" + std::to_string(cfg.N_L);
        if (cfg.decoder.conversion == "simplified") id += "-simplified";
    } else {
        id = cfg.decoder.kind;
        if (is_list(cfg.decoder.kind)) id += std::to_string(cfg.N_L);
    }
    if (cfg.crc.enabled && is_list(cfg.decoder.kind)) id += "-crc" + std::to_string(cfg.crc.length);
    return id;
}

bool simulate_frame(std::uint64_t frame_index, std::uint64_t point_index,
                    const ExperimentConfig& cfg, const DecoderSpec* spec) {
    FrameContext ctx(cfg, spec, point_index);
    return ctx.run(frame_index);
}

int effective_workers(int configured) {
    if (const char* env = std::getenv("POLARQUANT_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    if (configured > 0) return configured;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<BlerRecord> run_bler(const ExperimentConfig& cfg,
                                 const std::optional<std::string>& out_csv, bool verbose) {
    cfg.validate();
    std::unique_ptr<DecoderSpec> spec;
    if (is_fa(cfg.decoder.kind)) {
        spec = std::make_unique<DecoderSpec>(load_spec_file(cfg.decoder.spec_path));
        if (spec->N != cfg.N)
            throw std::invalid_argument("run_bler: spec block length != config N");
    }
    const std::string id = decoder_id(cfg, spec.get());
    const int workers = effective_workers(cfg.workers);

    // resumable: reuse completed points from an existing output file
    std::map<std::string, BlerRecord> done;
    if (out_csv) {
        std::ifstream in(*out_csv);
        if (in) {
            std::ostringstream ss;
            ss << in.rdbuf();
            for (const BlerRecord& r : parse_csv(ss.str()))
                if (r.decoder == id && r.seed == cfg.seed) done[fmt_double(r.ebn0_db)] = r;
        }
    }

    std::vector<BlerRecord> records;
    for (std::size_t p = 0; p < cfg.ebn0_sweep_db.size(); ++p) {
        BlerRecord rec;
        auto hit = done.find(fmt_double(cfg.ebn0_sweep_db[p]));
        if (hit != done.end()) {
            rec = hit->second;
        } else {
            PointOutcome out = run_point(cfg, spec.get(), p, workers);
            rec.ebn0_db = cfg.ebn0_sweep_db[p];
            rec.frames = out.frames;
            rec.block_errors = out.errors;
            rec.bler = out.frames ? static_cast<double>(out.errors) / out.frames : 0.0;
            rec.wallclock_s = out.wallclock_s;
            rec.decoder = id;
            rec.seed = cfg.seed;
        }
        records.push_back(rec);
        if (out_csv) emit_results(records, ResultFormat::csv, *out_csv);
        if (verbose)
            std::fprintf(stderr, "%s  Eb/N0=%g dB  frames=%llu  errors=%llu  bler=%.3e  (%.1fs)\n",
                         id.c_str(), rec.ebn0_db, static_cast<unsigned long long>(rec.frames),
                         static_cast<unsigned long long>(rec.block_errors), rec.bler,
                         rec.wallclock_s);
    }
    return records;
}

std::string format_csv(const std::vector<BlerRecord>& records) {
    std::ostringstream os;
    os << "ebn0_db,frames,block_errors,bler,decoder,seed\n";
    for (const auto& r : records)
        os << fmt_double(r.ebn0_db) << ',' << r.frames << ',' << r.block_errors << ','
           << fmt_double(r.bler) << ',' << r.decoder << ',' << r.seed << '\n';
    return os.str();
}

std::vector<BlerRecord> parse_csv(const std::string& text) {
    std::vector<BlerRecord> records;
    std::istringstream is(text);
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        BlerRecord r;
        std::getline(ls, field, ',');
        r.ebn0_db = std::strtod(field.c_str(), nullptr);
        std::getline(ls, field, ',');
        r.frames = std::strtoull(field.c_str(), nullptr, 10);
        std::getline(ls, field, ',');
        r.block_errors = std::strtoull(field.c_str(), nullptr, 10);
        std::getline(ls, field, ',');
        r.bler = std::strtod(field.c_str(), nullptr);
        std::getline(ls, r.decoder, ',');
        std::getline(ls, field, ',');
        r.seed = std::strtoull(field.c_str(), nullptr, 10);
        records.push_back(std::move(r));
    }
    return records;
}

std::string format_plotdata(const std::vector<BlerRecord>& records) {
    std::vector<std::string> order;
    for (const auto& r : records)
        if (std::find(order.begin(), order.end(), r.decoder) == order.end())
            order.push_back(r.decoder);
    std::ostringstream os;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i) os << '\n';
        os << "# " << order[i] << '\n';
        for (const auto& r : records)
            if (r.decoder == order[i])
                os << fmt_double(r.ebn0_db) << ' ' << fmt_double(r.bler) << '\n';
    }
    return os.str();
}

void emit_results(const std::vector<BlerRecord>& records, ResultFormat format,
                  const std::string& path) {
    if (records.empty()) throw std::invalid_argument("emit_results: no records");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_results: cannot write " + path);
    out << (format == ResultFormat::csv ? format_csv(records) : format_plotdata(records));
    if (!out) throw std::runtime_error("emit_results: write failed: " + path);
}

std::vector<ComplexityRow> report_complexity(const DecoderSpec& spec) {
    const long nodes = spec.N - 1;
    std::vector<ComplexityRow> rows(3);
    rows[0] = {"ib-lut", 0, memory_footprint(NodeLower::Kind::lut, spec.w, spec.w_internal), 0};
    rows[1] = {"cd-nonuniform", spec.w,
               memory_footprint(NodeLower::Kind::cd_nonuniform, spec.w, spec.w_internal), 0};
    rows[2] = {"cd-uniform", 1,
               memory_footprint(NodeLower::Kind::cd_uniform, spec.w, spec.w_internal), 0};
    for (auto& r : rows) r.total_bits = static_cast<long>(r.bits_per_node) * nodes;
    return rows;
}

std::string format_complexity(const DecoderSpec& spec) {
    std::ostringstream os;
    os << "lower-branch update complexity, w=" << spec.w << ", w'=" << spec.w_internal
       << ", N=" << spec.N << " (" << spec.N - 1 << " nodes)\n";
    os << "variant          adds/cmps   bits/node   total bits\n";
    for (const auto& r : report_complexity(spec)) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%-16s %9d %11d %12ld\n", r.variant.c_str(), r.operations,
                      r.bits_per_node, r.total_bits);
        os << buf;
    }
    return os.str();
}

} // namespace polarquant
