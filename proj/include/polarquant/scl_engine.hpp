#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "polarquant/codec.hpp"
#include "polarquant/types.hpp"

namespace polarquant {

/// LLR-based path metric step M + log(1 + e^(-(1-2u)L)), evaluated in
/// numerically stable form. Increment is always >= 0.
inline double path_metric_update(double metric, double llr, std::uint8_t bit) {
    double t = bit ? llr : -llr;
    double inc = (t > 0.0) ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    return metric + inc;
}

/// Successive cancellation over a single workspace, generic in the datapath.
/// A datapath provides:
///   Msg upper(a, b, level, node)        - check-side combine
///   Msg lower(a, b, u0, level, node)    - partial-sum-conditioned combine
///   double leaf_llr(m, leaf)            - LLR meaning of a decision message
///   uint8_t decide(m)                   - hard decision
template <class DP>
class ScCore {
public:
    explicit ScCore(const CodeConfig& cfg) : n_(cfg.n), block_(cfg.block_length) {
        info_mask_ = cfg.info_mask();
        msg_.resize(n_ + 1);
        csum_.resize(n_ + 1);
        for (int lv = 0; lv <= n_; ++lv) {
            msg_[lv].resize(std::size_t(1) << (n_ - lv));
            csum_[lv].resize(std::size_t(2) << (n_ - lv));
        }
#ifndef NDEBUG
        computed_.assign(n_ + 1, -1);
#endif
    }

    BitBlock decode(const std::vector<typename DP::Msg>& channel, const DP& dp) {
        if (static_cast<int>(channel.size()) != block_)
            throw std::invalid_argument("sc_decode: LLR count != N");
        msg_[0] = channel;
#ifndef NDEBUG
        computed_.assign(n_ + 1, -1);
        computed_[0] = 0;
#endif
        BitBlock out(block_, 0);
        for (int phase = 0; phase < block_; ++phase) {
            compute(n_, phase, dp);
            std::uint8_t bit = info_mask_[phase] ? dp.decide(msg_[n_][0]) : 0;
            out[phase] = bit;
            csum_[n_][phase & 1] = bit;
            if (phase & 1) propagate(n_, phase);
        }
        return out;
    }

private:
    void compute(int lv, int phase, const DP& dp) {
        if ((phase & 1) == 0 && lv > 1) compute(lv - 1, phase >> 1, dp);
#ifndef NDEBUG
        assert(computed_[lv - 1] == (phase >> 1) && "reading messages not yet computed");
        computed_[lv] = phase;
#endif
        const auto& parent = msg_[lv - 1];
        auto& cur = msg_[lv];
        const int lanes = 1 << (n_ - lv);
        const int node = phase >> 1;
        if ((phase & 1) == 0) {
            for (int b = 0; b < lanes; ++b)
                cur[b] = dp.upper(parent[2 * b], parent[2 * b + 1], lv, node);
        } else {
            const auto& c = csum_[lv];
            for (int b = 0; b < lanes; ++b)
                cur[b] = dp.lower(parent[2 * b], parent[2 * b + 1], c[2 * b], lv, node);
        }
    }

    void propagate(int lv, int phase) {
        if (lv == 1) return; // level-0 partial sums are never read
        const int psi = phase >> 1;
        const auto& hi = csum_[lv];
        auto& lo = csum_[lv - 1];
        const int lanes = 1 << (n_ - lv);
        for (int b = 0; b < lanes; ++b) {
            lo[4 * b + (psi & 1)] = hi[2 * b] ^ hi[2 * b + 1];
            lo[4 * b + 2 + (psi & 1)] = hi[2 * b + 1];
        }
        if (psi & 1) propagate(lv - 1, psi);
    }

    int n_, block_;
    std::vector<std::uint8_t> info_mask_;
    std::vector<std::vector<typename DP::Msg>> msg_;
    std::vector<std::vector<std::uint8_t>> csum_;
#ifndef NDEBUG
    std::vector<int> computed_;
#endif
};

/// Successive cancellation list decoding with lazy (copy-on-write) path
/// state. Returns the decoded values of all information positions; with a
/// CRC, the best checksum-passing path is selected, otherwise the most
/// likely one.
template <class DP>
class ListDecoder {
public:
    using Msg = typename DP::Msg;

    ListDecoder(const CodeConfig& cfg, int list_size)
        : n_(cfg.n), block_(cfg.block_length), list_(list_size) {
        if (list_ < 1) throw std::invalid_argument("ListDecoder: list size < 1");
        info_mask_ = cfg.info_mask();
        info_count_ = cfg.info_length;
        msg_pool_.resize(n_ + 1);
        c_pool_.resize(n_ + 1);
        slot_refs_.resize(n_ + 1);
        path_slot_.assign(n_ + 1, std::vector<int>(list_, -1));
        free_slots_.resize(n_ + 1);
        for (int lv = 0; lv <= n_; ++lv) {
            msg_pool_[lv].assign(list_, std::vector<Msg>(std::size_t(1) << (n_ - lv)));
            // level-0 partial sums are never touched
            const std::size_t csz = lv == 0 ? 0 : (std::size_t(2) << (n_ - lv));
            c_pool_[lv].assign(list_, std::vector<std::uint8_t>(csz));
            slot_refs_[lv].assign(list_, 0);
        }
        active_.assign(list_, 0);
        metric_.assign(list_, 0.0);
        head_.assign(list_, -1);
    }

    BitBlock decode(const std::vector<Msg>& channel, const DP& dp, const CrcConfig* crc) {
        if (static_cast<int>(channel.size()) != block_)
            throw std::invalid_argument("scl_decode: LLR count != N");
        reset();
        int first = alloc_path();
        msg_pool_[0][path_slot_[0][first]] = channel;

        for (int phase = 0; phase < block_; ++phase) {
            compute(n_, phase, dp);
            if (info_mask_[phase])
                extend_info(phase, dp);
            else
                extend_frozen(phase, dp);
            if (phase & 1) propagate(n_, phase);
        }
        return select_output(crc);
    }

    /// Number of live paths after each information stage of the last decode.
    const std::vector<int>& path_count_trace() const { return trace_; }

private:
    struct Decision {
        int parent;
        std::uint8_t bit;
    };

    void reset() {
        for (int lv = 0; lv <= n_; ++lv) {
            free_slots_[lv].clear();
            for (int s = list_ - 1; s >= 0; --s) free_slots_[lv].push_back(s);
            std::fill(slot_refs_[lv].begin(), slot_refs_[lv].end(), 0);
        }
        free_paths_.clear();
        for (int l = list_ - 1; l >= 0; --l) free_paths_.push_back(l);
        std::fill(active_.begin(), active_.end(), 0);
        std::fill(metric_.begin(), metric_.end(), 0.0);
        std::fill(head_.begin(), head_.end(), -1);
        arena_.clear();
        trace_.clear();
#ifndef NDEBUG
        computed_.assign(n_ + 1, -1);
        computed_[0] = 0;
#endif
    }

    int alloc_path() {
        int l = free_paths_.back();
        free_paths_.pop_back();
        active_[l] = 1;
        metric_[l] = 0.0;
        head_[l] = -1;
        for (int lv = 0; lv <= n_; ++lv) {
            int s = free_slots_[lv].back();
            free_slots_[lv].pop_back();
            path_slot_[lv][l] = s;
            slot_refs_[lv][s] = 1;
        }
        return l;
    }

    int clone_path(int src) {
        int l = free_paths_.back();
        free_paths_.pop_back();
        active_[l] = 1;
        metric_[l] = metric_[src];
        head_[l] = head_[src];
        for (int lv = 0; lv <= n_; ++lv) {
            int s = path_slot_[lv][src];
            path_slot_[lv][l] = s;
            ++slot_refs_[lv][s];
        }
        return l;
    }

    void kill_path(int l) {
        active_[l] = 0;
        free_paths_.push_back(l);
        for (int lv = 0; lv <= n_; ++lv) {
            int s = path_slot_[lv][l];
            if (--slot_refs_[lv][s] == 0) free_slots_[lv].push_back(s);
        }
    }

    // Copy-on-write slot access; message and partial-sum arrays share a slot.
    int writable_slot(int lv, int l) {
        int s = path_slot_[lv][l];
        if (slot_refs_[lv][s] == 1) return s;
        int fresh = free_slots_[lv].back();
        free_slots_[lv].pop_back();
        msg_pool_[lv][fresh] = msg_pool_[lv][s];
        c_pool_[lv][fresh] = c_pool_[lv][s];
        --slot_refs_[lv][s];
        slot_refs_[lv][fresh] = 1;
        path_slot_[lv][l] = fresh;
        return fresh;
    }

    void compute(int lv, int phase, const DP& dp) {
        if ((phase & 1) == 0 && lv > 1) compute(lv - 1, phase >> 1, dp);
#ifndef NDEBUG
        assert(computed_[lv - 1] == (phase >> 1) && "reading messages not yet computed");
        computed_[lv] = phase;
#endif
        const int lanes = 1 << (n_ - lv);
        const int node = phase >> 1;
        for (int l = 0; l < list_; ++l) {
            if (!active_[l]) continue;
            const auto& parent = msg_pool_[lv - 1][path_slot_[lv - 1][l]];
            auto& cur = msg_pool_[lv][writable_slot(lv, l)];
            if ((phase & 1) == 0) {
                for (int b = 0; b < lanes; ++b)
                    cur[b] = dp.upper(parent[2 * b], parent[2 * b + 1], lv, node);
            } else {
                const auto& c = c_pool_[lv][path_slot_[lv][l]];
                for (int b = 0; b < lanes; ++b)
                    cur[b] = dp.lower(parent[2 * b], parent[2 * b + 1], c[2 * b], lv, node);
            }
        }
    }

    void propagate(int lv, int phase) {
        if (lv == 1) return;
        const int psi = phase >> 1;
        const int lanes = 1 << (n_ - lv);
        for (int l = 0; l < list_; ++l) {
            if (!active_[l]) continue;
            const auto& hi = c_pool_[lv][path_slot_[lv][l]];
            auto& lo = c_pool_[lv - 1][writable_slot(lv - 1, l)];
            for (int b = 0; b < lanes; ++b) {
                lo[4 * b + (psi & 1)] = hi[2 * b] ^ hi[2 * b + 1];
                lo[4 * b + 2 + (psi & 1)] = hi[2 * b + 1];
            }
        }
        if (psi & 1) propagate(lv - 1, psi);
    }

    void extend_frozen(int phase, const DP& dp) {
        for (int l = 0; l < list_; ++l) {
            if (!active_[l]) continue;
            double llr = dp.leaf_llr(msg_pool_[n_][path_slot_[n_][l]][0], phase);
            metric_[l] = path_metric_update(metric_[l], llr, 0);
            c_pool_[n_][writable_slot(n_, l)][phase & 1] = 0;
        }
    }

    void extend_info(int phase, const DP& dp) {
        struct Cand {
            double pm;
            int path;
            std::uint8_t bit;
        };
        std::vector<Cand> cands;
        cands.reserve(2 * list_);
        int live = 0;
        for (int l = 0; l < list_; ++l) {
            if (!active_[l]) continue;
            ++live;
            double llr = dp.leaf_llr(msg_pool_[n_][path_slot_[n_][l]][0], phase);
            cands.push_back({path_metric_update(metric_[l], llr, 0), l, 0});
            cands.push_back({path_metric_update(metric_[l], llr, 1), l, 1});
        }
        const int keep = std::min(2 * live, list_);
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.pm != b.pm) return a.pm < b.pm;
            if (a.path != b.path) return a.path < b.path;
            return a.bit < b.bit;
        });

        std::vector<std::array<double, 2>> chosen(list_, {0.0, 0.0});
        std::vector<std::array<std::uint8_t, 2>> keep_mask(list_, {0, 0});
        for (int i = 0; i < keep; ++i) {
            chosen[cands[i].path][cands[i].bit] = cands[i].pm;
            keep_mask[cands[i].path][cands[i].bit] = 1;
        }

        std::vector<int> extend_both;
        for (int l = 0; l < list_; ++l) {
            if (!active_[l]) continue;
            bool k0 = keep_mask[l][0], k1 = keep_mask[l][1];
            if (!k0 && !k1)
                kill_path(l);
            else if (k0 && k1)
                extend_both.push_back(l);
            else
                settle(l, k0 ? 0 : 1, chosen[l][k0 ? 0 : 1], phase);
        }
        for (int l : extend_both) {
            int l2 = clone_path(l);
            settle(l, 0, chosen[l][0], phase);
            settle(l2, 1, chosen[l][1], phase);
        }
        trace_.push_back(static_cast<int>(list_ - free_paths_.size()));
    }

    void settle(int l, std::uint8_t bit, double pm, int phase) {
        metric_[l] = pm;
        arena_.push_back({head_[l], bit});
        head_[l] = static_cast<int>(arena_.size()) - 1;
        c_pool_[n_][writable_slot(n_, l)][phase & 1] = bit;
    }

    BitBlock info_bits_of(int l) const {
        BitBlock bits(info_count_, 0);
        int node = head_[l];
        for (int i = info_count_ - 1; i >= 0; --i) {
            bits[i] = arena_[node].bit;
            node = arena_[node].parent;
        }
        return bits;
    }

    BitBlock select_output(const CrcConfig* crc) {
        std::vector<int> order;
        for (int l = 0; l < list_; ++l)
            if (active_[l]) order.push_back(l);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (metric_[a] != metric_[b]) return metric_[a] < metric_[b];
            return a < b;
        });
        if (crc) {
            for (int l : order) {
                BitBlock bits = info_bits_of(l);
                if (crc_check(bits, *crc)) return bits;
            }
        }
        return info_bits_of(order.front());
    }

    int n_, block_, list_;
    std::vector<std::uint8_t> info_mask_;
    int info_count_ = 0;
    std::vector<std::vector<std::vector<Msg>>> msg_pool_;
    std::vector<std::vector<std::vector<std::uint8_t>>> c_pool_;
    std::vector<std::vector<int>> path_slot_;
    std::vector<std::vector<int>> slot_refs_;
    std::vector<std::vector<int>> free_slots_;
    std::vector<int> free_paths_;
    std::vector<std::uint8_t> active_;
    std::vector<double> metric_;
    std::vector<Decision> arena_;
    std::vector<int> head_;
    std::vector<int> trace_;
#ifndef NDEBUG
    std::vector<int> computed_;
#endif
};

} // namespace polarquant
