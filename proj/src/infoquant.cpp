#include "polarquant/infoquant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace polarquant {

namespace {

double xlog2x_ratio(double p, double q) {
    // p * log2(p/q), with 0 log 0 := 0
    if (p <= 0.0) return 0.0;
    return p * std::log2(p / q);
}

} // namespace

double mutual_information(const BinaryJoint& j) {
    double total = 0.0, p0 = 0.0;
    for (const auto& m : j.mass) {
        total += m[0] + m[1];
        p0 += m[0];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("mutual_information: joint not normalized");
    const double p1 = total - p0;
    double mi = 0.0;
    for (const auto& m : j.mass) {
        double py = m[0] + m[1];
        if (py <= 0.0) continue;
        mi += xlog2x_ratio(m[0], p0 * py);
        mi += xlog2x_ratio(m[1], p1 * py);
    }
    return mi;
}

std::vector<double> llr_levels(const BinaryJoint& j, double zero_prob_clip) {
    const std::size_t size = j.size();
    std::vector<double> levels(size);
    auto level_of = [&](std::size_t i, bool positive_side) {
        double a = j.mass[i][0], b = j.mass[i][1];
        if (a > 0.0 && b > 0.0) return std::log(a / b);
        if (a > 0.0) return zero_prob_clip;
        if (b > 0.0) return -zero_prob_clip;
        return positive_side ? zero_prob_clip : -zero_prob_clip;
    };
    if (j.odd_symmetric && size % 2 == 0) {
        // mirror-exact: level(mirror) == -level
        for (std::size_t i = size / 2; i < size; ++i) {
            levels[i] = level_of(i, true);
            levels[size - 1 - i] = -levels[i];
        }
    } else {
        for (std::size_t i = 0; i < size; ++i) levels[i] = level_of(i, i >= size / 2);
    }
    return levels;
}

int SymmetricQuantizer::classify(double y) const {
    const int half = 1 << (w - 1);
    double mag = std::abs(y);
    int c = 1;
    for (double t : thresholds) {
        if (mag > t) ++c;
        else break;
    }
    if (c > half) c = half;
    return (y < 0.0) ? -c : c;
}

namespace {

struct MagnitudeClasses {
    std::vector<double> magnitude; // ascending, one entry per class
    std::vector<double> pos0;      // p(x=0, positive-side labels) per class
    std::vector<double> neg0;      // p(x=0, negative-side labels) per class
    std::vector<int> class_of_pos; // positive-side label offset -> class
};

MagnitudeClasses build_classes(const BinaryJoint& in) {
    const std::size_t size = in.size();
    const std::size_t half = size / 2;
    MagnitudeClasses mc;
    mc.class_of_pos.resize(half);
    for (std::size_t k = 0; k < half; ++k) {
        const std::size_t pos = half + k;
        const std::size_t neg = half - 1 - k;
        double mag = std::abs(in.label[pos]);
        if (mc.magnitude.empty() || mag != mc.magnitude.back()) {
            mc.magnitude.push_back(mag);
            mc.pos0.push_back(0.0);
            mc.neg0.push_back(0.0);
        }
        mc.class_of_pos[k] = static_cast<int>(mc.magnitude.size()) - 1;
        mc.pos0.back() += in.mass[pos][0];
        mc.neg0.back() += in.mass[neg][0];
    }
    return mc;
}

// MI contribution of one output magnitude pair with class masses (a, b).
double cluster_mi(double a, double b) {
    double s = a + b;
    if (s <= 0.0) return 0.0;
    return 2.0 * (xlog2x_ratio(a, 0.5 * s) + xlog2x_ratio(b, 0.5 * s));
}

} // namespace

QuantizerResult optimal_symmetric_quantizer(const BinaryJoint& in, int w) {
    if (w < 1) throw std::invalid_argument("optimal_symmetric_quantizer: w < 1");
    const int out_size = 1 << w;
    const std::size_t size = in.size();
    if (size % 2 != 0 || static_cast<int>(size) < out_size)
        throw std::invalid_argument("optimal_symmetric_quantizer: need >= 2^w labels, even count");
    if (!in.odd_symmetric)
        throw std::invalid_argument("optimal_symmetric_quantizer: input must be odd-symmetric");
    for (std::size_t i = 0; i < size; ++i) {
        if (std::abs(in.label[i]) != std::abs(in.label[size - 1 - i]) ||
            std::abs(in.mass[i][0] - in.mass[size - 1 - i][1]) > 1e-12)
            throw std::invalid_argument("optimal_symmetric_quantizer: odd symmetry violated");
        if (i > 0 && in.label[i] < in.label[i - 1])
            throw std::invalid_argument("optimal_symmetric_quantizer: labels not sorted");
    }

    MagnitudeClasses mc = build_classes(in);
    const int n_cls = static_cast<int>(mc.magnitude.size());
    const int clusters = 1 << (w - 1);

    QuantizerResult res;
    res.w = w;
    res.quantizer.w = w;
    res.class_magnitude = mc.magnitude;

    std::vector<int> cluster_of_class(n_cls);
    if (n_cls <= clusters) {
        // identity clustering; quantizer degenerates to relabeling
        res.degenerate_identity = n_cls < clusters;
        for (int k = 0; k < n_cls; ++k) cluster_of_class[k] = k;
        for (int k = 0; k + 1 < n_cls; ++k) res.boundaries.push_back(k);
        res.preserved_mi = 0.0;
        for (int k = 0; k < n_cls; ++k) res.preserved_mi += cluster_mi(mc.pos0[k], mc.neg0[k]);
    } else {
        // dp[c][m]: best MI with first m classes split into c clusters
        const double neg_inf = -std::numeric_limits<double>::infinity();
        std::vector<double> pre_pos(n_cls + 1, 0.0), pre_neg(n_cls + 1, 0.0);
        for (int k = 0; k < n_cls; ++k) {
            pre_pos[k + 1] = pre_pos[k] + mc.pos0[k];
            pre_neg[k + 1] = pre_neg[k] + mc.neg0[k];
        }
        auto seg = [&](int a, int b) {
            return cluster_mi(pre_pos[b] - pre_pos[a], pre_neg[b] - pre_neg[a]);
        };
        std::vector<std::vector<double>> dp(clusters + 1, std::vector<double>(n_cls + 1, neg_inf));
        std::vector<std::vector<int>> parent(clusters + 1, std::vector<int>(n_cls + 1, -1));
        dp[0][0] = 0.0;
        for (int c = 1; c <= clusters; ++c) {
            const int m_lo = c, m_hi = n_cls - (clusters - c);
            for (int m = m_lo; m <= m_hi; ++m) {
                for (int j = c - 1; j < m; ++j) {
                    if (dp[c - 1][j] == neg_inf) continue;
                    double cand = dp[c - 1][j] + seg(j, m);
                    if (cand > dp[c][m]) {
                        dp[c][m] = cand;
                        parent[c][m] = j;
                    }
                }
            }
        }
        res.preserved_mi = dp[clusters][n_cls];
        std::vector<int> cut(clusters + 1);
        cut[clusters] = n_cls;
        for (int c = clusters; c >= 1; --c) cut[c - 1] = parent[c][cut[c]];
        for (int c = 0; c < clusters; ++c)
            for (int k = cut[c]; k < cut[c + 1]; ++k) cluster_of_class[k] = c;
        for (int c = 1; c < clusters; ++c) res.boundaries.push_back(cut[c] - 1);
    }

    // thresholds at midpoints between the class magnitudes flanking each cut
    for (int b : res.boundaries)
        res.quantizer.thresholds.push_back(0.5 * (mc.magnitude[b] + mc.magnitude[b + 1]));

    // output joint over message values
    res.output.label.resize(out_size);
    res.output.mass.assign(out_size, {0.0, 0.0});
    res.output.odd_symmetric = true;
    const int half_out = out_size / 2;
    for (int t = -half_out, idx = 0; t <= half_out; ++t) {
        if (t == 0) continue;
        res.output.label[idx++] = static_cast<double>(t);
    }
    const std::size_t half_in = size / 2;
    res.assignment.resize(size);
    for (std::size_t k = 0; k < half_in; ++k) {
        int mag = cluster_of_class[mc.class_of_pos[k]] + 1;
        res.assignment[half_in + k] = mag;
        res.assignment[half_in - 1 - k] = -mag;
        res.output.mass[half_out + mag - 1][0] += in.mass[half_in + k][0];
        res.output.mass[half_out - mag][0] += in.mass[half_in - 1 - k][0];
    }
    for (int i = 0; i < out_size; ++i)
        res.output.mass[i][1] = res.output.mass[out_size - 1 - i][0];
    return res;
}

UniformQuantizerParams uniform_grid_search(
    const std::function<BinaryJoint(double, int)>& quantized_sum,
    const std::vector<double>& s_grid, int r_min, int r_max, int w, int w_internal) {
    if (s_grid.empty() || r_min > r_max)
        throw std::invalid_argument("uniform_grid_search: empty grid");
    std::vector<double> scales = s_grid;
    std::sort(scales.begin(), scales.end());
    UniformQuantizerParams best{scales.front(), r_min, w, w_internal};
    double best_mi = -1.0;
    for (int r = r_min; r <= r_max; ++r) {
        for (double s : scales) {
            double mi = mutual_information(quantized_sum(s, r));
            if (mi > best_mi) {
                best_mi = mi;
                best.s = s;
                best.r = r;
            }
        }
    }
    return best;
}

std::vector<double> default_scale_grid() {
    std::vector<double> grid(64);
    for (int k = 0; k < 64; ++k)
        grid[k] = std::pow(2.0, -1.0 + 7.0 * k / 63.0);
    return grid;
}

} // namespace polarquant
