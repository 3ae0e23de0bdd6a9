#pragma once

#include <array>
#include <functional>
#include <vector>

#include "polarquant/types.hpp"

namespace polarquant {

/// LLR magnitude assigned to labels whose probability underflows to zero.
inline constexpr double kZeroProbLlrClip = 800.0;

/// Joint distribution p(x, y) of a binary relevant variable and a finite
/// observation alphabet. Labels are sort keys (LLRs or integer values),
/// ascending. With odd_symmetric set, label i mirrors label size()-1-i:
/// |label[i]| == |label[mirror]| and mass[i][0] == mass[mirror][1].
struct BinaryJoint {
    std::vector<double> label;
    std::vector<std::array<double, 2>> mass;
    bool odd_symmetric = false;

    std::size_t size() const { return label.size(); }
};

/// I(X;Y) in bits. Throws if the joint is off normalization by more than 1e-9.
double mutual_information(const BinaryJoint& j);

/// L(y) = log p(y|0)/p(y|1) per label; zero-probability labels get a signed
/// clip value (sign from the non-zero row, or from the label's side).
std::vector<double> llr_levels(const BinaryJoint& j, double zero_prob_clip = kZeroProbLlrClip);

/// Sign-preserving magnitude quantizer: 2^(w-1)-1 increasing positive
/// thresholds in the input domain.
struct SymmetricQuantizer {
    int w = 0;
    std::vector<double> thresholds;

    /// Message value in {-2^(w-1),..,-1,+1,..,+2^(w-1)}; y = 0 maps positive.
    int classify(double y) const;
};

struct QuantizerResult {
    int w = 0;
    SymmetricQuantizer quantizer;
    BinaryJoint output;               // 2^w labels, ordered by message value
    double preserved_mi = 0.0;
    std::vector<int> assignment;      // input label index -> message value
    std::vector<double> class_magnitude; // magnitude classes, ascending
    std::vector<int> boundaries;      // last class index of each cluster but the top
    bool degenerate_identity = false; // fewer classes than clusters
};

/// MI-maximizing contiguous clustering of magnitude classes (dynamic program
/// over boundary placements). Input must be sorted by label with odd symmetry.
QuantizerResult optimal_symmetric_quantizer(const BinaryJoint& input, int w);

struct UniformQuantizerParams {
    double s = 1.0;     // LLR scaling, grid spacing 1/s
    int r = 0;          // right-shift count
    int w = 0;
    int w_internal = 0;
};

/// Grid search max_{s,r} I(X;T) over a callable producing the quantized
/// output joint; ties broken toward smaller r, then smaller s.
UniformQuantizerParams uniform_grid_search(
    const std::function<BinaryJoint(double, int)>& quantized_sum,
    const std::vector<double>& s_grid, int r_min, int r_max, int w, int w_internal);

/// 64 log-spaced scale factors covering grid spacings 1/s in [2^-6, 2].
std::vector<double> default_scale_grid();

} // namespace polarquant
