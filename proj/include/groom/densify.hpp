#pragma once

#include "groom/scalp.hpp"

#include <array>
#include <utility>
#include <vector>

namespace groom {

// Five interpolation weights per high-res texel: four guide weights plus the
// weight of the bilinear blend of the same four guides.
struct WeightMap {
    int height = 0;
    int width = 0;
    std::vector<double> w;  // height * width * 5

    WeightMap() = default;
    WeightMap(int h, int w_, double a5 = 1.0)
        : height(h), width(w_), w(std::size_t(h) * w_ * 5, 0.0) {
        for (int t = 0; t < h * w_; ++t) w[std::size_t(t) * 5 + 4] = a5;
    }

    double* at(int r, int c) { return w.data() + (std::size_t(r) * width + c) * 5; }
    const double* at(int r, int c) const { return w.data() + (std::size_t(r) * width + c) * 5; }
    bool valid(double eps = 0.05) const;
};

// Input feature grid for weight prediction: per texel the low-frequency
// descriptors of the four neighboring guides (72 each), their bilinear blend
// (72), and the four normalized distances to the guides; 364 channels.
struct GuideFeatureMap {
    int height = 0;
    int width = 0;
    int channels = 364;
    std::vector<double> values;  // height * width * channels

    const double* at(int r, int c) const {
        return values.data() + (std::size_t(r) * width + c) * channels;
    }
};

// Bilinear footprint of a high-res texel in the low-res guide grid. Guides
// are ordered (r0,c0), (r0,c1), (r1,c0), (r1,c1); u clamps at the chart edges
// (single-cap chart, no seam wrapping).
struct Footprint {
    int rows[2];
    int cols[2];
    double fx = 0.0;  // fraction toward cols[1]
    double fy = 0.0;  // fraction toward rows[1]
    std::array<double, 4> bilinear{};
    std::array<double, 4> dist{};  // grid-space distances to guide centers

    int guide_row(int i) const { return rows[i / 2]; }
    int guide_col(int i) const { return cols[i % 2]; }
};

Footprint footprint_of(int high_r, int high_c, int high_h, int high_w, int low_h, int low_w);

constexpr int kGuideDescriptorDim = 72;  // f_l bands x 3 axes x (A, cos, sin)

// Segment-averaged low-frequency descriptor of one guide code.
std::array<double, kGuideDescriptorDim> guide_descriptor(const FrequencyCode& code, int f_l);

GuideFeatureMap build_features(const StrandMap& low, MapResolution high_res, int f_l = 8);

// The interpolation equation: Y = a1 X1 + a2 X2 + a3 X3 + a4 X4 + a5 B(X1..X4),
// evaluated component-wise on (amplitude, cos, sin) with phase renormalization.
// Texels with baldness < 0.5 or an all-empty footprint stay empty; weights of
// missing guides are renormalized over the occupied ones.
StrandMap apply_weights(const StrandMap& low, const WeightMap& weights,
                        const BaldnessMap& baldness);

struct UpsampleResult {
    StrandMap map;
    WeightMap weights;
};

UpsampleResult upsample_nearest(const StrandMap& low, MapResolution high_res);
UpsampleResult upsample_bilinear(const StrandMap& low, MapResolution high_res);

// Deterministic parting-aware upsampler: texels whose footprint guides agree
// in initial growth direction (min pairwise cosine >= threshold) interpolate
// bilinearly; incoherent texels copy their nearest same-cluster guide so the
// transition stays sharp across partings.
UpsampleResult upsample_parting_aware(const StrandMap& low, MapResolution high_res,
                                      double coherence_threshold = 0.7);

struct WeightRegularizers {
    double bl = 0.0;       // mean |a5 - 1|
    double g = 0.0;        // mean sum |a1..a4|
    double sum_dev = 0.0;  // mean |sum(a) - 1|
};
WeightRegularizers weight_regularizers(const WeightMap& w);

// Fold the bilinear weight into the four guide weights using the texel's
// fractional footprint weights.
std::array<double, 4> fold_bilinear_weight(const double* w5, const std::array<double, 4>& bilinear);

// Per-texel standard deviation of the folded guide weights.
std::vector<double> weight_std_map(const WeightMap& w, int low_h, int low_w);

}  // namespace groom
