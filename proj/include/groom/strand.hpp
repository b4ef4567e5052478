#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace groom {

using Vec3 = Eigen::Vector3d;

// One hair as a fixed-length polyline in the head coordinate frame
// (+y up, +z facing forward), millimeters.
struct Strand {
    std::vector<Vec3> points;

    Strand() = default;
    explicit Strand(std::vector<Vec3> pts) : points(std::move(pts)) {}

    int size() const { return int(points.size()); }
    bool valid() const;
    double arc_length() const;
};

// Root position plus the per-edge displacement sequence d_i = p_{i+1} - p_i.
struct GradientStrand {
    Vec3 root = Vec3::Zero();
    std::vector<Vec3> gradients;

    int point_count() const { return int(gradients.size()) + 1; }
};

GradientStrand to_gradients(const Strand& s);
Strand from_gradients(const GradientStrand& g);

// Vertex-wise linear blend, t in [0, 1]. Throws on point-count mismatch.
Strand interp_euclidean(const Strand& a, const Strand& b, double t);

// Uniform arc-length resampling to n points. Degenerate (zero-length) strands
// collapse to n copies of the first point.
Strand resample_uniform(const Strand& s, int n);

// A hair model. texel_ids[i] is the row-major scalp-map texel of strand i's
// root, or empty when the groom carries no map context.
struct Groom {
    int n_s = 100;
    std::vector<Strand> strands;
    std::vector<std::int32_t> texel_ids;  // empty, or same length as strands
    int map_height = 0;
    int map_width = 0;

    std::size_t size() const { return strands.size(); }
    bool has_texel_ids() const { return !texel_ids.empty(); }
    bool valid() const;
};

}  // namespace groom
