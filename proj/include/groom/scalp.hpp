#pragma once

#include "groom/freq_codec.hpp"
#include "groom/strand.hpp"

#include <Eigen/Core>

#include <numbers>
#include <stdexcept>
#include <vector>

namespace groom {

struct ChartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Analytic stand-in head: an axis-aligned ellipsoid centered at the origin.
// The scalp chart is the polar cap around +y, with u = azimuth / 2pi
// (u = 0 facing +z) and v = polar angle / phi_max.
struct ScalpSurface {
    Vec3 semi_axes{75.0, 95.0, 85.0};
    double phi_max = 100.0 * std::numbers::pi / 180.0;

    Vec3 uv_to_point(double u, double v) const;

    // Inverse chart lookup. Throws ChartError when p lies farther than
    // max_dist from the chart (off the cap or off the surface).
    Eigen::Vector2d point_to_uv(const Vec3& p, double max_dist = 1e-3) const;

    // Radial projection onto the ellipsoid surface.
    Vec3 project_to_surface(const Vec3& p) const;

    // Outward surface normal (implicit gradient direction).
    Vec3 normal_at(const Vec3& p) const;
};

// Approximate signed distance to the ellipsoid: implicit value divided by
// gradient norm. Negative inside, zero on the surface, positive outside.
struct HeadSdf {
    Vec3 semi_axes{75.0, 95.0, 85.0};

    double value(const Vec3& p) const;
    Vec3 normal(const Vec3& p) const;
};

// Scalp-map texel convention shared by every grid in the pipeline: row 0 sits
// by the hairline (v near 1), row height-1 by the crown; columns sweep the
// azimuth with column 0 facing +z.
inline double texel_u(int col, int width) { return (col + 0.5) / double(width); }
inline double texel_v(int row, int height) { return 1.0 - (row + 0.5) / double(height); }
inline int texel_col(double u, int width) {
    return std::clamp(int(std::floor(u * width)), 0, width - 1);
}
inline int texel_row(double v, int height) {
    return std::clamp(int(std::floor((1.0 - v) * height)), 0, height - 1);
}

struct MapResolution {
    int height = 0;
    int width = 0;
    static MapResolution low() { return {24, 32}; }
    static MapResolution high() { return {216, 288}; }
    int texels() const { return height * width; }
    bool operator==(const MapResolution&) const = default;
};

// Per-texel geodesic extents of the chart grid (azimuthal and meridional arc
// lengths, mm), used to sanity-check texel sizes against head scale.
struct TexelExtent {
    double along_u = 0.0;
    double along_v = 0.0;
};
std::vector<TexelExtent> texel_extents(const ScalpSurface& scalp, MapResolution res);

// Scalar scalp coverage mask; 1 = hair present.
struct BaldnessMap {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    BaldnessMap() = default;
    BaldnessMap(int h, int w, double fill = 0.0)
        : height(h), width(w), values(std::size_t(h) * w, fill) {}

    double at(int r, int c) const { return values[std::size_t(r) * width + c]; }
    void set(int r, int c, double v) {
        values[std::size_t(r) * width + c] = std::clamp(v, 0.0, 1.0);
    }
};

double baldness_iou(const BaldnessMap& a, const BaldnessMap& b, double threshold);

// Scalp-UV grid of frequency codes. Occupied texels store a code; the root of
// every entry is the scalp point at the texel center.
struct StrandMap {
    int height = 0;
    int width = 0;
    CodecConfig cfg;
    ScalpSurface scalp;
    std::vector<std::int32_t> slot;   // -1 = empty, else index into codes
    std::vector<FrequencyCode> codes;

    StrandMap() = default;
    StrandMap(MapResolution res, const CodecConfig& c, const ScalpSurface& s)
        : height(res.height), width(res.width), cfg(c), scalp(s),
          slot(std::size_t(res.height) * res.width, -1) {}

    int texels() const { return height * width; }
    bool occupied(int r, int c) const { return slot[std::size_t(r) * width + c] >= 0; }
    int occupied_count() const { return int(codes.size()); }
    const FrequencyCode& code_at(int r, int c) const {
        return codes[std::size_t(slot[std::size_t(r) * width + c])];
    }
    Vec3 root_at(int r, int c) const {
        return scalp.uv_to_point(texel_u(c, width), texel_v(r, height));
    }
    void set(int r, int c, FrequencyCode code);
    BaldnessMap occupancy_mask() const;
};

struct MapBuildResult {
    StrandMap map;
    int skipped = 0;  // strands whose roots fell off the chart
};

// Embed a groom into a strand map. Strand roots may sit up to 2 mm off the
// chart; texel collisions keep the strand whose root is nearest the texel
// center.
MapBuildResult groom_to_map(const Groom& g, MapResolution res, const ScalpSurface& scalp,
                            const CodecConfig& cfg);

// Decode every occupied texel back to a strand rooted at the texel center.
Groom map_to_groom(const StrandMap& m);

// Scalp-UV grid of strand latents plus a baldness channel. A texel counts as
// occupied when its baldness value reaches 0.5.
struct LatentMap {
    int height = 0;
    int width = 0;
    int latent_dim = 64;
    std::vector<double> latent;    // height * width * latent_dim
    std::vector<double> baldness;  // height * width

    LatentMap() = default;
    LatentMap(int h, int w, int dim)
        : height(h), width(w), latent_dim(dim),
          latent(std::size_t(h) * w * dim, 0.0),
          baldness(std::size_t(h) * w, 0.0) {}

    int channels() const { return latent_dim + 1; }
    int texels() const { return height * width; }
    bool occupied(int r, int c) const { return baldness[std::size_t(r) * width + c] >= 0.5; }
    double* latent_at(int r, int c) {
        return latent.data() + (std::size_t(r) * width + c) * latent_dim;
    }
    const double* latent_at(int r, int c) const {
        return latent.data() + (std::size_t(r) * width + c) * latent_dim;
    }

    // Channel-last flattening (latent channels then baldness), row-major.
    Eigen::VectorXd flatten() const;
    static LatentMap from_flat(const Eigen::VectorXd& v, int h, int w, int dim);

    BaldnessMap baldness_mask() const;
};

}  // namespace groom
