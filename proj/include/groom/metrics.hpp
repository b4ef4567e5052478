#pragma once

#include "groom/scalp.hpp"
#include "groom/strand.hpp"

#include <optional>
#include <string>
#include <vector>

namespace groom {

// Mean vertex distance between corresponding strands, mm. Correspondence is
// texel identity when both grooms carry map context, strand index otherwise.
double positional_error(const Groom& a, const Groom& b);
double positional_error(const std::vector<Groom>& a, const std::vector<Groom>& b);

// Mean gradient distance between corresponding strands, mm; does not
// accumulate error along the hair.
double local_error(const Groom& a, const Groom& b);
double local_error(const std::vector<Groom>& a, const std::vector<Groom>& b);

// Mean gradient deviation of each strand from its neighbors (8-connected
// texel ring when the groom has a map, 4 nearest roots otherwise). Strands
// without neighbors are excluded.
double messiness(const Groom& g);

// Mean third finite difference of vertex paths along a strand trajectory,
// mm/s^3 with dt seconds between samples. Needs at least 4 samples.
double jitter(const std::vector<Strand>& trajectory, double dt = 1.0);

// Fraction of strands with any non-root vertex deeper than `tolerance`
// inside the head, in permille.
double penetration_rate(const Groom& g, const HeadSdf& sdf, double tolerance_mm);

struct VoxelGridParams {
    int resolution = 96;       // voxels per axis
    Vec3 center = Vec3::Zero();
    double extent_mm = 400.0;  // cube edge length
};

struct VoxelGrid {
    VoxelGridParams params;
    std::vector<std::uint8_t> occupied;
    std::vector<Vec3> flow;  // unit mean growth direction where occupied

    std::size_t cell_count() const {
        std::size_t r = std::size_t(params.resolution);
        return r * r * r;
    }
    std::size_t index(int x, int y, int z) const {
        std::size_t r = std::size_t(params.resolution);
        return (std::size_t(z) * r + std::size_t(y)) * r + std::size_t(x);
    }
};

// Rasterize every gradient segment with a 3D DDA; flow is the renormalized
// mean of unit segment directions per voxel.
VoxelGrid voxelize(const Groom& g, const VoxelGridParams& params = {});

struct VolumetricComparison {
    double iou = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double l2_flow = 0.0;  // mm, over voxels occupied in both grids
};

// Occupancy comparison treating b as ground truth.
VolumetricComparison volumetric_compare(const VoxelGrid& a, const VoxelGrid& b);

struct MetricsReport {
    std::optional<double> pos_err_mm;
    std::optional<double> loc_err_mm;
    std::optional<double> messiness_mm;
    std::optional<double> jitter_mm_s3;
    std::optional<double> penetration_permille;
    std::optional<double> iou;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> l2_flow_mm;

    std::string to_json() const;
    std::string to_text() const;
};

}  // namespace groom
