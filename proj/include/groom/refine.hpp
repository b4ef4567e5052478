#pragma once

#include "groom/scalp.hpp"
#include "groom/strand.hpp"

#include <cstdint>

namespace groom {

struct RefineParams {
    double noise_amp = 0.05;    // log-scale sigma on band amplitudes
    double noise_phase = 0.15;  // radians
    int wisp_count = 32;
    double stickiness = 2.0;    // mm
    int duplication_factor = 6;
    double l_bar = 50.0;            // mm, root-distance threshold
    double texel_pitch_mm = 2.0;    // root jitter extent for duplicates
    std::uint64_t seed = 0;
    bool final_penetration_pass = true;

    bool valid() const {
        return noise_amp >= 0.0 && noise_phase >= 0.0 && wisp_count >= 0 &&
               stickiness >= 0.0 && duplication_factor >= 1 && l_bar > 0.0 &&
               texel_pitch_mm >= 0.0;
    }
};

struct PenetrationParams {
    int lookahead = 20;              // vertices checked ahead of the pivot
    double decay = 0.9;              // per-vertex rotation falloff
    double surface_margin = 0.5;     // mm, clearance target for pushed vertices
    double removal_tolerance = 0.1;  // mm, strands deeper than this are dropped
    bool clamp_exponent = false;     // clamp the falloff exponent at zero

    bool valid() const {
        return lookahead >= 1 && decay > 0.0 && decay <= 1.0 && surface_margin >= 0.0 &&
               removal_tolerance >= 0.0;
    }
};

// Rotation falloff delta^(j - i - k/2) applied to vertex j when the pivot is
// at i. Without clamping the exponent goes negative for j < i + k/2, which
// amplifies the rotation near the pivot.
double rotation_falloff(int j, int i, const PenetrationParams& p);

// Pull strands toward the medoid strand of their k-means cluster with the
// stickiness-controlled cumulative displacement. Skipped entirely when
// w == 0 or s == 0; roots never move.
Groom wisp_formation(const Groom& g, int w, double s, double l_bar, std::uint64_t seed);

// Emit `factor` copies per strand: copy 0 is the source unchanged, the rest
// get scalp-tangential root jitter within +/- pitch/2 plus frequency-domain
// noise.
Groom duplicate(const Groom& g, int factor, double noise_amp, double noise_phase,
                double texel_pitch_mm, const ScalpSurface& scalp, std::uint64_t seed);

struct PenetrationResult {
    Groom groom;
    int removed = 0;
};

// Rotate strand tails out of the head and drop strands that stay inside
// beyond the removal tolerance.
PenetrationResult resolve_penetration(const Groom& g, const HeadSdf& sdf,
                                      const PenetrationParams& p);

// Full chain: penetration resolution, frequency perturbation, wisp formation,
// duplication, and (by default) a final penetration pass when any of the
// later stages ran.
Groom refine(const Groom& g, const RefineParams& rp, const PenetrationParams& pp,
             const HeadSdf& sdf, const ScalpSurface& scalp);

}  // namespace groom
