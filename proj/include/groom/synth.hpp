#pragma once

#include "groom/scalp.hpp"
#include "groom/strand.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace groom {

enum class StyleKind { Straight, Wavy, Curly, Bob, Parted };

StyleKind style_kind_from_string(const std::string& name);
std::string to_string(StyleKind kind);

// Procedural hairstyle recipe. Strands grow outward from the scalp, blend
// toward gravity with `droop`, and superpose wave or helix texture. Parted
// recipes comb the two sides of the parting plane apart, with a soft
// transition sector at the front end of the parting where the sweep only
// builds up along the strand.
struct StyleRecipe {
    StyleKind kind = StyleKind::Straight;
    double length_min = 120.0;  // mm
    double length_max = 180.0;
    double wave_amplitude = 0.0;  // mm
    double wave_frequency = 0.0;  // cycles per strand
    double curl_radius = 0.0;     // mm
    double curl_pitch = 0.0;      // mm of arc per turn
    std::optional<double> parting_azimuth;  // radians
    double baldness_cap = 1.0;  // haired fraction of the cap, from the crown
    double droop = 0.6;
    std::uint64_t seed = 0;

    bool valid() const;
};

// Canonical recipe per style; Parted is the default parted groom used by the
// densification tests.
StyleRecipe style_preset(StyleKind kind);

Groom generate_groom(const StyleRecipe& recipe, const ScalpSurface& scalp, MapResolution res);

// Reflect a groom across the x = 0 plane, remapping texel ids to the
// mirrored columns.
Groom mirror_groom(const Groom& g, const ScalpSurface& scalp);

// Jittered variations of the given recipes; each sample perturbs the numeric
// recipe parameters by up to 10%. Mirroring doubles the set.
std::vector<Groom> generate_dataset(const std::vector<StyleRecipe>& recipes, int per_recipe,
                                    std::uint64_t seed, bool mirror, const ScalpSurface& scalp,
                                    MapResolution res);

}  // namespace groom
