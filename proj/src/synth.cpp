#include "groom/synth.hpp"

#include "groom/parallel.hpp"
#include "groom/random.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace groom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kClearanceMm = 2.0;   // generated strands keep this much air
constexpr double kFringeHalf = 0.55;   // radians, soft sector at the parting front
constexpr double kDroopRamp = 0.35;    // fraction of the strand over which droop builds

double wrap_angle(double a) {
    while (a > std::numbers::pi) a -= kTwoPi;
    while (a < -std::numbers::pi) a += kTwoPi;
    return a;
}

struct StyleTraits {
    double comb = 0.25;  // tangential escape strength
};

StyleTraits traits_of(StyleKind kind) {
    switch (kind) {
        case StyleKind::Parted: return {0.55};
        case StyleKind::Bob: return {0.35};
        case StyleKind::Wavy: return {0.30};
        case StyleKind::Curly: return {0.25};
        case StyleKind::Straight:
        default: return {0.25};
    }
}

}  // namespace

bool StyleRecipe::valid() const {
    if (length_min <= 0.0 || length_max < length_min) return false;
    if (wave_amplitude < 0.0 || wave_frequency < 0.0) return false;
    if (curl_radius < 0.0 || curl_pitch < 0.0) return false;
    if (baldness_cap < 0.0 || baldness_cap > 1.0) return false;
    if (droop < 0.0 || droop > 1.0) return false;
    if (parting_azimuth && (*parting_azimuth < 0.0 || *parting_azimuth >= kTwoPi)) return false;
    return true;
}

StyleKind style_kind_from_string(const std::string& name) {
    if (name == "straight") return StyleKind::Straight;
    if (name == "wavy") return StyleKind::Wavy;
    if (name == "curly") return StyleKind::Curly;
    if (name == "bob") return StyleKind::Bob;
    if (name == "parted") return StyleKind::Parted;
    throw std::invalid_argument("unknown style kind: " + name);
}

std::string to_string(StyleKind kind) {
    switch (kind) {
        case StyleKind::Straight: return "straight";
        case StyleKind::Wavy: return "wavy";
        case StyleKind::Curly: return "curly";
        case StyleKind::Bob: return "bob";
        case StyleKind::Parted: return "parted";
    }
    return "straight";
}

StyleRecipe style_preset(StyleKind kind) {
    StyleRecipe r;
    r.kind = kind;
    switch (kind) {
        case StyleKind::Straight:
            r.length_min = 130.0;
            r.length_max = 170.0;
            r.droop = 0.65;
            r.baldness_cap = 0.95;
            break;
        case StyleKind::Wavy:
            r.length_min = 140.0;
            r.length_max = 190.0;
            r.wave_amplitude = 6.0;
            r.wave_frequency = 3.0;
            r.droop = 0.6;
            r.baldness_cap = 0.95;
            break;
        case StyleKind::Curly:
            r.length_min = 110.0;
            r.length_max = 160.0;
            r.curl_radius = 7.0;
            r.curl_pitch = 40.0;
            r.droop = 0.5;
            r.baldness_cap = 0.95;
            break;
        case StyleKind::Bob:
            r.length_min = 70.0;
            r.length_max = 100.0;
            r.droop = 0.55;
            r.baldness_cap = 0.9;
            break;
        case StyleKind::Parted:
            r.length_min = 150.0;
            r.length_max = 200.0;
            r.wave_amplitude = 2.0;
            r.wave_frequency = 1.5;
            r.parting_azimuth = std::numbers::pi / 2.0;
            r.droop = 0.55;
            r.baldness_cap = 0.88;
            break;
    }
    return r;
}

namespace {

Strand grow_strand(const StyleRecipe& recipe, const ScalpSurface& scalp, const HeadSdf& sdf,
                   const Vec3& root, double u_root, std::uint64_t strand_seed, int n_s) {
    RandomStream rs(strand_seed);
    const StyleTraits traits = traits_of(recipe.kind);
    const double length = rs.uniform(recipe.length_min, recipe.length_max);
    const double step = length / double(n_s - 1);
    const double wave_phase = rs.uniform(0.0, kTwoPi);
    const double curl_phase = rs.uniform(0.0, kTwoPi);
    // per-strand imperfection of the combing: a horizontal drift of the sweep
    // direction and a jittered sweep onset
    const double drift = rs.uniform(-0.26, 0.26);
    const double sweep_onset = rs.uniform(0.05, 0.35);

    const Vec3 gravity(0.0, -1.0, 0.0);
    const Vec3 normal = scalp.normal_at(root);

    auto yaw = [](const Vec3& d, double angle) {
        double c = std::cos(angle), s = std::sin(angle);
        return Vec3(c * d.x() + s * d.z(), d.y(), -s * d.x() + c * d.z());
    };

    // horizontal radial escape direction; near the pole fall back to the
    // texel azimuth so the direction stays defined
    Vec3 radial(root.x(), 0.0, root.z());
    if (radial.norm() < 1e-6) {
        double theta = kTwoPi * u_root;
        radial = Vec3(std::sin(theta), 0.0, std::cos(theta));
    }
    radial.normalize();
    radial = yaw(radial, drift);

    // parting: comb away from the plane; inside the soft front sector the
    // sweep starts shared and builds up along the strand
    double side = 1.0;
    double fringe = 0.0;  // 1 inside the soft sector
    Vec3 side_dir = radial;
    if (recipe.parting_azimuth) {
        double alpha = *recipe.parting_azimuth;
        Vec3 plane_normal(-std::cos(alpha), 0.0, std::sin(alpha));
        double s = root.dot(plane_normal);
        side = s >= 0.0 ? 1.0 : -1.0;
        side_dir = yaw(side * plane_normal, drift);
        double dtheta = wrap_angle(kTwoPi * u_root - alpha);
        if (std::abs(dtheta) < kFringeHalf)
            fringe = 1.0 - std::abs(dtheta) / kFringeHalf;
    }

    auto comb_at = [&](double t) -> Vec3 {
        if (!recipe.parting_azimuth) return radial;
        if (fringe <= 0.0) return side_dir;
        // shared forward sweep fading into the lateral side sweep; the onset
        // varies per strand
        double ramp = std::clamp((t - sweep_onset) * 2.2, 0.0, 1.0);
        double lateral = 0.15 + 0.85 * ramp;
        Vec3 c = (1.0 - fringe) * side_dir +
                 fringe * ((1.0 - lateral) * radial + lateral * side_dir);
        double n = c.norm();
        return n > 1e-9 ? Vec3(c / n) : side_dir;
    };

    // strand-local texture frame, orthogonal to gravity
    Vec3 e1 = comb_at(0.0).cross(gravity);
    if (e1.norm() < 1e-9) e1 = Vec3::UnitX();
    e1.normalize();
    Vec3 e2 = e1.cross(gravity).normalized();

    auto texture_at = [&](double t) -> Vec3 {
        Vec3 off = Vec3::Zero();
        if (recipe.wave_amplitude > 0.0 && recipe.wave_frequency > 0.0) {
            double phase = kTwoPi * recipe.wave_frequency * t + wave_phase;
            off += recipe.wave_amplitude * (std::sin(phase) - std::sin(wave_phase)) * e1;
        }
        if (recipe.curl_radius > 0.0 && recipe.curl_pitch > 0.0) {
            double turns = length / recipe.curl_pitch;
            double psi = kTwoPi * turns * t + curl_phase;
            off += recipe.curl_radius * ((std::cos(psi) - std::cos(curl_phase)) * e1 +
                                         (std::sin(psi) - std::sin(curl_phase)) * e2);
        }
        return off;
    };

    Strand s;
    s.points.resize(std::size_t(n_s));
    s.points[0] = root;
    Vec3 backbone = root;
    for (int j = 1; j < n_s; ++j) {
        double t = double(j) / double(n_s - 1);
        double droop_t = recipe.droop * std::min(1.0, t / kDroopRamp);
        Vec3 lateral = ((1.0 - traits.comb) * normal + traits.comb * comb_at(t)).normalized();
        Vec3 dir = ((1.0 - droop_t) * lateral + droop_t * gravity).normalized();
        backbone += step * dir;
        Vec3 p = backbone + texture_at(t);
        // keep clear of the head; roots stay put
        for (int it = 0; it < 2; ++it) {
            double d = sdf.value(p);
            if (d >= kClearanceMm) break;
            p += sdf.normal(p) * (kClearanceMm - d);
        }
        s.points[std::size_t(j)] = p;
    }
    return s;
}

}  // namespace

Groom generate_groom(const StyleRecipe& recipe, const ScalpSurface& scalp, MapResolution res) {
    if (!recipe.valid()) throw std::invalid_argument("generate_groom: invalid recipe");

    HeadSdf sdf{scalp.semi_axes};
    Groom g;
    g.n_s = 100;
    g.map_height = res.height;
    g.map_width = res.width;

    std::vector<std::int32_t> haired;
    haired.reserve(std::size_t(res.texels()));
    for (int t = 0; t < res.texels(); ++t) {
        int r = t / res.width;
        double v = texel_v(r, res.height);
        if (v <= recipe.baldness_cap) haired.push_back(t);
    }

    g.strands.resize(haired.size());
    g.texel_ids.assign(haired.begin(), haired.end());
    parallel_for(haired.size(), [&](std::size_t i) {
        int t = haired[i];
        int r = t / res.width, c = t % res.width;
        double u = texel_u(c, res.width);
        double v = texel_v(r, res.height);
        Vec3 root = scalp.uv_to_point(u, v);
        g.strands[i] = grow_strand(recipe, scalp, sdf, root, u,
                                   mix_seed(recipe.seed, std::uint64_t(t)), g.n_s);
    });
    return g;
}

Groom mirror_groom(const Groom& g, const ScalpSurface& scalp) {
    (void)scalp;
    Groom out = g;
    for (Strand& s : out.strands)
        for (Vec3& p : s.points) p.x() = -p.x();
    if (out.has_texel_ids() && out.map_width > 0) {
        for (std::size_t i = 0; i < out.texel_ids.size(); ++i) {
            int t = out.texel_ids[i];
            int r = t / out.map_width, c = t % out.map_width;
            out.texel_ids[i] = r * out.map_width + (out.map_width - 1 - c);
        }
    }
    return out;
}

std::vector<Groom> generate_dataset(const std::vector<StyleRecipe>& recipes, int per_recipe,
                                    std::uint64_t seed, bool mirror, const ScalpSurface& scalp,
                                    MapResolution res) {
    std::vector<Groom> out;
    out.reserve(std::size_t(recipes.size()) * per_recipe * (mirror ? 2 : 1));
    for (std::size_t ri = 0; ri < recipes.size(); ++ri) {
        for (int si = 0; si < per_recipe; ++si) {
            RandomStream rs(mix_seed(seed, ri * 1000003ull + std::size_t(si)));
            StyleRecipe r = recipes[ri];
            auto jitter = [&](double x) { return x * (1.0 + 0.1 * (2.0 * rs.uniform() - 1.0)); };
            r.length_min = jitter(r.length_min);
            r.length_max = std::max(r.length_min, jitter(r.length_max));
            r.wave_amplitude = jitter(r.wave_amplitude);
            r.wave_frequency = jitter(r.wave_frequency);
            r.curl_radius = jitter(r.curl_radius);
            r.curl_pitch = jitter(r.curl_pitch);
            r.baldness_cap = std::clamp(jitter(r.baldness_cap), 0.0, 1.0);
            r.droop = std::clamp(jitter(r.droop), 0.0, 1.0);
            r.seed = rs.next_u64();
            out.push_back(generate_groom(r, scalp, res));
            if (mirror) out.push_back(mirror_groom(out.back(), scalp));
        }
    }
    return out;
}

}  // namespace groom
