#include "groom/refine.hpp"

#include "groom/freq_codec.hpp"
#include "groom/parallel.hpp"
#include "groom/random.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace groom {

namespace {

using Feature = Eigen::Matrix<double, 6, 1>;

Feature strand_feature(const Strand& s) {
    Feature f;
    f.head<3>() = s.points.front();
    f.tail<3>() = s.points.back();
    return f;
}

struct KMeansResult {
    std::vector<int> assignment;
    std::vector<Feature> centroids;
};

// Seeded k-means++ with a fixed iteration cap; runs serially so the result
// does not depend on scheduling.
KMeansResult kmeans(const std::vector<Feature>& pts, int k, std::uint64_t seed,
                    int max_iters = 100) {
    KMeansResult res;
    res.assignment.assign(pts.size(), 0);
    res.centroids.reserve(std::size_t(k));

    RandomStream rs(seed);
    std::vector<double> dist2(pts.size(), std::numeric_limits<double>::max());
    res.centroids.push_back(pts[std::size_t(rs.uniform_index(pts.size()))]);
    while (int(res.centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double d = (pts[i] - res.centroids.back()).squaredNorm();
            dist2[i] = std::min(dist2[i], d);
            total += dist2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double target = rs.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                acc += dist2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = std::size_t(rs.uniform_index(pts.size()));
        }
        res.centroids.push_back(pts[pick]);
    }

    std::vector<Feature> sums(static_cast<std::size_t>(k));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            int arg = 0;
            double best = std::numeric_limits<double>::max();
            for (int c = 0; c < k; ++c) {
                double d = (pts[i] - res.centroids[std::size_t(c)]).squaredNorm();
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            if (arg != res.assignment[i]) {
                res.assignment[i] = arg;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        for (int c = 0; c < k; ++c) {
            sums[std::size_t(c)].setZero();
            counts[std::size_t(c)] = 0;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            sums[std::size_t(res.assignment[i])] += pts[i];
            ++counts[std::size_t(res.assignment[i])];
        }
        for (int c = 0; c < k; ++c)
            if (counts[std::size_t(c)] > 0)
                res.centroids[std::size_t(c)] = sums[std::size_t(c)] / counts[std::size_t(c)];
    }
    return res;
}

Vec3 rotate_about(const Vec3& p, const Vec3& pivot, const Vec3& axis, double angle) {
    return pivot + Eigen::AngleAxisd(angle, axis) * (p - pivot);
}

}  // namespace

double rotation_falloff(int j, int i, const PenetrationParams& p) {
    double expo = double(j - i) - double(p.lookahead) / 2.0;
    if (p.clamp_exponent && expo < 0.0) expo = 0.0;
    return std::pow(p.decay, expo);
}

Groom wisp_formation(const Groom& g, int w, double s, double l_bar, std::uint64_t seed) {
    if (w == 0 || s == 0.0) return g;
    if (w < 0 || s < 0.0 || l_bar <= 0.0)
        throw std::invalid_argument("wisp_formation: parameters must be non-negative");
    if (std::size_t(w) > g.strands.size())
        throw std::invalid_argument("wisp_formation: more clusters than strands");

    std::vector<Feature> feats(g.strands.size());
    for (std::size_t i = 0; i < g.strands.size(); ++i) feats[i] = strand_feature(g.strands[i]);

    KMeansResult km = kmeans(feats, w, seed);

    // cluster center strand = the member nearest its centroid (medoid)
    std::vector<int> medoid(std::size_t(w), -1);
    std::vector<double> medoid_d(std::size_t(w), std::numeric_limits<double>::max());
    for (std::size_t i = 0; i < feats.size(); ++i) {
        int c = km.assignment[i];
        double d = (feats[i] - km.centroids[std::size_t(c)]).squaredNorm();
        if (d < medoid_d[std::size_t(c)]) {
            medoid_d[std::size_t(c)] = d;
            medoid[std::size_t(c)] = int(i);
        }
    }

    Groom out = g;
    parallel_for(out.strands.size(), [&](std::size_t i) {
        int c = km.assignment[i];
        if (medoid[std::size_t(c)] < 0 || std::size_t(medoid[std::size_t(c)]) == i) return;
        const Strand& center = g.strands[std::size_t(medoid[std::size_t(c)])];
        const Strand& src = g.strands[i];
        Strand& dst = out.strands[i];

        double arc = 0.0;
        double delta_sum = 0.0;
        for (int v = 1; v < src.size(); ++v) {
            arc += (src.points[std::size_t(v)] - src.points[std::size_t(v - 1)]).norm();
            Vec3 to_center = center.points[std::size_t(v)] - src.points[std::size_t(v)];
            double d = to_center.norm();
            double term = s * std::min(1.0, arc / l_bar) / std::max(1.0, d * d);
            double delta = term + delta_sum;
            delta_sum += delta;
            if (d > 1e-12)
                dst.points[std::size_t(v)] += to_center * (std::min(delta, d) / d);
        }
    });
    return out;
}

Groom duplicate(const Groom& g, int factor, double noise_amp, double noise_phase,
                double texel_pitch_mm, const ScalpSurface& scalp, std::uint64_t seed) {
    if (factor < 1) throw std::invalid_argument("duplicate: factor must be >= 1");

    Groom out;
    out.n_s = g.n_s;
    out.map_height = g.map_height;
    out.map_width = g.map_width;
    out.strands.resize(g.strands.size() * std::size_t(factor));
    if (g.has_texel_ids()) out.texel_ids.resize(out.strands.size());

    const bool identity_copies = noise_amp == 0.0 && noise_phase == 0.0 && texel_pitch_mm == 0.0;
    const CodecConfig cfg(g.n_s, 3);

    parallel_for(g.strands.size(), [&](std::size_t i) {
        const Strand& src = g.strands[i];
        for (int copy = 0; copy < factor; ++copy) {
            std::size_t dst = i * std::size_t(factor) + std::size_t(copy);
            if (g.has_texel_ids()) out.texel_ids[dst] = g.texel_ids[i];
            if (copy == 0 || identity_copies) {
                out.strands[dst] = src;
                continue;
            }
            RandomStream rs(mix_seed(seed, dst));
            Vec3 root = src.points.front();
            if (texel_pitch_mm > 0.0) {
                Vec3 n = scalp.normal_at(root);
                Vec3 t1 = n.cross(Vec3::UnitY());
                if (t1.norm() < 1e-9) t1 = n.cross(Vec3::UnitX());
                t1.normalize();
                Vec3 t2 = n.cross(t1);
                double half = texel_pitch_mm * 0.5;
                Vec3 jittered = root + rs.uniform(-half, half) * t1 +
                                rs.uniform(-half, half) * t2;
                jittered = scalp.project_to_surface(jittered);
                // keep the root on the chart
                try {
                    Eigen::Vector2d uv = scalp.point_to_uv(jittered, 1.0);
                    root = scalp.uv_to_point(uv.x(), uv.y());
                } catch (const ChartError&) {
                    root = src.points.front();
                }
            }
            FrequencyCode code = encode(to_gradients(src), cfg);
            code = perturb(code, noise_amp, noise_phase, rs.next_u64());
            out.strands[dst] = decode(code, root);
        }
    });
    return out;
}

PenetrationResult resolve_penetration(const Groom& g, const HeadSdf& sdf,
                                      const PenetrationParams& p) {
    if (!p.valid()) throw std::invalid_argument("resolve_penetration: invalid parameters");

    Groom corrected = g;
    const int k = p.lookahead;

    parallel_for(corrected.strands.size(), [&](std::size_t si) {
        Strand& s = corrected.strands[si];
        const int n = s.size();
        for (int i = 0; i + k < n; ++i) {
            Vec3& ahead = s.points[std::size_t(i + k)];
            if (sdf.value(ahead) >= 0.0) continue;

            const Vec3 pivot = s.points[std::size_t(i)];
            Vec3 r = ahead - pivot;
            Vec3 nrm = sdf.normal(ahead);
            Vec3 axis = r.cross(nrm);
            double an = axis.norm();
            if (an < 1e-9) continue;  // degenerate axis, skip this correction
            axis /= an;

            // smallest angle that lifts the lookahead vertex to the margin;
            // the rotation monotonically moves it along the outward normal
            auto cleared = [&](double ang) {
                return sdf.value(rotate_about(ahead, pivot, axis, ang)) >= p.surface_margin;
            };
            double theta = std::numbers::pi / 2.0;
            if (cleared(theta)) {
                double lo = 0.0, hi = theta;
                while (hi - lo > 1e-4) {
                    double mid = 0.5 * (lo + hi);
                    if (cleared(mid))
                        hi = mid;
                    else
                        lo = mid;
                }
                theta = hi;
            }
            for (int j = i; j < n; ++j) {
                double ang = theta * rotation_falloff(j, i, p);
                s.points[std::size_t(j)] = rotate_about(s.points[std::size_t(j)], pivot, axis, ang);
            }
        }
    });

    // drop strands that still penetrate beyond tolerance
    std::vector<std::uint8_t> keep(corrected.strands.size(), 1);
    parallel_for(corrected.strands.size(), [&](std::size_t si) {
        for (const Vec3& pt : corrected.strands[si].points) {
            if (sdf.value(pt) < -p.removal_tolerance) {
                keep[si] = 0;
                break;
            }
        }
    });

    PenetrationResult res;
    res.groom.n_s = corrected.n_s;
    res.groom.map_height = corrected.map_height;
    res.groom.map_width = corrected.map_width;
    for (std::size_t i = 0; i < corrected.strands.size(); ++i) {
        if (!keep[i]) {
            ++res.removed;
            continue;
        }
        res.groom.strands.push_back(std::move(corrected.strands[i]));
        if (corrected.has_texel_ids()) res.groom.texel_ids.push_back(corrected.texel_ids[i]);
    }
    return res;
}

Groom refine(const Groom& g, const RefineParams& rp, const PenetrationParams& pp,
             const HeadSdf& sdf, const ScalpSurface& scalp) {
    if (!rp.valid()) throw std::invalid_argument("refine: invalid parameters");

    Groom current = resolve_penetration(g, sdf, pp).groom;

    const bool perturbing = rp.noise_amp > 0.0 || rp.noise_phase > 0.0;
    if (perturbing) {
        const CodecConfig cfg(current.n_s, 3);
        parallel_for(current.strands.size(), [&](std::size_t i) {
            FrequencyCode code = encode(to_gradients(current.strands[i]), cfg);
            code = perturb(code, rp.noise_amp, rp.noise_phase, mix_seed(rp.seed, i));
            current.strands[i] = decode(code, current.strands[i].points.front());
        });
    }

    const bool wisping = rp.wisp_count > 0 && rp.stickiness > 0.0;
    if (wisping)
        current = wisp_formation(current, rp.wisp_count, rp.stickiness, rp.l_bar,
                                 mix_seed(rp.seed, 0x77697370ull));

    const bool duplicating = rp.duplication_factor > 1;
    if (duplicating)
        current = duplicate(current, rp.duplication_factor, rp.noise_amp, rp.noise_phase,
                            rp.texel_pitch_mm, scalp, mix_seed(rp.seed, 0x64757065ull));

    // noise and clustering can push vertices back inside; clean up unless the
    // chain did nothing after the first pass
    if (rp.final_penetration_pass && (perturbing || wisping || duplicating))
        current = resolve_penetration(current, sdf, pp).groom;
    return current;
}

}  // namespace groom
