#include "groom/densify.hpp"

#include "groom/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace groom {

namespace {

// Same lazy renormalization rule as the codec: untouched when the blend
// already satisfies the unit invariant, so delta weights pass codes through
// bit-for-bit.
inline void renormalize_phase(double& c, double& s) {
    double m2 = c * c + s * s;
    if (m2 < 1e-18) {
        c = 1.0;
        s = 0.0;
    } else if (std::abs(m2 - 1.0) > 1e-6) {
        double m = std::sqrt(m2);
        c /= m;
        s /= m;
    }
}

struct GuideRefs {
    const FrequencyCode* code[4] = {nullptr, nullptr, nullptr, nullptr};
    int count = 0;
};

GuideRefs footprint_guides(const StrandMap& low, const Footprint& fp) {
    GuideRefs g;
    for (int i = 0; i < 4; ++i) {
        int r = fp.guide_row(i), c = fp.guide_col(i);
        if (low.occupied(r, c)) {
            g.code[i] = &low.code_at(r, c);
            ++g.count;
        }
    }
    return g;
}

}  // namespace

bool WeightMap::valid(double eps) const {
    for (int t = 0; t < height * width; ++t) {
        const double* a = w.data() + std::size_t(t) * 5;
        double sum = 0.0;
        for (int i = 0; i < 5; ++i) {
            if (!std::isfinite(a[i])) return false;
            sum += a[i];
        }
        if (sum < 1.0 - eps || sum > 1.0 + eps) return false;
    }
    return true;
}

Footprint footprint_of(int high_r, int high_c, int high_h, int high_w, int low_h, int low_w) {
    // continuous low-grid coordinates of the high texel center
    double u = texel_u(high_c, high_w);
    double v = texel_v(high_r, high_h);
    double x = u * low_w - 0.5;
    double y = (1.0 - v) * low_h - 0.5;

    Footprint fp;
    int c0 = std::clamp(int(std::floor(x)), 0, low_w - 2);
    int r0 = std::clamp(int(std::floor(y)), 0, low_h - 2);
    fp.cols[0] = c0;
    fp.cols[1] = c0 + 1;
    fp.rows[0] = r0;
    fp.rows[1] = r0 + 1;
    fp.fx = std::clamp(x - c0, 0.0, 1.0);
    fp.fy = std::clamp(y - r0, 0.0, 1.0);
    fp.bilinear = {(1.0 - fp.fx) * (1.0 - fp.fy), fp.fx * (1.0 - fp.fy),
                   (1.0 - fp.fx) * fp.fy, fp.fx * fp.fy};
    for (int i = 0; i < 4; ++i) {
        double dx = x - fp.guide_col(i);
        double dy = y - fp.guide_row(i);
        fp.dist[i] = std::sqrt(dx * dx + dy * dy);
    }
    return fp;
}

std::array<double, kGuideDescriptorDim> guide_descriptor(const FrequencyCode& code, int f_l) {
    if (f_l < 1 || f_l > code.cfg.f)
        throw std::invalid_argument("guide_descriptor: cut-off out of range");
    std::array<double, kGuideDescriptorDim> out{};
    const double inv_seg = 1.0 / double(code.cfg.n_g);
    int o = 0;
    for (int axis = 0; axis < 3; ++axis) {
        for (int n = 0; n < f_l; ++n) {
            double a = 0.0, c = 0.0, s = 0.0;
            for (int seg = 0; seg < code.cfg.n_g; ++seg) {
                int idx = code.band_index(seg, axis, n);
                a += code.amp[idx];
                c += code.cos_phase[idx];
                s += code.sin_phase[idx];
            }
            out[std::size_t(o++)] = a * inv_seg;
            out[std::size_t(o++)] = c * inv_seg;
            out[std::size_t(o++)] = s * inv_seg;
        }
    }
    return out;
}

GuideFeatureMap build_features(const StrandMap& low, MapResolution high_res, int f_l) {
    const int desc = 3 * f_l * 3;
    if (desc != kGuideDescriptorDim)
        throw std::invalid_argument("build_features: descriptor size requires f_l = 8");

    // per-guide descriptors, zero where empty
    std::vector<std::array<double, kGuideDescriptorDim>> descs(std::size_t(low.texels()));
    parallel_for(std::size_t(low.texels()), [&](std::size_t t) {
        if (low.slot[t] >= 0)
            descs[t] = guide_descriptor(low.codes[std::size_t(low.slot[t])], f_l);
        else
            descs[t].fill(0.0);
    })
        ;

    GuideFeatureMap fm;
    fm.height = high_res.height;
    fm.width = high_res.width;
    fm.channels = 5 * kGuideDescriptorDim + 4;
    fm.values.resize(std::size_t(fm.height) * fm.width * fm.channels);

    parallel_for(std::size_t(fm.height) * fm.width, [&](std::size_t t) {
        int r = int(t) / fm.width, c = int(t) % fm.width;
        Footprint fp = footprint_of(r, c, fm.height, fm.width, low.height, low.width);
        double* out = fm.values.data() + t * fm.channels;
        double* blend = out + 4 * kGuideDescriptorDim;
        for (int d = 0; d < kGuideDescriptorDim; ++d) blend[d] = 0.0;
        for (int i = 0; i < 4; ++i) {
            std::size_t g = std::size_t(fp.guide_row(i)) * low.width + fp.guide_col(i);
            const auto& gd = descs[g];
            for (int d = 0; d < kGuideDescriptorDim; ++d) {
                out[i * kGuideDescriptorDim + d] = gd[std::size_t(d)];
                blend[d] += fp.bilinear[std::size_t(i)] * gd[std::size_t(d)];
            }
            out[5 * kGuideDescriptorDim + i] = fp.dist[std::size_t(i)];
        }
    });
    return fm;
}

StrandMap apply_weights(const StrandMap& low, const WeightMap& weights,
                        const BaldnessMap& baldness) {
    if (weights.height != baldness.height || weights.width != baldness.width)
        throw std::invalid_argument("apply_weights: weight/baldness dimensions differ");

    MapResolution high{weights.height, weights.width};
    StrandMap out(high, low.cfg, low.scalp);

    const int bands = low.cfg.bands();
    std::vector<std::int8_t> haired(std::size_t(high.texels()), 0);
    std::vector<FrequencyCode> blended(std::size_t(high.texels()));

    parallel_for(std::size_t(high.texels()), [&](std::size_t t) {
        int r = int(t) / high.width, c = int(t) % high.width;
        if (baldness.at(r, c) < 0.5) return;
        Footprint fp = footprint_of(r, c, high.height, high.width, low.height, low.width);
        GuideRefs guides = footprint_guides(low, fp);
        if (guides.count == 0) return;

        const double* a = weights.at(r, c);

        // effective per-guide weight with the bilinear share folded in,
        // renormalized over occupied guides when some are missing
        double eff[4];
        double bsum = 0.0;
        for (int i = 0; i < 4; ++i)
            if (guides.code[i]) bsum += fp.bilinear[std::size_t(i)];
        double total = 0.0;
        for (int i = 0; i < 4; ++i) {
            if (!guides.code[i]) {
                eff[i] = 0.0;
                continue;
            }
            double b = bsum > 0.0 ? fp.bilinear[std::size_t(i)] / bsum : 1.0 / guides.count;
            eff[i] = a[i] + a[4] * b;
            total += eff[i];
        }
        if (total <= 0.0) return;
        if (guides.count < 4)
            for (int i = 0; i < 4; ++i) eff[i] /= total;

        FrequencyCode y(low.cfg);
        for (int i = 0; i < bands; ++i) {
            double amp = 0.0, cp = 0.0, sp = 0.0;
            for (int gi = 0; gi < 4; ++gi) {
                if (!guides.code[gi] || eff[gi] == 0.0) continue;
                amp += eff[gi] * guides.code[gi]->amp[std::size_t(i)];
                cp += eff[gi] * guides.code[gi]->cos_phase[std::size_t(i)];
                sp += eff[gi] * guides.code[gi]->sin_phase[std::size_t(i)];
            }
            y.amp[std::size_t(i)] = std::max(0.0, amp);
            renormalize_phase(cp, sp);
            y.cos_phase[std::size_t(i)] = cp;
            y.sin_phase[std::size_t(i)] = sp;
        }
        haired[t] = 1;
        blended[t] = std::move(y);
    });

    for (int t = 0; t < high.texels(); ++t) {
        if (!haired[std::size_t(t)]) continue;
        out.slot[std::size_t(t)] = std::int32_t(out.codes.size());
        out.codes.push_back(std::move(blended[std::size_t(t)]));
    }
    return out;
}

namespace {

// Hair coverage for the upsampled grid: bilinear interpolation of guide
// occupancy at each high texel center.
BaldnessMap derive_baldness(const StrandMap& low, MapResolution high) {
    BaldnessMap b(high.height, high.width);
    for (int r = 0; r < high.height; ++r) {
        for (int c = 0; c < high.width; ++c) {
            Footprint fp = footprint_of(r, c, high.height, high.width, low.height, low.width);
            double v = 0.0;
            for (int i = 0; i < 4; ++i)
                if (low.occupied(fp.guide_row(i), fp.guide_col(i)))
                    v += fp.bilinear[std::size_t(i)];
            b.set(r, c, v);
        }
    }
    return b;
}

int nearest_occupied_guide(const StrandMap& low, const Footprint& fp) {
    int arg = -1;
    double best = std::numeric_limits<double>::max();
    for (int i = 0; i < 4; ++i) {
        if (!low.occupied(fp.guide_row(i), fp.guide_col(i))) continue;
        if (fp.dist[std::size_t(i)] < best) {
            best = fp.dist[std::size_t(i)];
            arg = i;
        }
    }
    return arg;
}

}  // namespace

UpsampleResult upsample_nearest(const StrandMap& low, MapResolution high_res) {
    WeightMap w(high_res.height, high_res.width);
    for (int r = 0; r < high_res.height; ++r) {
        for (int c = 0; c < high_res.width; ++c) {
            Footprint fp = footprint_of(r, c, high_res.height, high_res.width,
                                        low.height, low.width);
            int g = nearest_occupied_guide(low, fp);
            if (g < 0) continue;  // empty footprint keeps the default (0,0,0,0,1)
            double* a = w.at(r, c);
            a[4] = 0.0;
            a[g] = 1.0;
        }
    }
    BaldnessMap baldness = derive_baldness(low, high_res);
    return {apply_weights(low, w, baldness), std::move(w)};
}

UpsampleResult upsample_bilinear(const StrandMap& low, MapResolution high_res) {
    WeightMap w(high_res.height, high_res.width);  // defaults to (0,0,0,0,1)
    BaldnessMap baldness = derive_baldness(low, high_res);
    return {apply_weights(low, w, baldness), std::move(w)};
}

UpsampleResult upsample_parting_aware(const StrandMap& low, MapResolution high_res,
                                      double coherence_threshold) {
    // initial growth direction per guide: the decoded first gradient
    std::vector<Vec3> first_dir(std::size_t(low.texels()), Vec3::Zero());
    parallel_for(std::size_t(low.texels()), [&](std::size_t t) {
        if (low.slot[t] < 0) return;
        int r = int(t) / low.width, c = int(t) % low.width;
        Strand s = decode(low.code_at(r, c), low.root_at(r, c));
        Vec3 d = s.points[1] - s.points[0];
        double n = d.norm();
        first_dir[t] = n > 0.0 ? Vec3(d / n) : Vec3::Zero();
    });

    WeightMap w(high_res.height, high_res.width);
    for (int r = 0; r < high_res.height; ++r) {
        for (int c = 0; c < high_res.width; ++c) {
            Footprint fp = footprint_of(r, c, high_res.height, high_res.width,
                                        low.height, low.width);
            int occ[4];
            int n_occ = 0;
            for (int i = 0; i < 4; ++i)
                if (low.occupied(fp.guide_row(i), fp.guide_col(i))) occ[n_occ++] = i;
            if (n_occ <= 1) continue;  // bilinear default degenerates to the sole guide

            auto dir_of = [&](int i) -> const Vec3& {
                return first_dir[std::size_t(fp.guide_row(i)) * low.width + fp.guide_col(i)];
            };

            double min_cos = 1.0;
            for (int i = 0; i < n_occ; ++i)
                for (int j = i + 1; j < n_occ; ++j)
                    min_cos = std::min(min_cos, dir_of(occ[i]).dot(dir_of(occ[j])));
            if (min_cos >= coherence_threshold) continue;  // coherent: keep bilinear

            // split on the most dissimilar pair, then snap to the nearest
            // guide of the cluster that owns the texel's nearest guide
            int seed_a = occ[0], seed_b = occ[1];
            double worst = 2.0;
            for (int i = 0; i < n_occ; ++i) {
                for (int j = i + 1; j < n_occ; ++j) {
                    double cs = dir_of(occ[i]).dot(dir_of(occ[j]));
                    if (cs < worst) {
                        worst = cs;
                        seed_a = occ[i];
                        seed_b = occ[j];
                    }
                }
            }
            int nearest = nearest_occupied_guide(low, fp);
            bool in_a = dir_of(nearest).dot(dir_of(seed_a)) >= dir_of(nearest).dot(dir_of(seed_b));
            const Vec3& anchor = in_a ? dir_of(seed_a) : dir_of(seed_b);

            int pick = -1;
            double best = std::numeric_limits<double>::max();
            for (int i = 0; i < n_occ; ++i) {
                int g = occ[i];
                bool same_cluster = dir_of(g).dot(anchor) >=
                                    dir_of(g).dot(in_a ? dir_of(seed_b) : dir_of(seed_a));
                if (!same_cluster) continue;
                if (fp.dist[std::size_t(g)] < best) {
                    best = fp.dist[std::size_t(g)];
                    pick = g;
                }
            }
            if (pick < 0) pick = nearest;
            double* a = w.at(r, c);
            a[4] = 0.0;
            a[pick] = 1.0;
        }
    }
    BaldnessMap baldness = derive_baldness(low, high_res);
    return {apply_weights(low, w, baldness), std::move(w)};
}

WeightRegularizers weight_regularizers(const WeightMap& w) {
    WeightRegularizers reg;
    const int n = w.height * w.width;
    if (n == 0) return reg;
    for (int t = 0; t < n; ++t) {
        const double* a = w.w.data() + std::size_t(t) * 5;
        reg.bl += std::abs(a[4] - 1.0);
        double g = 0.0, sum = 0.0;
        for (int i = 0; i < 4; ++i) {
            g += std::abs(a[i]);
            sum += a[i];
        }
        reg.g += g;
        reg.sum_dev += std::abs(sum + a[4] - 1.0);
    }
    reg.bl /= n;
    reg.g /= n;
    reg.sum_dev /= n;
    return reg;
}

std::array<double, 4> fold_bilinear_weight(const double* w5, const std::array<double, 4>& bilinear) {
    std::array<double, 4> eff{};
    for (int i = 0; i < 4; ++i) eff[std::size_t(i)] = w5[i] + w5[4] * bilinear[std::size_t(i)];
    return eff;
}

std::vector<double> weight_std_map(const WeightMap& w, int low_h, int low_w) {
    std::vector<double> out(std::size_t(w.height) * w.width, 0.0);
    for (int r = 0; r < w.height; ++r) {
        for (int c = 0; c < w.width; ++c) {
            Footprint fp = footprint_of(r, c, w.height, w.width, low_h, low_w);
            std::array<double, 4> eff = fold_bilinear_weight(w.at(r, c), fp.bilinear);
            double mean = (eff[0] + eff[1] + eff[2] + eff[3]) / 4.0;
            double var = 0.0;
            for (double e : eff) var += (e - mean) * (e - mean);
            out[std::size_t(r) * w.width + c] = std::sqrt(var / 4.0);
        }
    }
    return out;
}

}  // namespace groom
