#include "groom/scalp.hpp"

#include "groom/parallel.hpp"

#include <cmath>
#include <limits>

namespace groom {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Vec3 ScalpSurface::uv_to_point(double u, double v) const {
    double theta = kTwoPi * u;
    double phi = phi_max * v;
    double sp = std::sin(phi);
    return Vec3(semi_axes.x() * sp * std::sin(theta),
                semi_axes.y() * std::cos(phi),
                semi_axes.z() * sp * std::cos(theta));
}

Eigen::Vector2d ScalpSurface::point_to_uv(const Vec3& p, double max_dist) const {
    Vec3 q = p.cwiseQuotient(semi_axes);
    double r = q.norm();
    if (r < 1e-12) throw ChartError("point_to_uv: point at head center");
    q /= r;
    double phi = std::acos(std::clamp(q.y(), -1.0, 1.0));
    double theta = std::atan2(q.x(), q.z());
    if (theta < 0.0) theta += kTwoPi;
    double u = theta / kTwoPi;
    if (u >= 1.0) u = 0.0;
    double v = std::clamp(phi / phi_max, 0.0, 1.0);
    Vec3 on_chart = uv_to_point(u, v);
    if ((p - on_chart).norm() > max_dist)
        throw ChartError("point_to_uv: point lies off the scalp chart");
    return {u, v};
}

Vec3 ScalpSurface::project_to_surface(const Vec3& p) const {
    Vec3 q = p.cwiseQuotient(semi_axes);
    double r = q.norm();
    if (r < 1e-12) return Vec3(0.0, semi_axes.y(), 0.0);
    return p / r;
}

Vec3 ScalpSurface::normal_at(const Vec3& p) const {
    Vec3 grad(2.0 * p.x() / (semi_axes.x() * semi_axes.x()),
              2.0 * p.y() / (semi_axes.y() * semi_axes.y()),
              2.0 * p.z() / (semi_axes.z() * semi_axes.z()));
    double n = grad.norm();
    return n > 0.0 ? Vec3(grad / n) : Vec3(0.0, 1.0, 0.0);
}

double HeadSdf::value(const Vec3& p) const {
    Vec3 q = p.cwiseQuotient(semi_axes);
    double implicit = q.squaredNorm() - 1.0;
    Vec3 grad = 2.0 * q.cwiseQuotient(semi_axes);
    double g = grad.norm();
    if (g < 1e-12) return implicit * semi_axes.minCoeff();
    return implicit / g;
}

Vec3 HeadSdf::normal(const Vec3& p) const {
    Vec3 grad(2.0 * p.x() / (semi_axes.x() * semi_axes.x()),
              2.0 * p.y() / (semi_axes.y() * semi_axes.y()),
              2.0 * p.z() / (semi_axes.z() * semi_axes.z()));
    double n = grad.norm();
    return n > 0.0 ? Vec3(grad / n) : Vec3(0.0, 1.0, 0.0);
}

std::vector<TexelExtent> texel_extents(const ScalpSurface& scalp, MapResolution res) {
    std::vector<TexelExtent> out(std::size_t(res.texels()));
    const int steps = 8;  // arc sampling per texel edge
    for (int r = 0; r < res.height; ++r) {
        for (int c = 0; c < res.width; ++c) {
            double u0 = double(c) / res.width, u1 = double(c + 1) / res.width;
            double v0 = 1.0 - double(r + 1) / res.height;
            double v1 = 1.0 - double(r) / res.height;
            double um = 0.5 * (u0 + u1), vm = 0.5 * (v0 + v1);
            TexelExtent e;
            for (int i = 0; i < steps; ++i) {
                double a = double(i) / steps, b = double(i + 1) / steps;
                e.along_u += (scalp.uv_to_point(u0 + (u1 - u0) * b, vm) -
                              scalp.uv_to_point(u0 + (u1 - u0) * a, vm)).norm();
                e.along_v += (scalp.uv_to_point(um, v0 + (v1 - v0) * b) -
                              scalp.uv_to_point(um, v0 + (v1 - v0) * a)).norm();
            }
            out[std::size_t(r) * res.width + c] = e;
        }
    }
    return out;
}

double baldness_iou(const BaldnessMap& a, const BaldnessMap& b, double threshold) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("baldness_iou: dimension mismatch");
    long long inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        bool ia = a.values[i] >= threshold;
        bool ib = b.values[i] >= threshold;
        inter += (ia && ib);
        uni += (ia || ib);
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

void StrandMap::set(int r, int c, FrequencyCode code) {
    std::int32_t& s = slot[std::size_t(r) * width + c];
    if (s >= 0) {
        codes[std::size_t(s)] = std::move(code);
    } else {
        s = std::int32_t(codes.size());
        codes.push_back(std::move(code));
    }
}

BaldnessMap StrandMap::occupancy_mask() const {
    BaldnessMap m(height, width);
    for (int i = 0; i < texels(); ++i) m.values[std::size_t(i)] = slot[std::size_t(i)] >= 0 ? 1.0 : 0.0;
    return m;
}

MapBuildResult groom_to_map(const Groom& g, MapResolution res, const ScalpSurface& scalp,
                            const CodecConfig& cfg) {
    if (g.n_s != cfg.n_s)
        throw std::invalid_argument("groom_to_map: groom point count does not match codec");

    MapBuildResult result{StrandMap(res, cfg, scalp), 0};
    StrandMap& map = result.map;

    // winner per texel: nearest root to the texel-center scalp point
    std::vector<std::int32_t> winner(std::size_t(res.texels()), -1);
    std::vector<double> best(std::size_t(res.texels()), std::numeric_limits<double>::max());
    for (std::size_t i = 0; i < g.strands.size(); ++i) {
        const Vec3& root = g.strands[i].points.front();
        double u, v;
        try {
            Eigen::Vector2d uv = scalp.point_to_uv(root, 2.0);
            u = uv.x();
            v = uv.y();
        } catch (const ChartError&) {
            ++result.skipped;
            continue;
        }
        int r = texel_row(v, res.height);
        int c = texel_col(u, res.width);
        std::size_t t = std::size_t(r) * res.width + c;
        double d = (root - map.root_at(r, c)).norm();
        if (d < best[t]) {
            best[t] = d;
            winner[t] = std::int32_t(i);
        }
    }

    std::vector<std::int32_t> occupied;
    occupied.reserve(g.strands.size());
    for (int t = 0; t < res.texels(); ++t)
        if (winner[std::size_t(t)] >= 0) occupied.push_back(t);

    map.codes.resize(occupied.size());
    for (std::size_t j = 0; j < occupied.size(); ++j)
        map.slot[std::size_t(occupied[j])] = std::int32_t(j);
    parallel_for(occupied.size(), [&](std::size_t j) {
        const Strand& s = g.strands[std::size_t(winner[std::size_t(occupied[j])])];
        map.codes[j] = encode(to_gradients(s), cfg);
    });
    return result;
}

Groom map_to_groom(const StrandMap& m) {
    Groom g;
    g.n_s = m.cfg.n_s;
    g.map_height = m.height;
    g.map_width = m.width;

    std::vector<std::int32_t> occupied;
    for (int t = 0; t < m.texels(); ++t)
        if (m.slot[std::size_t(t)] >= 0) occupied.push_back(t);

    g.strands.resize(occupied.size());
    g.texel_ids.resize(occupied.size());
    parallel_for(occupied.size(), [&](std::size_t j) {
        int t = occupied[j];
        int r = t / m.width, c = t % m.width;
        g.texel_ids[j] = t;
        g.strands[j] = decode(m.code_at(r, c), m.root_at(r, c));
    });
    return g;
}

Eigen::VectorXd LatentMap::flatten() const {
    Eigen::VectorXd v(std::size_t(texels()) * channels());
    for (int t = 0; t < texels(); ++t) {
        for (int d = 0; d < latent_dim; ++d)
            v[std::size_t(t) * channels() + d] = latent[std::size_t(t) * latent_dim + d];
        v[std::size_t(t) * channels() + latent_dim] = baldness[std::size_t(t)];
    }
    return v;
}

LatentMap LatentMap::from_flat(const Eigen::VectorXd& v, int h, int w, int dim) {
    LatentMap m(h, w, dim);
    if (v.size() != Eigen::Index(std::size_t(h) * w * (dim + 1)))
        throw std::invalid_argument("LatentMap::from_flat: dimension mismatch");
    for (int t = 0; t < m.texels(); ++t) {
        for (int d = 0; d < dim; ++d)
            m.latent[std::size_t(t) * dim + d] = v[std::size_t(t) * (dim + 1) + d];
        m.baldness[std::size_t(t)] = std::clamp(v[std::size_t(t) * (dim + 1) + dim], 0.0, 1.0);
    }
    return m;
}

BaldnessMap LatentMap::baldness_mask() const {
    BaldnessMap m(height, width);
    m.values = baldness;
    return m;
}

}  // namespace groom
