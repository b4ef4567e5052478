#include "groom/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace groom {

namespace {

// Pairs of strand indices in correspondence: texel identity when both grooms
// carry map context, index order otherwise.
std::vector<std::pair<std::size_t, std::size_t>> correspondence(const Groom& a, const Groom& b) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (a.has_texel_ids() && b.has_texel_ids()) {
        if (a.map_height != b.map_height || a.map_width != b.map_width)
            throw std::invalid_argument("metrics: grooms use different map resolutions");
        std::map<std::int32_t, std::size_t> bt;
        for (std::size_t i = 0; i < b.texel_ids.size(); ++i) bt[b.texel_ids[i]] = i;
        if (bt.size() != b.strands.size() || a.strands.size() != b.strands.size())
            throw std::invalid_argument("metrics: grooms are not in texel correspondence");
        for (std::size_t i = 0; i < a.texel_ids.size(); ++i) {
            auto it = bt.find(a.texel_ids[i]);
            if (it == bt.end())
                throw std::invalid_argument("metrics: grooms are not in texel correspondence");
            pairs.emplace_back(i, it->second);
        }
    } else {
        if (a.strands.size() != b.strands.size())
            throw std::invalid_argument("metrics: strand counts differ");
        for (std::size_t i = 0; i < a.strands.size(); ++i) pairs.emplace_back(i, i);
    }
    return pairs;
}

double mean_over(const std::vector<Groom>& a, const std::vector<Groom>& b,
                 double (*metric)(const Groom&, const Groom&)) {
    if (a.size() != b.size()) throw std::invalid_argument("metrics: set sizes differ");
    if (a.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += metric(a[i], b[i]);
    return acc / double(a.size());
}

}  // namespace

double positional_error(const Groom& a, const Groom& b) {
    auto pairs = correspondence(a, b);
    if (pairs.empty()) return 0.0;
    double acc = 0.0;
    for (auto [ia, ib] : pairs) {
        const Strand& sa = a.strands[ia];
        const Strand& sb = b.strands[ib];
        if (sa.size() != sb.size())
            throw std::invalid_argument("positional_error: point counts differ");
        double e = 0.0;
        for (int v = 0; v < sa.size(); ++v)
            e += (sa.points[std::size_t(v)] - sb.points[std::size_t(v)]).norm();
        acc += e / double(sa.size());
    }
    return acc / double(pairs.size());
}

double positional_error(const std::vector<Groom>& a, const std::vector<Groom>& b) {
    return mean_over(a, b, static_cast<double (*)(const Groom&, const Groom&)>(positional_error));
}

double local_error(const Groom& a, const Groom& b) {
    auto pairs = correspondence(a, b);
    if (pairs.empty()) return 0.0;
    double acc = 0.0;
    for (auto [ia, ib] : pairs) {
        const Strand& sa = a.strands[ia];
        const Strand& sb = b.strands[ib];
        if (sa.size() != sb.size())
            throw std::invalid_argument("local_error: point counts differ");
        double e = 0.0;
        for (int v = 0; v + 1 < sa.size(); ++v) {
            Vec3 da = sa.points[std::size_t(v) + 1] - sa.points[std::size_t(v)];
            Vec3 db = sb.points[std::size_t(v) + 1] - sb.points[std::size_t(v)];
            e += (da - db).norm();
        }
        acc += e / double(sa.size() - 1);
    }
    return acc / double(pairs.size());
}

double local_error(const std::vector<Groom>& a, const std::vector<Groom>& b) {
    return mean_over(a, b, static_cast<double (*)(const Groom&, const Groom&)>(local_error));
}

namespace {

double gradient_deviation(const Strand& a, const Strand& b) {
    double acc = 0.0;
    for (int v = 0; v + 1 < a.size(); ++v) {
        Vec3 da = a.points[std::size_t(v) + 1] - a.points[std::size_t(v)];
        Vec3 db = b.points[std::size_t(v) + 1] - b.points[std::size_t(v)];
        acc += (da - db).norm();
    }
    return acc / double(a.size() - 1);
}

std::vector<std::vector<std::size_t>> neighbor_lists(const Groom& g) {
    std::vector<std::vector<std::size_t>> nbrs(g.strands.size());
    if (g.has_texel_ids() && g.map_width > 0) {
        std::map<std::int32_t, std::size_t> by_texel;
        for (std::size_t i = 0; i < g.texel_ids.size(); ++i) by_texel[g.texel_ids[i]] = i;
        for (std::size_t i = 0; i < g.strands.size(); ++i) {
            int t = g.texel_ids[i];
            int r = t / g.map_width, c = t % g.map_width;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    int rr = r + dr, cc = c + dc;
                    if (rr < 0 || rr >= g.map_height || cc < 0 || cc >= g.map_width) continue;
                    auto it = by_texel.find(rr * g.map_width + cc);
                    if (it != by_texel.end()) nbrs[i].push_back(it->second);
                }
            }
        }
    } else {
        // 4 nearest roots
        const std::size_t n = g.strands.size();
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::pair<double, std::size_t>> d;
            d.reserve(n - 1);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                d.emplace_back((g.strands[i].points.front() - g.strands[j].points.front()).norm(), j);
            }
            std::size_t take = std::min<std::size_t>(4, d.size());
            std::partial_sort(d.begin(), d.begin() + long(take), d.end());
            for (std::size_t k = 0; k < take; ++k) nbrs[i].push_back(d[k].second);
        }
    }
    return nbrs;
}

}  // namespace

double messiness(const Groom& g) {
    if (g.strands.empty()) return 0.0;
    auto nbrs = neighbor_lists(g);
    double acc = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < g.strands.size(); ++i) {
        if (nbrs[i].empty()) continue;
        double di = 0.0;
        for (std::size_t j : nbrs[i]) di += gradient_deviation(g.strands[i], g.strands[j]);
        acc += di / double(nbrs[i].size());
        ++counted;
    }
    return counted > 0 ? acc / double(counted) : 0.0;
}

double jitter(const std::vector<Strand>& trajectory, double dt) {
    if (trajectory.size() < 4)
        throw std::invalid_argument("jitter: need at least 4 trajectory samples");
    const int n_s = trajectory.front().size();
    for (const Strand& s : trajectory)
        if (s.size() != n_s) throw std::invalid_argument("jitter: trajectory point counts differ");

    const double dt3 = dt * dt * dt;
    double acc = 0.0;
    std::size_t terms = 0;
    for (std::size_t t = 0; t + 3 < trajectory.size(); ++t) {
        for (int v = 0; v < n_s; ++v) {
            Vec3 d3 = trajectory[t + 3].points[std::size_t(v)] -
                      3.0 * trajectory[t + 2].points[std::size_t(v)] +
                      3.0 * trajectory[t + 1].points[std::size_t(v)] -
                      trajectory[t].points[std::size_t(v)];
            acc += d3.norm() / dt3;
            ++terms;
        }
    }
    return terms > 0 ? acc / double(terms) : 0.0;
}

double penetration_rate(const Groom& g, const HeadSdf& sdf, double tolerance_mm) {
    if (g.strands.empty()) return 0.0;
    std::size_t hits = 0;
    for (const Strand& s : g.strands) {
        for (std::size_t v = 1; v < s.points.size(); ++v) {
            if (sdf.value(s.points[v]) < -tolerance_mm) {
                ++hits;
                break;
            }
        }
    }
    return 1000.0 * double(hits) / double(g.strands.size());
}

VoxelGrid voxelize(const Groom& g, const VoxelGridParams& params) {
    VoxelGrid grid;
    grid.params = params;
    grid.occupied.assign(grid.cell_count(), 0);
    grid.flow.assign(grid.cell_count(), Vec3::Zero());

    std::vector<Vec3> first_dir(grid.cell_count(), Vec3::Zero());
    const int res = params.resolution;
    const double h = params.extent_mm / res;
    const Vec3 lo = params.center - Vec3::Constant(params.extent_mm / 2.0);

    auto cell_of = [&](const Vec3& p, int* c) {
        for (int a = 0; a < 3; ++a) {
            double x = (p[a] - lo[a]) / h;
            if (x < 0.0 || x >= res) return false;
            c[a] = int(x);
        }
        return true;
    };

    auto visit = [&](int x, int y, int z, const Vec3& dir) {
        std::size_t idx = grid.index(x, y, z);
        if (!grid.occupied[idx]) {
            grid.occupied[idx] = 1;
            first_dir[idx] = dir;
        }
        grid.flow[idx] += dir;
    };

    // fixed strand order keeps accumulation deterministic
    for (const Strand& s : g.strands) {
        for (std::size_t v = 0; v + 1 < s.points.size(); ++v) {
            Vec3 a = s.points[v], b = s.points[v + 1];
            Vec3 d = b - a;
            double len = d.norm();
            if (len < 1e-12) continue;
            Vec3 dir = d / len;

            // Amanatides-Woo traversal of the segment
            int cell[3];
            if (!cell_of(a, cell)) {
                // sample entry crudely: walk until inside or past the end
                const int steps = std::max(2, int(len / (h * 0.5)));
                bool found = false;
                for (int i = 0; i <= steps && !found; ++i) {
                    Vec3 p = a + d * (double(i) / steps);
                    found = cell_of(p, cell);
                    if (found) a = p;
                }
                if (!found) continue;
                d = b - a;
                len = d.norm();
                if (len < 1e-12) {
                    visit(cell[0], cell[1], cell[2], dir);
                    continue;
                }
            }

            int step[3];
            double t_max[3], t_delta[3];
            for (int ax = 0; ax < 3; ++ax) {
                if (d[ax] > 0.0) {
                    step[ax] = 1;
                    t_max[ax] = ((lo[ax] + (cell[ax] + 1) * h) - a[ax]) / d[ax];
                    t_delta[ax] = h / d[ax];
                } else if (d[ax] < 0.0) {
                    step[ax] = -1;
                    t_max[ax] = ((lo[ax] + cell[ax] * h) - a[ax]) / d[ax];
                    t_delta[ax] = -h / d[ax];
                } else {
                    step[ax] = 0;
                    t_max[ax] = std::numeric_limits<double>::max();
                    t_delta[ax] = std::numeric_limits<double>::max();
                }
            }

            visit(cell[0], cell[1], cell[2], dir);
            double t = 0.0;
            while (t < 1.0) {
                int ax = 0;
                if (t_max[1] < t_max[ax]) ax = 1;
                if (t_max[2] < t_max[ax]) ax = 2;
                t = t_max[ax];
                if (t >= 1.0) break;
                cell[ax] += step[ax];
                if (cell[ax] < 0 || cell[ax] >= res) break;
                t_max[ax] += t_delta[ax];
                visit(cell[0], cell[1], cell[2], dir);
            }
        }
    }

    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        if (!grid.occupied[i]) continue;
        double n = grid.flow[i].norm();
        grid.flow[i] = n > 1e-12 ? Vec3(grid.flow[i] / n) : first_dir[i];
    }
    return grid;
}

VolumetricComparison volumetric_compare(const VoxelGrid& a, const VoxelGrid& b) {
    if (a.params.resolution != b.params.resolution)
        throw std::invalid_argument("volumetric_compare: grid resolutions differ");
    VolumetricComparison out;
    std::size_t inter = 0, uni = 0, na = 0, nb = 0;
    double flow_acc = 0.0;
    for (std::size_t i = 0; i < a.cell_count(); ++i) {
        bool ia = a.occupied[i], ib = b.occupied[i];
        na += ia;
        nb += ib;
        inter += (ia && ib);
        uni += (ia || ib);
        if (ia && ib) flow_acc += (a.flow[i] - b.flow[i]).norm();
    }
    out.iou = uni == 0 ? 1.0 : double(inter) / double(uni);
    out.precision = na == 0 ? 1.0 : double(inter) / double(na);
    out.recall = nb == 0 ? 1.0 : double(inter) / double(nb);
    out.l2_flow = inter == 0 ? 0.0 : flow_acc / double(inter);
    return out;
}

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v)
            j[key] = *v;
        else
            j[key] = nullptr;
    };
    put("pos_err_mm", pos_err_mm);
    put("loc_err_mm", loc_err_mm);
    put("messiness_mm", messiness_mm);
    put("jitter_mm_s3", jitter_mm_s3);
    put("penetration_permille", penetration_permille);
    put("iou", iou);
    put("precision", precision);
    put("recall", recall);
    put("l2_flow_mm", l2_flow_mm);
    return j.dump(2);
}

std::string MetricsReport::to_text() const {
    std::ostringstream os;
    os.precision(12);
    auto put = [&](const char* key, const std::optional<double>& v) {
        os << key << " = ";
        if (v)
            os << *v;
        else
            os << "n/a";
        os << "\n";
    };
    put("pos_err_mm", pos_err_mm);
    put("loc_err_mm", loc_err_mm);
    put("messiness_mm", messiness_mm);
    put("jitter_mm_s3", jitter_mm_s3);
    put("penetration_permille", penetration_permille);
    put("iou", iou);
    put("precision", precision);
    put("recall", recall);
    put("l2_flow_mm", l2_flow_mm);
    return os.str();
}

}  // namespace groom
