#include "groom/strand.hpp"

#include <cmath>
#include <stdexcept>

namespace groom {

bool Strand::valid() const {
    if (points.size() < 2) return false;
    for (const Vec3& p : points)
        if (!p.allFinite()) return false;
    return true;
}

double Strand::arc_length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        len += (points[i] - points[i - 1]).norm();
    return len;
}

bool Groom::valid() const {
    if (!texel_ids.empty() && texel_ids.size() != strands.size()) return false;
    for (const Strand& s : strands)
        if (s.size() != n_s || !s.valid()) return false;
    return true;
}

GradientStrand to_gradients(const Strand& s) {
    if (s.size() < 2) throw std::invalid_argument("to_gradients: strand needs at least 2 points");
    GradientStrand g;
    g.root = s.points.front();
    g.gradients.resize(s.points.size() - 1);
    for (std::size_t i = 0; i + 1 < s.points.size(); ++i)
        g.gradients[i] = s.points[i + 1] - s.points[i];
    return g;
}

Strand from_gradients(const GradientStrand& g) {
    Strand s;
    s.points.resize(g.gradients.size() + 1);
    s.points[0] = g.root;
    for (std::size_t i = 0; i < g.gradients.size(); ++i)
        s.points[i + 1] = s.points[i] + g.gradients[i];
    return s;
}

Strand interp_euclidean(const Strand& a, const Strand& b, double t) {
    if (a.size() != b.size())
        throw std::invalid_argument("interp_euclidean: point-count mismatch");
    Strand out;
    out.points.resize(a.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
        out.points[i] = (1.0 - t) * a.points[i] + t * b.points[i];
    return out;
}

Strand resample_uniform(const Strand& s, int n) {
    if (n < 2) throw std::invalid_argument("resample_uniform: need at least 2 points");
    if (s.points.empty()) throw std::invalid_argument("resample_uniform: empty strand");

    const double total = s.arc_length();
    Strand out;
    out.points.resize(n);
    if (total <= 0.0 || s.points.size() < 2) {
        for (int i = 0; i < n; ++i) out.points[i] = s.points.front();
        return out;
    }

    // cumulative arc length per source vertex
    std::vector<double> cum(s.points.size(), 0.0);
    for (std::size_t i = 1; i < s.points.size(); ++i)
        cum[i] = cum[i - 1] + (s.points[i] - s.points[i - 1]).norm();

    std::size_t seg = 0;
    for (int i = 0; i < n; ++i) {
        double target = total * double(i) / double(n - 1);
        while (seg + 2 < s.points.size() && cum[seg + 1] < target) ++seg;
        double seg_len = cum[seg + 1] - cum[seg];
        double u = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
        u = std::clamp(u, 0.0, 1.0);
        out.points[i] = (1.0 - u) * s.points[seg] + u * s.points[seg + 1];
    }
    return out;
}

}  // namespace groom
