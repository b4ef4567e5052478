#include "groom/freq_codec.hpp"

#include "groom/random.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace groom {

namespace {

struct DftTables {
    int k = 0;
    int f = 0;
    // cos_t[n * k + t] = cos(2 pi n t / k), likewise sin_t
    std::vector<double> cos_t;
    std::vector<double> sin_t;
};

const DftTables& dft_tables(int k) {
    static std::mutex mtx;
    static std::map<int, std::unique_ptr<DftTables>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(k);
    if (it == cache.end()) {
        auto tab = std::make_unique<DftTables>();
        tab->k = k;
        tab->f = k / 2 + 1;
        tab->cos_t.resize(std::size_t(tab->f) * k);
        tab->sin_t.resize(std::size_t(tab->f) * k);
        for (int n = 0; n < tab->f; ++n) {
            for (int t = 0; t < k; ++t) {
                double arg = 2.0 * std::numbers::pi * double(n) * double(t) / double(k);
                tab->cos_t[std::size_t(n) * k + t] = std::cos(arg);
                tab->sin_t[std::size_t(n) * k + t] = std::sin(arg);
            }
        }
        it = cache.emplace(k, std::move(tab)).first;
    }
    return *it->second;
}

// Unit phase from a complex value; zero modulus maps to (1, 0).
inline void amp_phase(double re, double im, double& a, double& c, double& s) {
    a = std::sqrt(re * re + im * im);
    if (a > 0.0) {
        c = re / a;
        s = im / a;
    } else {
        c = 1.0;
        s = 0.0;
    }
}

// Restore the unit-phase invariant without touching vectors that already
// satisfy it, so pass-through blends stay bit-identical.
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

}  // namespace

CodecConfig::CodecConfig(int points, int segments) : n_s(points), n_g(segments) {
    if (points < 2 || segments < 1)
        throw std::invalid_argument("CodecConfig: need at least 2 points and 1 segment");
    if ((points - 1) % segments != 0)
        throw std::invalid_argument("CodecConfig: segment count must divide the gradient count");
    k = (points - 1) / segments;
    f = k / 2 + 1;
}

bool FrequencyCode::valid(double phase_tol) const {
    const int n = cfg.bands();
    if (int(amp.size()) != n || int(cos_phase.size()) != n || int(sin_phase.size()) != n)
        return false;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(amp[i]) || amp[i] < 0.0) return false;
        double m2 = cos_phase[i] * cos_phase[i] + sin_phase[i] * sin_phase[i];
        if (!std::isfinite(m2) || std::abs(m2 - 1.0) > phase_tol) return false;
    }
    return true;
}

Eigen::VectorXd FrequencyCode::to_vector() const {
    const int n = cfg.bands();
    Eigen::VectorXd v(3 * n);
    for (int i = 0; i < n; ++i) {
        v[i] = amp[i];
        v[n + i] = cos_phase[i];
        v[2 * n + i] = sin_phase[i];
    }
    return v;
}

FrequencyCode FrequencyCode::from_vector(const Eigen::VectorXd& v, const CodecConfig& cfg) {
    const int n = cfg.bands();
    if (v.size() != 3 * n)
        throw std::invalid_argument("FrequencyCode::from_vector: dimension mismatch");
    FrequencyCode c(cfg);
    for (int i = 0; i < n; ++i) {
        c.amp[i] = std::max(0.0, v[i]);
        c.cos_phase[i] = v[n + i];
        c.sin_phase[i] = v[2 * n + i];
        renormalize_phase(c.cos_phase[i], c.sin_phase[i]);
    }
    return c;
}

FrequencyCode encode(const GradientStrand& g, const CodecConfig& cfg) {
    if (int(g.gradients.size()) != cfg.n_s - 1)
        throw std::invalid_argument("encode: gradient count does not match codec config");

    const DftTables& tab = dft_tables(cfg.k);
    FrequencyCode code(cfg);
    for (int seg = 0; seg < cfg.n_g; ++seg) {
        const Vec3* d = g.gradients.data() + std::size_t(seg) * cfg.k;
        for (int axis = 0; axis < 3; ++axis) {
            for (int n = 0; n < cfg.f; ++n) {
                const double* ct = tab.cos_t.data() + std::size_t(n) * cfg.k;
                const double* st = tab.sin_t.data() + std::size_t(n) * cfg.k;
                double re = 0.0, im = 0.0;
                for (int t = 0; t < cfg.k; ++t) {
                    double x = d[t][axis];
                    re += x * ct[t];
                    im -= x * st[t];
                }
                int idx = code.band_index(seg, axis, n);
                amp_phase(re, im, code.amp[idx], code.cos_phase[idx], code.sin_phase[idx]);
            }
        }
    }
    return code;
}

Strand decode(const FrequencyCode& c, const Vec3& root) {
    const CodecConfig& cfg = c.cfg;
    const DftTables& tab = dft_tables(cfg.k);

    GradientStrand g;
    g.root = root;
    g.gradients.assign(std::size_t(cfg.n_s - 1), Vec3::Zero());
    for (int seg = 0; seg < cfg.n_g; ++seg) {
        Vec3* d = g.gradients.data() + std::size_t(seg) * cfg.k;
        for (int axis = 0; axis < 3; ++axis) {
            for (int t = 0; t < cfg.k; ++t) {
                double acc = 0.0;
                for (int n = 0; n < cfg.f; ++n) {
                    int idx = c.band_index(seg, axis, n);
                    double cp = c.cos_phase[idx];
                    double sp = c.sin_phase[idx];
                    renormalize_phase(cp, sp);
                    double fre = c.amp[idx] * cp;
                    double fim = c.amp[idx] * sp;
                    // one-sided inverse: DC (and the Nyquist bin when k is
                    // even) enters once, every other band twice
                    double w = (n == 0 || (cfg.k % 2 == 0 && n == cfg.k / 2)) ? 1.0 : 2.0;
                    acc += w * (fre * tab.cos_t[std::size_t(n) * cfg.k + t] -
                                fim * tab.sin_t[std::size_t(n) * cfg.k + t]);
                }
                d[t][axis] = acc / double(cfg.k);
            }
        }
    }
    return from_gradients(g);
}

FrequencyCode truncate_low_freq(const FrequencyCode& c, int f_l) {
    if (f_l < 1 || f_l > c.cfg.f)
        throw std::invalid_argument("truncate_low_freq: cut-off out of range");
    FrequencyCode out = c;
    for (int sp = 0; sp < c.cfg.spectra(); ++sp) {
        for (int n = f_l; n < c.cfg.f; ++n) {
            int idx = sp * c.cfg.f + n;
            out.amp[idx] = 0.0;
            out.cos_phase[idx] = 1.0;
            out.sin_phase[idx] = 0.0;
        }
    }
    return out;
}

FrequencyCode interp_frequency(const FrequencyCode& a, const FrequencyCode& b, double t) {
    if (!(a.cfg == b.cfg))
        throw std::invalid_argument("interp_frequency: codec config mismatch");
    FrequencyCode out(a.cfg);
    const int n = a.cfg.bands();
    for (int i = 0; i < n; ++i) {
        out.amp[i] = (1.0 - t) * a.amp[i] + t * b.amp[i];
        out.cos_phase[i] = (1.0 - t) * a.cos_phase[i] + t * b.cos_phase[i];
        out.sin_phase[i] = (1.0 - t) * a.sin_phase[i] + t * b.sin_phase[i];
        renormalize_phase(out.cos_phase[i], out.sin_phase[i]);
    }
    return out;
}

FrequencyCode perturb(const FrequencyCode& c, double sigma_amp, double sigma_phase,
                      std::uint64_t seed) {
    if (sigma_amp < 0.0 || sigma_phase < 0.0)
        throw std::invalid_argument("perturb: sigmas must be non-negative");
    RandomStream rs(seed);
    FrequencyCode out = c;
    for (int sp = 0; sp < c.cfg.spectra(); ++sp) {
        for (int n = 1; n < c.cfg.f; ++n) {
            int idx = sp * c.cfg.f + n;
            double ga = rs.normal();
            double gp = rs.normal();
            out.amp[idx] = c.amp[idx] * std::exp(ga * sigma_amp);
            double alpha = gp * sigma_phase;
            double ca = std::cos(alpha), sa = std::sin(alpha);
            double cp = c.cos_phase[idx], sp2 = c.sin_phase[idx];
            out.cos_phase[idx] = cp * ca - sp2 * sa;
            out.sin_phase[idx] = sp2 * ca + cp * sa;
        }
    }
    return out;
}

CodeDistance phase_weighted_distance(const FrequencyCode& a, const FrequencyCode& b_truth) {
    if (!(a.cfg == b_truth.cfg))
        throw std::invalid_argument("phase_weighted_distance: codec config mismatch");
    CodeDistance d;
    const CodecConfig& cfg = a.cfg;
    for (int sp = 0; sp < cfg.spectra(); ++sp) {
        double total_amp = 0.0;
        for (int n = 0; n < cfg.f; ++n) total_amp += b_truth.amp[sp * cfg.f + n];
        for (int n = 0; n < cfg.f; ++n) {
            int idx = sp * cfg.f + n;
            d.amp_l1 += std::abs(a.amp[idx] - b_truth.amp[idx]);
            double w = total_amp > 0.0 ? b_truth.amp[idx] / total_amp : 1.0 / double(cfg.f);
            d.phase_weighted += w * (std::abs(a.sin_phase[idx] - b_truth.sin_phase[idx]) +
                                     std::abs(a.cos_phase[idx] - b_truth.cos_phase[idx]));
        }
    }
    return d;
}

}  // namespace groom
