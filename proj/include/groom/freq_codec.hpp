#pragma once

#include "groom/strand.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace groom {

// Segmented one-sided DFT layout for a strand's gradient sequence. With the
// default 100-point strands the gradients split into 3 segments of k = 33
// samples, giving f = 17 one-sided bands and 3 * 17 * 3 * 3 = 459 scalars.
struct CodecConfig {
    int n_s = 100;  // points per strand
    int n_g = 3;    // segments
    int k = 33;     // samples per segment, (n_s - 1) / n_g
    int f = 17;     // one-sided band count, floor(k / 2) + 1

    CodecConfig() = default;
    CodecConfig(int points, int segments);  // throws unless segments divide n_s - 1

    // spectra are stored per (segment, axis); each holds f bands
    int spectra() const { return n_g * 3; }
    int bands() const { return spectra() * f; }
    int dimension() const { return bands() * 3; }

    bool operator==(const CodecConfig&) const = default;
};

// Frequency code of one strand: per (segment, axis, band) an amplitude and a
// unit phase vector (cos, sin). Flat index: (seg * 3 + axis) * f + band.
struct FrequencyCode {
    CodecConfig cfg;
    std::vector<double> amp;
    std::vector<double> cos_phase;
    std::vector<double> sin_phase;

    FrequencyCode() = default;
    explicit FrequencyCode(const CodecConfig& c)
        : cfg(c),
          amp(c.bands(), 0.0),
          cos_phase(c.bands(), 1.0),
          sin_phase(c.bands(), 0.0) {}

    int band_index(int seg, int axis, int band) const {
        return (seg * 3 + axis) * cfg.f + band;
    }
    int dimension() const { return cfg.dimension(); }
    bool valid(double phase_tol = 1e-6) const;

    // Flat layout for the latent codecs: all amplitudes, then all cos, then
    // all sin entries.
    Eigen::VectorXd to_vector() const;
    static FrequencyCode from_vector(const Eigen::VectorXd& v, const CodecConfig& cfg);
};

FrequencyCode encode(const GradientStrand& g, const CodecConfig& cfg);
Strand decode(const FrequencyCode& c, const Vec3& root);

// Zero out bands >= f_l (amplitude 0, phase reset to (1, 0)).
FrequencyCode truncate_low_freq(const FrequencyCode& c, int f_l);

// Blend amplitudes and phase vectors independently; degenerate phase sums
// fall back to (1, 0).
FrequencyCode interp_frequency(const FrequencyCode& a, const FrequencyCode& b, double t);

// Log-normal amplitude scaling and Gaussian phase rotation on every band
// above DC. The DC band is left untouched so noise changes texture rather
// than gross direction or length.
FrequencyCode perturb(const FrequencyCode& c, double sigma_amp, double sigma_phase,
                      std::uint64_t seed);

struct CodeDistance {
    double amp_l1 = 0.0;
    double phase_weighted = 0.0;
};

// L1 amplitude distance plus the amplitude-weighted phase distance, with the
// weights normalized per (segment, axis) spectrum of the ground-truth code.
CodeDistance phase_weighted_distance(const FrequencyCode& a, const FrequencyCode& b_truth);

}  // namespace groom
