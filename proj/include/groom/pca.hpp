#pragma once

#include "groom/freq_codec.hpp"
#include "groom/scalp.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace groom {

// Linear latent codec: mean, orthonormal basis rows ordered by decreasing
// variance, per-component variances. Backs both the 64-dim strand latent and
// the 512-dim hairstyle latent.
struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd basis;      // components x input_dim
    Eigen::VectorXd variances;  // descending

    int components() const { return int(basis.rows()); }
    int input_dim() const { return int(basis.cols()); }

    Eigen::VectorXd encode(const Eigen::VectorXd& x) const;
    Eigen::VectorXd decode(const Eigen::VectorXd& l) const;

    // Covariance eigendecomposition when samples >= dim, Gram trick otherwise.
    // Component signs are fixed so the largest-magnitude entry is positive.
    static PcaModel fit(const Eigen::MatrixXd& data, int components);
};

// Strand latent codec on 459-dim frequency codes (default 64 components).
PcaModel fit_strand_pca(const std::vector<FrequencyCode>& codes, int components = 64);
Eigen::VectorXd encode_strand(const PcaModel& m, const FrequencyCode& c);
FrequencyCode decode_strand(const PcaModel& m, const Eigen::VectorXd& latent,
                            const CodecConfig& cfg);

// Hairstyle latent codec on flattened low-resolution latent maps
// (24 x 32 x 65 by default, 512 components).
PcaModel fit_hairstyle_pca(const std::vector<LatentMap>& maps, int components = 512);
Eigen::VectorXd encode_hairstyle(const PcaModel& m, const LatentMap& map);
LatentMap decode_hairstyle(const PcaModel& m, const Eigen::VectorXd& latent,
                           int height, int width, int latent_dim);

// Draw hairstyle latent coefficients from N(0, per-component variance) and
// decode; deterministic per seed.
LatentMap sample_hairstyle(const PcaModel& m, int height, int width, int latent_dim,
                           std::uint64_t seed);

Eigen::VectorXd interp_latent(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double t);

}  // namespace groom
