#include "groom/pca.hpp"

#include "groom/random.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace groom {

namespace {

// Largest-magnitude entry of every component made positive; stable across
// platforms so golden files do not flip sign.
void fix_component_signs(Eigen::MatrixXd& basis) {
    for (Eigen::Index r = 0; r < basis.rows(); ++r) {
        Eigen::Index arg = 0;
        double best = 0.0;
        for (Eigen::Index c = 0; c < basis.cols(); ++c) {
            double a = std::abs(basis(r, c));
            if (a > best) {
                best = a;
                arg = c;
            }
        }
        if (basis(r, arg) < 0.0) basis.row(r) = -basis.row(r);
    }
}

}  // namespace

Eigen::VectorXd PcaModel::encode(const Eigen::VectorXd& x) const {
    if (x.size() != mean.size())
        throw std::invalid_argument("PcaModel::encode: dimension mismatch");
    return basis * (x - mean);
}

Eigen::VectorXd PcaModel::decode(const Eigen::VectorXd& l) const {
    if (l.size() != basis.rows())
        throw std::invalid_argument("PcaModel::decode: latent dimension mismatch");
    return mean + basis.transpose() * l;
}

PcaModel PcaModel::fit(const Eigen::MatrixXd& data, int components) {
    const Eigen::Index n = data.rows();
    const Eigen::Index d = data.cols();
    if (components < 1) throw std::invalid_argument("PcaModel::fit: need at least 1 component");
    if (n < components)
        throw std::invalid_argument("PcaModel::fit: fewer samples than requested components");
    if (components > d)
        throw std::invalid_argument("PcaModel::fit: more components than input dimensions");

    PcaModel model;
    model.mean = data.colwise().mean();
    Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();

    model.basis.resize(components, d);
    model.variances.resize(components);

    if (n >= d) {
        Eigen::MatrixXd cov = (centered.adjoint() * centered) / double(n - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        if (eig.info() != Eigen::Success)
            throw std::runtime_error("PcaModel::fit: eigendecomposition failed");
        // eigenvalues come out ascending
        for (int i = 0; i < components; ++i) {
            Eigen::Index src = d - 1 - i;
            model.basis.row(i) = eig.eigenvectors().col(src).transpose();
            model.variances[i] = std::max(0.0, eig.eigenvalues()[src]);
        }
    } else {
        // Gram trick for wide data (hairstyle maps: dim ~50k, samples ~500)
        Eigen::MatrixXd gram = centered * centered.adjoint();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        if (eig.info() != Eigen::Success)
            throw std::runtime_error("PcaModel::fit: eigendecomposition failed");
        for (int i = 0; i < components; ++i) {
            Eigen::Index src = n - 1 - i;
            double lambda = eig.eigenvalues()[src];
            if (lambda <= 1e-12)
                throw std::runtime_error(
                    "PcaModel::fit: data rank too low for requested components");
            Eigen::VectorXd dir = centered.adjoint() * eig.eigenvectors().col(src);
            model.basis.row(i) = dir.transpose() / std::sqrt(lambda);
            model.variances[i] = lambda / double(n - 1);
        }
    }
    fix_component_signs(model.basis);
    return model;
}

PcaModel fit_strand_pca(const std::vector<FrequencyCode>& codes, int components) {
    if (codes.empty()) throw std::invalid_argument("fit_strand_pca: no samples");
    const CodecConfig cfg = codes.front().cfg;
    Eigen::MatrixXd data(Eigen::Index(codes.size()), cfg.dimension());
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (!(codes[i].cfg == cfg))
            throw std::invalid_argument("fit_strand_pca: mixed codec configs");
        data.row(Eigen::Index(i)) = codes[i].to_vector().transpose();
    }
    return PcaModel::fit(data, components);
}

Eigen::VectorXd encode_strand(const PcaModel& m, const FrequencyCode& c) {
    return m.encode(c.to_vector());
}

FrequencyCode decode_strand(const PcaModel& m, const Eigen::VectorXd& latent,
                            const CodecConfig& cfg) {
    // from_vector clamps amplitudes and renormalizes phases, repairing the
    // invariants a linear decode can leave broken
    return FrequencyCode::from_vector(m.decode(latent), cfg);
}

PcaModel fit_hairstyle_pca(const std::vector<LatentMap>& maps, int components) {
    if (maps.empty()) throw std::invalid_argument("fit_hairstyle_pca: no samples");
    const LatentMap& first = maps.front();
    Eigen::Index dim = Eigen::Index(std::size_t(first.texels()) * first.channels());
    Eigen::MatrixXd data(Eigen::Index(maps.size()), dim);
    for (std::size_t i = 0; i < maps.size(); ++i) {
        if (maps[i].height != first.height || maps[i].width != first.width ||
            maps[i].latent_dim != first.latent_dim)
            throw std::invalid_argument("fit_hairstyle_pca: mixed map shapes");
        data.row(Eigen::Index(i)) = maps[i].flatten().transpose();
    }
    return PcaModel::fit(data, components);
}

Eigen::VectorXd encode_hairstyle(const PcaModel& m, const LatentMap& map) {
    return m.encode(map.flatten());
}

LatentMap decode_hairstyle(const PcaModel& m, const Eigen::VectorXd& latent,
                           int height, int width, int latent_dim) {
    // from_flat clamps the baldness channel to [0, 1]
    return LatentMap::from_flat(m.decode(latent), height, width, latent_dim);
}

LatentMap sample_hairstyle(const PcaModel& m, int height, int width, int latent_dim,
                           std::uint64_t seed) {
    RandomStream rs(seed);
    Eigen::VectorXd coeffs(m.components());
    for (int i = 0; i < m.components(); ++i)
        coeffs[i] = rs.normal() * std::sqrt(std::max(0.0, m.variances[i]));
    return decode_hairstyle(m, coeffs, height, width, latent_dim);
}

Eigen::VectorXd interp_latent(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double t) {
    if (a.size() != b.size())
        throw std::invalid_argument("interp_latent: dimension mismatch");
    return (1.0 - t) * a + t * b;
}

}  // namespace groom
