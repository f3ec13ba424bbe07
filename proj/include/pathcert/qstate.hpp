#pragma once

// Bipartite qudit states for path-encoded photon pairs, the noise channels
// used to model realistic sources, and the measurement bases derived from
// them. Dimensions are per arm; the joint space has dimension dim_a * dim_b
// and joint kets are indexed row-major as a*dim_b + b.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pathcert/errors.hpp"

namespace pathcert::qstate {

using Cx = std::complex<double>;

struct PureState {
    int dim_a = 0;
    int dim_b = 0;
    Eigen::VectorXcd amplitudes;  // size dim_a * dim_b, unit norm

    // Throws ValidationError unless sizes match and the norm is 1 within 1e-12.
    void validate() const;
};

struct BipartiteDensityMatrix {
    int dim_a = 0;
    int dim_b = 0;
    Eigen::MatrixXcd entries;  // (dim_a*dim_b) square, Hermitian, trace 1, PSD

    int joint_dim() const { return dim_a * dim_b; }
    // Throws ValidationError unless Hermitian, unit trace and PSD within 1e-10.
    void validate() const;
};

struct Basis {
    int dim = 0;
    Eigen::MatrixXcd vectors;  // rows are basis vectors

    Eigen::VectorXcd vector(int k) const { return vectors.row(k).transpose(); }
    // Throws ValidationError unless rows are pairwise orthonormal within 1e-12.
    void validate() const;
};

/// |Phi+> = (1/sqrt d) sum_i |ii>.
PureState max_entangled(int d);

/// sum_i a_i |ii> normalized; throws on an all-zero amplitude vector.
PureState weighted_entangled(const Eigen::VectorXcd& amplitudes);

/// Rank-one density matrix |psi><psi|.
BipartiteDensityMatrix density_matrix(const PureState& psi);

/// rho -> p*rho + (1-p)/D * I with D the joint dimension; p in [0,1].
BipartiteDensityMatrix apply_white_noise(const BipartiteDensityMatrix& rho, double p);

/// Adds eps to every cross population <ij|rho|ij>, i != j, then renormalizes.
BipartiteDensityMatrix apply_crosstalk(const BipartiteDensityMatrix& rho, double eps);

/// Gaussian-phase-average channel: element <ab|rho|cd> is damped by
/// exp(-sigma^2/2) per arm whose index differs (a!=c, b!=d), so the pair
/// coherences <ii|rho|jj> get exp(-sigma^2) and populations are untouched.
BipartiteDensityMatrix apply_dephasing(const BipartiteDensityMatrix& rho, double sigma);

/// <row_a row_b| rho |col_a col_b>; throws on out-of-range indices.
Cx matrix_element(const BipartiteDensityMatrix& rho, int row_a, int row_b, int col_a, int col_b);

/// Fidelity to |Phi+>: (1/d) sum_{ij} <ii|rho|jj>. Requires dim_a == dim_b.
double fidelity_to_max_entangled(const BipartiteDensityMatrix& rho);

/// Fourier basis: |L_k>[j] = exp(i 2 pi k j / d) / sqrt d.
Basis fourier_basis(int d);

/// Computational basis of dimension d.
Basis computational_basis(int d);

/// n-fold tensor of (|0> +- |1>)/sqrt2 with binary index encoding
/// (most significant bit first): vector k entry j = (-1)^popcount(k&j)/sqrt d.
Basis product_mub_basis(int n);

/// max_{j,k} | |<b1_j|b2_k>|^2 - 1/d |. Throws on dimension mismatch.
double unbiasedness(const Basis& b1, const Basis& b2);

/// Base-2 Shannon entropy of the squared Schmidt coefficients.
double entanglement_entropy_pure(const PureState& psi);

// --- state/noise configuration -------------------------------------------

struct NoiseSpec {
    std::string kind;  // "white" | "dephase" | "crosstalk"
    double value = 0.0;
};

struct StateSpec {
    int dim = 0;                                       // per-arm dimension
    std::optional<std::vector<Cx>> amplitudes;         // default: maximally entangled
    std::vector<NoiseSpec> noise;                      // applied in order
    std::uint64_t seed = 0;

    void validate() const;
};

/// Builds the density matrix described by a StateSpec.
BipartiteDensityMatrix synthesize(const StateSpec& spec);

StateSpec state_spec_from_json_text(const std::string& text);
std::string state_spec_to_json_text(const StateSpec& spec);

}
