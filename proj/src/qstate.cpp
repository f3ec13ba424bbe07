#include "pathcert/qstate.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <json.hpp>

namespace pathcert::qstate {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_dim(int d) {
    if (d < 2) throw ValidationError("invalid-dimension: need d >= 2, got " + std::to_string(d));
}

}  // namespace

void PureState::validate() const {
    check_dim(dim_a);
    check_dim(dim_b);
    if (amplitudes.size() != static_cast<Eigen::Index>(dim_a) * dim_b)
        throw ValidationError("invalid-dimension: amplitude vector size does not match dim_a*dim_b");
    if (std::abs(amplitudes.norm() - 1.0) > 1e-12)
        throw ValidationError("degenerate-input: pure state norm deviates from 1 beyond 1e-12");
}

void BipartiteDensityMatrix::validate() const {
    check_dim(dim_a);
    check_dim(dim_b);
    const Eigen::Index n = joint_dim();
    if (entries.rows() != n || entries.cols() != n)
        throw ValidationError("invalid-dimension: density matrix size does not match dim_a*dim_b");
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw ValidationError("degenerate-input: density matrix is not Hermitian within 1e-10");
    if (std::abs(entries.trace().real() - 1.0) > 1e-10 || std::abs(entries.trace().imag()) > 1e-10)
        throw ValidationError("degenerate-input: density matrix trace deviates from 1 beyond 1e-10");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10)
        throw ValidationError("degenerate-input: density matrix has an eigenvalue below -1e-10");
}

void Basis::validate() const {
    check_dim(dim);
    if (vectors.rows() != dim || vectors.cols() != dim)
        throw ValidationError("invalid-dimension: basis must hold d vectors of length d");
    const Eigen::MatrixXcd gram = vectors.conjugate() * vectors.transpose();
    if ((gram - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-12)
        throw ValidationError("degenerate-input: basis vectors are not orthonormal within 1e-12");
}

PureState max_entangled(int d) {
    check_dim(d);
    PureState psi;
    psi.dim_a = d;
    psi.dim_b = d;
    psi.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d) * d);
    const double a = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i) psi.amplitudes(static_cast<Eigen::Index>(i) * d + i) = a;
    return psi;
}

PureState weighted_entangled(const Eigen::VectorXcd& amplitudes) {
    const int d = static_cast<int>(amplitudes.size());
    check_dim(d);
    const double norm = amplitudes.norm();
    if (norm < 1e-300) throw ValidationError("degenerate-input: weighted_entangled needs a nonzero amplitude vector");
    PureState psi;
    psi.dim_a = d;
    psi.dim_b = d;
    psi.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d) * d);
    for (int i = 0; i < d; ++i) psi.amplitudes(static_cast<Eigen::Index>(i) * d + i) = amplitudes(i) / norm;
    return psi;
}

BipartiteDensityMatrix density_matrix(const PureState& psi) {
    psi.validate();
    BipartiteDensityMatrix rho;
    rho.dim_a = psi.dim_a;
    rho.dim_b = psi.dim_b;
    rho.entries = psi.amplitudes * psi.amplitudes.adjoint();
    return rho;
}

BipartiteDensityMatrix apply_white_noise(const BipartiteDensityMatrix& rho, double p) {
    if (p < 0.0 || p > 1.0) throw ValidationError("invalid-parameter: white-noise weight p must lie in [0,1]");
    const Eigen::Index n = rho.joint_dim();
    BipartiteDensityMatrix out = rho;
    out.entries = p * rho.entries
                + ((1.0 - p) / static_cast<double>(n)) * Eigen::MatrixXcd::Identity(n, n);
    return out;
}

BipartiteDensityMatrix apply_crosstalk(const BipartiteDensityMatrix& rho, double eps) {
    if (eps < 0.0) throw ValidationError("invalid-parameter: crosstalk level must be nonnegative");
    BipartiteDensityMatrix out = rho;
    for (int a = 0; a < rho.dim_a; ++a)
        for (int b = 0; b < rho.dim_b; ++b) {
            if (a == b) continue;
            const Eigen::Index k = static_cast<Eigen::Index>(a) * rho.dim_b + b;
            out.entries(k, k) += eps;
        }
    out.entries /= out.entries.trace().real();
    return out;
}

BipartiteDensityMatrix apply_dephasing(const BipartiteDensityMatrix& rho, double sigma) {
    if (sigma < 0.0) throw ValidationError("invalid-parameter: dephasing width must be nonnegative");
    const double g = std::exp(-0.5 * sigma * sigma);
    BipartiteDensityMatrix out = rho;
    for (int a = 0; a < rho.dim_a; ++a)
        for (int b = 0; b < rho.dim_b; ++b)
            for (int c = 0; c < rho.dim_a; ++c)
                for (int e = 0; e < rho.dim_b; ++e) {
                    double f = 1.0;
                    if (a != c) f *= g;
                    if (b != e) f *= g;
                    if (f != 1.0)
                        out.entries(static_cast<Eigen::Index>(a) * rho.dim_b + b,
                                    static_cast<Eigen::Index>(c) * rho.dim_b + e) *= f;
                }
    return out;
}

Cx matrix_element(const BipartiteDensityMatrix& rho, int row_a, int row_b, int col_a, int col_b) {
    if (row_a < 0 || row_a >= rho.dim_a || col_a < 0 || col_a >= rho.dim_a ||
        row_b < 0 || row_b >= rho.dim_b || col_b < 0 || col_b >= rho.dim_b)
        throw ValidationError("invalid-index: matrix_element index out of range");
    return rho.entries(static_cast<Eigen::Index>(row_a) * rho.dim_b + row_b,
                       static_cast<Eigen::Index>(col_a) * rho.dim_b + col_b);
}

double fidelity_to_max_entangled(const BipartiteDensityMatrix& rho) {
    if (rho.dim_a != rho.dim_b)
        throw ValidationError("invalid-dimension: fidelity to |Phi+> needs equal arm dimensions");
    const int d = rho.dim_a;
    Cx acc = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            acc += rho.entries(static_cast<Eigen::Index>(i) * d + i, static_cast<Eigen::Index>(j) * d + j);
    return acc.real() / d;
}

Basis fourier_basis(int d) {
    check_dim(d);
    Basis basis;
    basis.dim = d;
    basis.vectors.resize(d, d);
    const double a = 1.0 / std::sqrt(static_cast<double>(d));
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) {
            const double phase = 2.0 * kPi * static_cast<double>(k) * static_cast<double>(j) / d;
            basis.vectors(k, j) = a * Cx(std::cos(phase), std::sin(phase));
        }
    return basis;
}

Basis computational_basis(int d) {
    check_dim(d);
    Basis basis;
    basis.dim = d;
    basis.vectors = Eigen::MatrixXcd::Identity(d, d);
    return basis;
}

Basis product_mub_basis(int n) {
    if (n < 1 || n > 20) throw ValidationError("invalid-dimension: product MUB needs 1 <= n <= 20 qubits");
    const int d = 1 << n;
    Basis basis;
    basis.dim = d;
    basis.vectors.resize(d, d);
    const double a = 1.0 / std::sqrt(static_cast<double>(d));
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) {
            const int parity = __builtin_popcount(static_cast<unsigned>(k & j)) & 1;
            basis.vectors(k, j) = parity ? -a : a;
        }
    return basis;
}

double unbiasedness(const Basis& b1, const Basis& b2) {
    if (b1.dim != b2.dim) throw ValidationError("invalid-dimension: unbiasedness needs equal dimensions");
    const double target = 1.0 / b1.dim;
    double worst = 0.0;
    for (int j = 0; j < b1.dim; ++j)
        for (int k = 0; k < b2.dim; ++k) {
            const Cx ov = b1.vectors.row(j).dot(b2.vectors.row(k));
            worst = std::max(worst, std::abs(std::norm(ov) - target));
        }
    return worst;
}

double entanglement_entropy_pure(const PureState& psi) {
    psi.validate();
    Eigen::MatrixXcd m(psi.dim_a, psi.dim_b);
    for (int a = 0; a < psi.dim_a; ++a)
        for (int b = 0; b < psi.dim_b; ++b)
            m(a, b) = psi.amplitudes(static_cast<Eigen::Index>(a) * psi.dim_b + b);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    double h = 0.0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
        const double p = svd.singularValues()(k) * svd.singularValues()(k);
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

void StateSpec::validate() const {
    check_dim(dim);
    if (amplitudes && static_cast<int>(amplitudes->size()) != dim)
        throw ValidationError("invalid-dimension: amplitude list length must equal dim");
    for (const auto& n : noise) {
        if (n.kind == "white") {
            if (n.value < 0.0 || n.value > 1.0) throw ValidationError("invalid-parameter: white noise weight outside [0,1]");
        } else if (n.kind == "dephase" || n.kind == "crosstalk") {
            if (n.value < 0.0) throw ValidationError("invalid-parameter: " + n.kind + " level must be nonnegative");
        } else {
            throw ValidationError("invalid-parameter: unknown noise kind '" + n.kind + "'");
        }
    }
}

BipartiteDensityMatrix synthesize(const StateSpec& spec) {
    spec.validate();
    PureState psi;
    if (spec.amplitudes) {
        Eigen::VectorXcd a(spec.dim);
        for (int i = 0; i < spec.dim; ++i) a(i) = (*spec.amplitudes)[i];
        psi = weighted_entangled(a);
    } else {
        psi = max_entangled(spec.dim);
    }
    BipartiteDensityMatrix rho = density_matrix(psi);
    for (const auto& n : spec.noise) {
        if (n.kind == "white") rho = apply_white_noise(rho, n.value);
        else if (n.kind == "dephase") rho = apply_dephasing(rho, n.value);
        else rho = apply_crosstalk(rho, n.value);
    }
    return rho;
}

namespace {

using nlohmann::ordered_json;

ordered_json amplitude_to_json(const Cx& a) {
    if (a.imag() == 0.0) return ordered_json(a.real());
    return ordered_json::array({a.real(), a.imag()});
}

Cx amplitude_from_json(const ordered_json& j) {
    if (j.is_number()) return Cx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Cx(j[0].get<double>(), j[1].get<double>());
    throw ValidationError("invalid-parameter: amplitude must be a number or [re, im]");
}

}  // namespace

StateSpec state_spec_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid-config: ") + e.what());
    }
    StateSpec spec;
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw ValidationError("invalid-config: state spec needs an integer 'dim'");
    spec.dim = j["dim"].get<int>();
    if (j.contains("amplitudes")) {
        std::vector<Cx> amps;
        for (const auto& item : j["amplitudes"]) amps.push_back(amplitude_from_json(item));
        spec.amplitudes = std::move(amps);
    }
    if (j.contains("noise")) {
        for (const auto& item : j["noise"]) {
            NoiseSpec n;
            n.kind = item.at("kind").get<std::string>();
            if (item.contains("p")) n.value = item["p"].get<double>();
            else if (item.contains("sigma")) n.value = item["sigma"].get<double>();
            else if (item.contains("epsilon")) n.value = item["epsilon"].get<double>();
            else throw ValidationError("invalid-config: noise entry needs p, sigma, or epsilon");
            spec.noise.push_back(n);
        }
    }
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    spec.validate();
    return spec;
}

std::string state_spec_to_json_text(const StateSpec& spec) {
    ordered_json j;
    j["dim"] = spec.dim;
    if (spec.amplitudes) {
        ordered_json arr = ordered_json::array();
        for (const auto& a : *spec.amplitudes) arr.push_back(amplitude_to_json(a));
        j["amplitudes"] = arr;
    }
    ordered_json noise = ordered_json::array();
    for (const auto& n : spec.noise) {
        ordered_json item;
        item["kind"] = n.kind;
        if (n.kind == "white") item["p"] = n.value;
        else if (n.kind == "dephase") item["sigma"] = n.value;
        else item["epsilon"] = n.value;
        noise.push_back(item);
    }
    j["noise"] = noise;
    j["seed"] = spec.seed;
    return j.dump(2) + "\n";
}

}
