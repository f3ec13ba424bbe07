#pragma once

// Coincidence-counting campaigns: measurement plans, Born probabilities,
// Poisson count simulation, the counts CSV interchange format, and the
// subspace estimators that reconstruct density-matrix elements from counts.
//
// Conventions. A projective setting is a product projector |v_a>|v_b>.
// Per arm it is one of
//   Z i      : |i>
//   X s  i,j : (|i> + s |j>)/sqrt2,    s in {+1,-1}
//   Y s  i,j : (|i> + s i |j>)/sqrt2
// The "+" Y outcome uses +i. With that labeling the empirical correlator
// sum_{s,t} s*t*C(s,t)/C_T estimates the standard-convention Pauli
// correlator on the (i,j) subspace, giving
//   Re<ii|rho|jj> =  ( <XX> - <YY> ) / 4
//   Im<ii|rho|jj> = -( <XY> + <YX> ) / 4   (needs the mixed-kind settings).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pathcert/elements.hpp"
#include "pathcert/errors.hpp"
#include "pathcert/qstate.hpp"

namespace pathcert::measure {

using qstate::Cx;

/// Cross-population bound used by the normalization of arm-diagonal-only
/// campaigns when the analyst supplies it; see EstimatorOptions.
inline constexpr double kReferenceCrossPopulation = 4.49e-5;

enum class BasisKind { Z, X, Y };

enum class PauliKind { X, Y };

struct ArmSetting {
    BasisKind basis = BasisKind::Z;
    int i = 0;
    int j = 0;       // == i for Z settings
    int sign = +1;   // +1 or -1; +1 for Z

    Eigen::VectorXcd vector(int d) const;
    std::string str() const;
};

struct SettingDescriptor {
    ArmSetting a;
    ArmSetting b;

    std::string label() const { return a.str() + "|" + b.str(); }
};

struct ProjectiveSetting {
    SettingDescriptor desc;
    Eigen::VectorXcd vec_a;
    Eigen::VectorXcd vec_b;
};

struct SubspaceObservable {
    int i = 0;
    int j = 0;
    PauliKind arm_a = PauliKind::X;
    PauliKind arm_b = PauliKind::X;
};

struct PlanOptions {
    bool diagonal_grid = false;  // measure all d*d path pairs instead of the d same-index ones
    bool include_imag = false;   // add the 8 mixed-kind settings per pair (XY, YX)
};

struct ExperimentPlan {
    int dim = 0;
    std::vector<ProjectiveSetting> settings;
};

/// Default plan: d same-index diagonal settings plus, per pair i<j, the 8
/// product settings X(s)X(t) and Y(s)Y(t) — d + 8*C(d,2) settings total.
/// Options add the full diagonal grid and/or the mixed-kind settings.
ExperimentPlan plan_full(int d, const PlanOptions& opts = {});

/// real(<v_a v_b| rho |v_a v_b>), clamped into [0,1].
double born_probability(const qstate::BipartiteDensityMatrix& rho, const ProjectiveSetting& setting);

struct CountsRecord {
    SettingDescriptor desc;
    std::uint64_t counts = 0;
    double duration_s = 0.0;
    std::optional<double> expected_rate_hz;  // simulation-side only, not serialized

    double rate() const { return static_cast<double>(counts) / duration_s; }
};

struct SimOptions {
    double rate_hz = 4000.0;     // source pair rate
    double efficiency = 0.16;    // joint detection efficiency
    double duration_s = 10.0;    // per setting
    std::uint64_t seed = 1;
    bool exact = false;          // infinite statistics: counts = round(p * 1e15)
};

/// One counts record per plan setting. Poisson draws use counter-keyed
/// streams (seed, setting index) so output is byte-stable and independent of
/// evaluation order. Exact mode scales Born probabilities to huge integer
/// counts, preserving the integer CSV schema at ~1e-13 relative quantization.
std::vector<CountsRecord> simulate_counts(const qstate::BipartiteDensityMatrix& rho,
                                          const ExperimentPlan& plan, const SimOptions& opts);

/// Accidental coincidence rate singles_a * singles_b * window.
double accidental_rate(double singles_a_hz, double singles_b_hz, double window_s);

/// Counts CSV: header
/// label,i_a,j_a,basis_a,sign_a,i_b,j_b,basis_b,sign_b,counts,duration_s
void write_counts_csv(const std::string& path, const std::vector<CountsRecord>& records);
std::vector<CountsRecord> read_counts_csv(const std::string& path);

struct EstimatorOptions {
    // Cross-population value assumed for the d*(d-1) unmeasured path pairs
    // when only same-index diagonal settings exist; C_T is then
    // sum_i C(ii) / (1 - (d^2-d)*assumed_cross). Ignored when the full grid
    // was measured. 0 means "assume no crosstalk".
    double assumed_cross = 0.0;
};

/// Indexes a record set once and exposes the estimators. Throws
/// IncompleteDataError when required settings are missing and
/// ValidationError on duplicates or bad indices.
class CountsDataset {
public:
    CountsDataset(std::vector<CountsRecord> records, int d, const EstimatorOptions& opts = {});

    int dim() const { return d_; }
    bool has_diagonal_grid() const { return grid_; }
    /// Total-rate normalization C_T (in rate units).
    double total_norm() const { return c_t_; }

    elements::DiagonalData diagonals() const;
    /// Empirical correlator on the (i,j) subspace for the given arm kinds.
    double correlator(int i, int j, PauliKind arm_a, PauliKind arm_b) const;
    struct OffDiagEstimate {
        double re = 0.0;
        std::optional<double> im;
    };
    OffDiagEstimate offdiag(int i, int j) const;
    /// True when all four sign combinations for the given arm kinds exist.
    bool has_correlator(int i, int j, PauliKind arm_a, PauliKind arm_b) const;
    elements::OffDiagonalData offdiag_all() const;
    /// Fringe visibility (<XX> - <YY>) / (2*(p_ii + p_jj)).
    double visibility(int i, int j) const;

    const std::vector<CountsRecord>& records() const { return records_; }

private:
    double diag_rate(int i, int j) const;
    const CountsRecord* find(const SettingDescriptor& desc) const;

    std::vector<CountsRecord> records_;
    int d_ = 0;
    EstimatorOptions opts_;
    bool grid_ = false;
    double c_t_ = 0.0;
    std::vector<int> index_;  // lookup table keyed by encoded descriptor
};

/// Free-function forms of the estimators (each indexes the records once).
elements::DiagonalData estimate_diagonals(const std::vector<CountsRecord>& records, int d,
                                          const EstimatorOptions& opts = {});
double estimate_correlator(const std::vector<CountsRecord>& records, int d, int i, int j,
                           PauliKind arm_a, PauliKind arm_b, const EstimatorOptions& opts = {});
CountsDataset::OffDiagEstimate estimate_offdiag(const std::vector<CountsRecord>& records, int d,
                                                int i, int j, const EstimatorOptions& opts = {});
double visibility(const std::vector<CountsRecord>& records, int d, int i, int j,
                  const EstimatorOptions& opts = {});

}
