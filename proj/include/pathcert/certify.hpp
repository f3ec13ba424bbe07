#pragma once

// Entanglement certification from reconstructed density-matrix elements:
// fidelity to the maximally entangled target, Schmidt-number witness,
// noise thresholds, entropic bounds combining into an entanglement-of-
// formation lower bound, bootstrap error bars, and the per-dimension
// nested analysis that re-certifies restricted d x d blocks of the data.

#include <cstdint>
#include <string>
#include <vector>

#include "pathcert/elements.hpp"
#include "pathcert/measure.hpp"

namespace pathcert::certify {

/// F = (1/d) * (sum_i p_ii + 2 * sum_{i<j} Re<ii|rho|jj>). Imaginary parts
/// cancel by Hermiticity and are not consumed.
double fidelity_from_elements(const elements::DiagonalData& diag,
                              const elements::OffDiagonalData& offdiag);

/// Largest k such that F strictly exceeds the rank-(k-1) ceiling (k-1)/d,
/// i.e. the certified lower bound on the Schmidt number. Exact boundaries
/// F = k/d certify only k (strict exceedance is required for k+1). Result
/// clamped to [1, d].
int schmidt_number_bound(double fidelity, int d);

/// Fidelity at or below which separable states can no longer be excluded.
double separability_threshold(int d);  // = 1/d

/// White-noise weight p at which the isotropic state's fidelity crosses the
/// separability threshold: F(p) = p + (1-p)/d^2 = 1/d at p = 1/(d+1).
double white_noise_threshold(int d);  // = 1/(d+1)

/// Binary Shannon entropy H2(x) in bits, with 0*log 0 := 0.
double binary_entropy(double x);

// Entropic quantities (bits). Conventions: base-2 logs, 0*log 0 := 0,
// compensated (Kahan) summation for the vector sums.

/// Lower bound on the computational-outcome entropy: Shannon entropy of the
/// same-index populations with the unobserved mass 1-N added to the largest.
double h_down_comp(const elements::DiagonalData& diag);

/// Upper bound on the joint computational-outcome entropy:
/// -sum_i p_i log2 p_i - (1-N) log2((1-N)/(d^2-d)).
double h_up_comp(const elements::DiagonalData& diag);

/// Lower bound on the superposition-basis outcome entropy from the fidelity:
/// H2(x) + x log2(d-1) with x = (d-1)F/d.
double h_down_mub(double fidelity, int d);

/// Upper bound on the joint superposition-basis entropy from the fidelity:
/// -F log2(F/d) - (1-F) log2((1-F)/(d^2-d)). Requires F >= 1/d
/// (equivalently F/d >= (1-F)/(d^2-d)); below that the construction's
/// assumption fails and a ValidationError is thrown.
double h_up_mub(double fidelity, int d);

/// Combine the four entropic terms into the certified bound:
/// E >= -h_up_mm - h_up_mub + h_down_m + h_down_mub + log2 d.
double eof_combination(double h_down_m, double h_up_mm, double h_down_mub_v,
                       double h_up_mub_v, int d);

/// Entanglement-of-formation lower bound in e-bits, assembled from the
/// diagonal data and the fidelity. May be negative (vacuous); reported as-is.
double eof_bound(const elements::DiagonalData& diag, double fidelity, int d);

/// One certified row of the per-dimension report.
struct CertRow {
    int d = 0;
    double fidelity = 0.0;
    double fidelity_std = 0.0;
    int schmidt = 1;
    double eof = 0.0;
    double eof_std = 0.0;
    double h_down_m = 0.0;
    double h_up_mm = 0.0;
    double h_down_mub = 0.0;
    double h_up_mub = 0.0;
};

struct CertReport {
    std::vector<CertRow> rows;
    std::uint64_t seed = 0;
    int n_resamples = 0;
    double crosstalk_assumed = 0.0;
};

struct AnalysisOptions {
    measure::EstimatorOptions estimator;
    /// 0 disables bootstrap (stds reported as 0); otherwise must be >= 100.
    int n_resamples = 100;
    std::uint64_t seed = 1;
};

/// Keep only records whose path indices all lie below d (the restricted
/// d x d block of the campaign).
std::vector<measure::CountsRecord> restrict_records(const std::vector<measure::CountsRecord>& records,
                                                    int d);

/// Certify a single dimension from (restricted) records; no error bars.
CertRow analyze_dimension(const std::vector<measure::CountsRecord>& records, int d,
                          const measure::EstimatorOptions& est);

struct BootstrapStd {
    double fidelity_std = 0.0;
    double eof_std = 0.0;
};

/// Poisson-resample every record (lambda = observed count), rerun the
/// fidelity/EoF analysis per resample, and report sample standard
/// deviations. Deterministic in (seed); resamples use counter-based streams
/// keyed (seed, resample index, record index).
BootstrapStd bootstrap_errors(const std::vector<measure::CountsRecord>& records, int d,
                              const measure::EstimatorOptions& est, int n_resamples,
                              std::uint64_t seed);

/// Per-dimension nested analysis: for each d in dims (ascending), restrict
/// the records to the d x d block, renormalize within the block, and certify.
/// Bootstrap resamples are drawn once per resample index at the full-record
/// level and shared across rows.
CertReport nested_analysis(const std::vector<measure::CountsRecord>& records,
                           const std::vector<int>& dims, const AnalysisOptions& opts = {});

/// Tool/run provenance attached to serialized reports.
struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string version;
};

/// Report JSON: {rows:[{d, fidelity, fidelity_std, schmidt, eof, eof_std,
/// h_down_m, h_up_mm, h_down_mub, h_up_mub}], meta:{seed, n_resamples,
/// crosstalk_assumed}} plus a provenance block when given.
std::string report_to_json_text(const CertReport& report, const Provenance* provenance = nullptr);

/// Plot data CSV with header d,F,F_sep,k_witness,eof (one row per report row).
std::string plot_csv_text(const CertReport& report);

}  // namespace pathcert::certify
