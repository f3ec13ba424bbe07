#pragma once
// Campaign orchestration: run configuration, simulation and certification
// drivers, measurement-network compilation artifacts, and provenance.

#include <cstdint>
#include <string>
#include <vector>

#include "pathcert/certify.hpp"
#include "pathcert/measure.hpp"
#include "pathcert/optics.hpp"
#include "pathcert/qstate.hpp"

namespace pathcert::pipeline {

/// One reproducible campaign: state preparation, counting parameters, and
/// analysis options. Serialized as a single JSON document so a run can be
/// reproduced and hashed.
struct RunConfig {
    int dim = 32;
    std::vector<qstate::NoiseSpec> noise;  // applied in order
    double rate_hz = 4000.0;
    double efficiency = 0.16;
    double coincidence_window_s = 3e-9;
    double duration_s = 10.0;  // acquisition time per setting
    std::uint64_t seed = 1;
    int n_resamples = 100;
    double assumed_cross = 0.0;  // estimator model for unmeasured cross rates
    bool exact = false;          // emit expected counts instead of sampling
    bool diagonal_grid = false;  // measure the full d x d coincidence grid
    bool include_imag = false;   // add mixed-arm settings for imaginary parts

    void validate() const;
};

RunConfig run_config_from_json_text(const std::string& text);
std::string run_config_to_json_text(const RunConfig& config);

/// Parses a noise stack argument such as "white:0.05,dephase:0.16".
std::vector<qstate::NoiseSpec> parse_noise_arg(const std::string& text);

/// FNV-1a hash (hex) of the canonical serialized config, for provenance.
std::string config_hash(const RunConfig& config);

struct SimulationRun {
    measure::ExperimentPlan plan;
    std::vector<measure::CountsRecord> records;
};

/// Synthesizes the configured state and simulates the full campaign.
SimulationRun run_simulate(const RunConfig& config);

/// run_simulate plus counts CSV emission.
void run_simulate_to_file(const RunConfig& config, const std::string& path);

/// Largest path index referenced by any record, plus one.
int infer_dimension(const std::vector<measure::CountsRecord>& records);

/// Even dimensions 2,4,...,data_dim.
std::vector<int> default_dims(int data_dim);

struct CertifyRun {
    certify::CertReport report;
    std::string report_json;  // includes the provenance block
    std::string plot_csv;
};

/// Nested certification over `dims` (empty selects default_dims of the data)
/// with provenance derived from `config`.
CertifyRun run_certify(const std::vector<measure::CountsRecord>& records, std::vector<int> dims,
                       const RunConfig& config);

/// run_certify on a counts CSV file.
CertifyRun run_certify_file(const std::string& counts_path, std::vector<int> dims, const RunConfig& config);

struct CompileRun {
    std::string table_text;
    std::string json_text;
    optics::VerificationReport verification;
};

/// Compiles and verifies the two-path analyzer for (i, j) at dimension d.
CompileRun run_compile_subspace(int i, int j, int d);

/// Compiles and verifies the d = 2^n mutually unbiased basis interferometer.
CompileRun run_compile_mub(int n);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace pathcert::pipeline
