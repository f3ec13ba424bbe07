// Command-line front end: simulate coincidence campaigns, certify nested
// entanglement dimensionality from counts, and compile/verify the optical
// measurement networks.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pathcert/errors.hpp"
#include "pathcert/pipeline.hpp"
#include "pathcert/version.hpp"

namespace {

using namespace pathcert;

struct ConfigArgs {
    std::string config_path;
    std::optional<int> dim;
    std::optional<std::string> noise;
    std::optional<std::uint64_t> seed;
    std::optional<double> rate_hz;
    std::optional<double> efficiency;
    std::optional<double> duration_s;
    std::optional<int> n_resamples;
    std::optional<double> assumed_cross;
    bool exact = false;
    bool diagonal_grid = false;
    bool include_imag = false;
};

void add_config_flags(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration JSON file");
    cmd->add_option("--dim", args.dim, "per-arm dimension (power of two, 2..32)");
    cmd->add_option("--noise", args.noise, "noise stack, e.g. white:0.05,dephase:0.16,crosstalk:4.5e-5");
    cmd->add_option("--seed", args.seed, "random seed");
    cmd->add_option("--rate", args.rate_hz, "pair rate in Hz");
    cmd->add_option("--efficiency", args.efficiency, "coincidence detection efficiency");
    cmd->add_option("--duration", args.duration_s, "acquisition time per setting in seconds");
    cmd->add_option("--resamples", args.n_resamples, "bootstrap resamples (0 disables)");
    cmd->add_option("--assumed-cross", args.assumed_cross, "cross-population level assumed by the estimator");
    cmd->add_flag("--exact", args.exact, "record expected counts instead of Poisson samples");
    cmd->add_flag("--grid", args.diagonal_grid, "measure the full d x d coincidence grid");
    cmd->add_flag("--imag", args.include_imag, "add mixed-arm settings for imaginary parts");
}

pipeline::RunConfig build_config(const ConfigArgs& args) {
    pipeline::RunConfig config;
    if (!args.config_path.empty())
        config = pipeline::run_config_from_json_text(pipeline::read_text_file(args.config_path));
    if (args.dim) config.dim = *args.dim;
    if (args.noise) config.noise = pipeline::parse_noise_arg(*args.noise);
    if (args.seed) config.seed = *args.seed;
    if (args.rate_hz) config.rate_hz = *args.rate_hz;
    if (args.efficiency) config.efficiency = *args.efficiency;
    if (args.duration_s) config.duration_s = *args.duration_s;
    if (args.n_resamples) config.n_resamples = *args.n_resamples;
    if (args.assumed_cross) config.assumed_cross = *args.assumed_cross;
    if (args.exact) config.exact = true;
    if (args.diagonal_grid) config.diagonal_grid = true;
    if (args.include_imag) config.include_imag = true;
    config.validate();
    return config;
}

std::vector<int> parse_dims(const std::string& text) {
    std::vector<int> dims;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        try {
            dims.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw ValidationError("invalid-parameter: bad dimension '" + part + "' in --dims");
        }
    }
    return dims;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty())
        std::cout << text;
    else
        pipeline::write_text_file(path, text);
}

int cmd_simulate(const ConfigArgs& args, const std::string& out_path) {
    const pipeline::RunConfig config = build_config(args);
    pipeline::run_simulate_to_file(config, out_path);
    std::cout << "wrote " << out_path << " (config " << pipeline::config_hash(config) << ", seed " << config.seed
              << ")\n";
    return 0;
}

int cmd_certify(const ConfigArgs& args, const std::string& counts_path, const std::string& dims_text,
                const std::string& out_path, const std::string& plot_path) {
    const pipeline::RunConfig config = build_config(args);
    const std::vector<int> dims = dims_text.empty() ? std::vector<int>{} : parse_dims(dims_text);
    const pipeline::CertifyRun run = pipeline::run_certify_file(counts_path, dims, config);
    emit(out_path, run.report_json);
    if (!plot_path.empty()) pipeline::write_text_file(plot_path, run.plot_csv);
    if (!out_path.empty()) std::cout << "wrote " << out_path << "\n";
    if (!plot_path.empty()) std::cout << "wrote " << plot_path << "\n";
    return 0;
}

int finish_compile(const pipeline::CompileRun& run, const std::string& out_path) {
    std::cout << run.table_text;
    std::cout << run.verification.summary();
    if (!out_path.empty()) {
        pipeline::write_text_file(out_path, run.json_text);
        std::cout << "wrote " << out_path << "\n";
    }
    return run.verification.pass ? 0 : 3;
}

int cmd_report(const std::string& report_path, const std::string& out_path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(pipeline::read_text_file(report_path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid-file: ") + e.what());
    }
    certify::CertReport report;
    try {
        for (const auto& row : doc.at("rows")) {
            certify::CertRow r;
            r.d = row.at("d").get<int>();
            r.fidelity = row.at("fidelity").get<double>();
            r.fidelity_std = row.at("fidelity_std").get<double>();
            r.schmidt = row.at("schmidt").get<int>();
            r.eof = row.at("eof").get<double>();
            r.eof_std = row.at("eof_std").get<double>();
            r.h_down_m = row.at("h_down_m").get<double>();
            r.h_up_mm = row.at("h_up_mm").get<double>();
            r.h_down_mub = row.at("h_down_mub").get<double>();
            r.h_up_mub = row.at("h_up_mub").get<double>();
            report.rows.push_back(r);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid-file: ") + e.what());
    }
    emit(out_path, certify::plot_csv_text(report));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator and certification toolkit for path-entangled photon pairs"};
    app.set_version_flag("--version", std::string(pathcert::kVersion));
    app.require_subcommand(1);

    ConfigArgs sim_args;
    std::string sim_out;
    CLI::App* sim = app.add_subcommand("simulate", "synthesize a state and simulate a counting campaign");
    add_config_flags(sim, sim_args);
    sim->add_option("--out", sim_out, "counts CSV output path")->required();

    ConfigArgs cert_args;
    std::string cert_counts;
    std::string cert_dims;
    std::string cert_out;
    std::string cert_plot;
    CLI::App* cert = app.add_subcommand("certify", "run the nested certification analysis on a counts file");
    add_config_flags(cert, cert_args);
    cert->add_option("counts", cert_counts, "counts CSV file")->required();
    cert->add_option("--dims", cert_dims, "nested dimensions, e.g. 2,4,8 (default: even 2..data)");
    cert->add_option("--out", cert_out, "report JSON output path (default: stdout)");
    cert->add_option("--plot", cert_plot, "plot CSV output path");

    int sub_i = 0;
    int sub_j = 1;
    int sub_d = 32;
    std::string sub_out;
    CLI::App* sub = app.add_subcommand("compile-subspace", "compile and verify a two-path analyzer setting");
    sub->add_option("i", sub_i, "first path index")->required();
    sub->add_option("j", sub_j, "second path index")->required();
    sub->add_option("--dim", sub_d, "per-arm dimension (power of two, 2..32)");
    sub->add_option("--out", sub_out, "network JSON output path");

    int mub_n = 5;
    std::string mub_out;
    CLI::App* mub = app.add_subcommand("compile-mub", "compile and verify the unbiased-basis interferometer");
    mub->add_option("n", mub_n, "interferometer depth (d = 2^n)")->required();
    mub->add_option("--out", mub_out, "network JSON output path");

    std::string rep_in;
    std::string rep_out;
    CLI::App* rep = app.add_subcommand("report", "emit plot CSV from an existing report JSON");
    rep->add_option("report", rep_in, "report JSON file")->required();
    rep->add_option("--out", rep_out, "plot CSV output path (default: stdout)");

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return cmd_simulate(sim_args, sim_out);
        if (cert->parsed()) return cmd_certify(cert_args, cert_counts, cert_dims, cert_out, cert_plot);
        if (sub->parsed()) return finish_compile(pipeline::run_compile_subspace(sub_i, sub_j, sub_d), sub_out);
        if (mub->parsed()) return finish_compile(pipeline::run_compile_mub(mub_n), mub_out);
        if (rep->parsed()) return cmd_report(rep_in, rep_out);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const pathcert::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const pathcert::VerificationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const pathcert::LayoutError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const pathcert::IncompleteDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
