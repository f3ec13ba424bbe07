#include "pathcert/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pathcert/errors.hpp"
#include "pathcert/version.hpp"

namespace pathcert::pipeline {

namespace {

bool is_power_of_two(int d) { return d >= 1 && (d & (d - 1)) == 0; }

void require_positive(double value, const char* name) {
    if (!(value > 0.0)) throw ValidationError(std::string("invalid-parameter: ") + name + " must be positive");
}

}  // namespace

void RunConfig::validate() const {
    if (!is_power_of_two(dim) || dim < 2 || dim > 32)
        throw ValidationError("invalid-dimension: dim must be a power of two in [2,32], got " + std::to_string(dim));
    require_positive(rate_hz, "rate_hz");
    require_positive(efficiency, "efficiency");
    require_positive(coincidence_window_s, "coincidence_window_s");
    require_positive(duration_s, "duration_s");
    if (n_resamples < 0) throw ValidationError("invalid-parameter: n_resamples must be nonnegative");
    if (assumed_cross < 0.0) throw ValidationError("invalid-parameter: assumed_cross must be nonnegative");
    qstate::StateSpec spec;
    spec.dim = dim;
    spec.noise = noise;
    spec.seed = seed;
    spec.validate();
}

RunConfig run_config_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid-config: ") + e.what());
    }
    RunConfig c;
    try {
        if (j.contains("dim")) c.dim = j.at("dim").get<int>();
        if (j.contains("noise")) {
            for (const auto& item : j.at("noise")) {
                qstate::NoiseSpec n;
                n.kind = item.at("kind").get<std::string>();
                if (item.contains("p"))
                    n.value = item.at("p").get<double>();
                else if (item.contains("sigma"))
                    n.value = item.at("sigma").get<double>();
                else if (item.contains("epsilon"))
                    n.value = item.at("epsilon").get<double>();
                else
                    n.value = item.at("value").get<double>();
                c.noise.push_back(n);
            }
        }
        if (j.contains("rate_hz")) c.rate_hz = j.at("rate_hz").get<double>();
        if (j.contains("efficiency")) c.efficiency = j.at("efficiency").get<double>();
        if (j.contains("coincidence_window_s")) c.coincidence_window_s = j.at("coincidence_window_s").get<double>();
        if (j.contains("duration_s")) c.duration_s = j.at("duration_s").get<double>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("n_resamples")) c.n_resamples = j.at("n_resamples").get<int>();
        if (j.contains("assumed_cross")) c.assumed_cross = j.at("assumed_cross").get<double>();
        if (j.contains("exact")) c.exact = j.at("exact").get<bool>();
        if (j.contains("diagonal_grid")) c.diagonal_grid = j.at("diagonal_grid").get<bool>();
        if (j.contains("include_imag")) c.include_imag = j.at("include_imag").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid-config: ") + e.what());
    }
    c.validate();
    return c;
}

std::string run_config_to_json_text(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["dim"] = c.dim;
    auto noise = nlohmann::ordered_json::array();
    for (const auto& n : c.noise) {
        nlohmann::ordered_json item;
        item["kind"] = n.kind;
        if (n.kind == "white")
            item["p"] = n.value;
        else if (n.kind == "dephase")
            item["sigma"] = n.value;
        else if (n.kind == "crosstalk")
            item["epsilon"] = n.value;
        else
            item["value"] = n.value;
        noise.push_back(item);
    }
    j["noise"] = noise;
    j["rate_hz"] = c.rate_hz;
    j["efficiency"] = c.efficiency;
    j["coincidence_window_s"] = c.coincidence_window_s;
    j["duration_s"] = c.duration_s;
    j["seed"] = c.seed;
    j["n_resamples"] = c.n_resamples;
    j["assumed_cross"] = c.assumed_cross;
    j["exact"] = c.exact;
    j["diagonal_grid"] = c.diagonal_grid;
    j["include_imag"] = c.include_imag;
    return j.dump(2) + "\n";
}

std::vector<qstate::NoiseSpec> parse_noise_arg(const std::string& text) {
    std::vector<qstate::NoiseSpec> stack;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        const auto colon = part.find(':');
        if (colon == std::string::npos)
            throw ValidationError("invalid-parameter: noise entry '" + part + "' must look like kind:value");
        qstate::NoiseSpec n;
        n.kind = part.substr(0, colon);
        try {
            n.value = std::stod(part.substr(colon + 1));
        } catch (const std::exception&) {
            throw ValidationError("invalid-parameter: bad noise level in '" + part + "'");
        }
        stack.push_back(n);
    }
    return stack;
}

std::string config_hash(const RunConfig& config) {
    const std::string canonical = run_config_to_json_text(config);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int k = 0; k < 16; ++k) buf[15 - k] = digits[(h >> (4 * k)) & 0xf];
    buf[16] = '\0';
    return buf;
}

SimulationRun run_simulate(const RunConfig& config) {
    config.validate();
    qstate::StateSpec spec;
    spec.dim = config.dim;
    spec.noise = config.noise;
    spec.seed = config.seed;
    const qstate::BipartiteDensityMatrix rho = qstate::synthesize(spec);

    measure::PlanOptions plan_opts;
    plan_opts.diagonal_grid = config.diagonal_grid;
    plan_opts.include_imag = config.include_imag;

    SimulationRun run;
    run.plan = measure::plan_full(config.dim, plan_opts);

    measure::SimOptions sim;
    sim.rate_hz = config.rate_hz;
    sim.efficiency = config.efficiency;
    sim.duration_s = config.duration_s;
    sim.seed = config.seed;
    sim.exact = config.exact;
    run.records = measure::simulate_counts(rho, run.plan, sim);
    return run;
}

void run_simulate_to_file(const RunConfig& config, const std::string& path) {
    const SimulationRun run = run_simulate(config);
    measure::write_counts_csv(path, run.records);
}

int infer_dimension(const std::vector<measure::CountsRecord>& records) {
    if (records.empty()) throw IncompleteDataError("incomplete-data: no counts records");
    int top = 0;
    for (const auto& rec : records) {
        top = std::max({top, rec.desc.a.i, rec.desc.a.j, rec.desc.b.i, rec.desc.b.j});
    }
    return top + 1;
}

std::vector<int> default_dims(int data_dim) {
    if (data_dim < 2) throw ValidationError("invalid-dimension: need at least two paths, got " + std::to_string(data_dim));
    std::vector<int> dims;
    for (int d = 2; d <= data_dim; d += 2) dims.push_back(d);
    return dims;
}

CertifyRun run_certify(const std::vector<measure::CountsRecord>& records, std::vector<int> dims,
                       const RunConfig& config) {
    if (dims.empty()) dims = default_dims(infer_dimension(records));

    certify::AnalysisOptions opts;
    opts.estimator.assumed_cross = config.assumed_cross;
    opts.n_resamples = config.n_resamples;
    opts.seed = config.seed;

    CertifyRun out;
    out.report = certify::nested_analysis(records, dims, opts);

    certify::Provenance prov;
    prov.config_hash = config_hash(config);
    prov.seed = config.seed;
    prov.version = kVersion;
    out.report_json = certify::report_to_json_text(out.report, &prov);
    out.plot_csv = certify::plot_csv_text(out.report);
    return out;
}

CertifyRun run_certify_file(const std::string& counts_path, std::vector<int> dims, const RunConfig& config) {
    return run_certify(measure::read_counts_csv(counts_path), std::move(dims), config);
}

CompileRun run_compile_subspace(int i, int j, int d) {
    const optics::SubspaceSetting setting = optics::compile_subspace(i, j, d);
    CompileRun out;
    out.table_text = optics::subspace_setting_table_text(setting);
    out.json_text = optics::subspace_setting_to_json_text(setting);
    out.verification = optics::verify_subspace_setting(setting, d, optics::Cx(1.0, 0.0), optics::Cx(1.0, 0.0));
    return out;
}

CompileRun run_compile_mub(int n) {
    const optics::MubNetwork mub = optics::compile_mub_network(n);
    CompileRun out;
    out.json_text = optics::network_to_json_text(mub.network);
    out.verification = optics::verify_mub_network(mub);
    std::string table = "mutually unbiased basis interferometer, d=" + std::to_string(1 << n) + "\n";
    for (const auto& check : out.verification.checks)
        table += "  " + check.name + ": deviation " + std::to_string(check.deviation) + "\n";
    out.table_text = table;
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("invalid-file: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("invalid-file: cannot write '" + path + "'");
    out << text;
    if (!out) throw ValidationError("invalid-file: write failed for '" + path + "'");
}

}  // namespace pathcert::pipeline
