#include "pathcert/certify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <json.hpp>

#include "pathcert/errors.hpp"
#include "pathcert/rng.hpp"

namespace pathcert::certify {

namespace {

// Compensated summation; the entropy sums mix magnitudes across many orders.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

double plog2p(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

void check_dim(int d) {
    if (d < 2) throw ValidationError("invalid-dimension: need d >= 2");
}

// Sampling noise can push fidelity estimates slightly past the physical
// range; the entropy formulas are evaluated on the clamped value.
double clamp_fidelity(double f) { return std::clamp(f, 0.0, 1.0); }

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

double fidelity_from_elements(const elements::DiagonalData& diag,
                              const elements::OffDiagonalData& offdiag) {
    if (diag.d != offdiag.d)
        throw ValidationError("invalid-dimension: diagonal and off-diagonal data disagree on d");
    const int d = diag.d;
    if (static_cast<int>(offdiag.re.size()) != elements::pair_count(d))
        throw IncompleteDataError("off-diagonal data does not cover all path pairs");
    KahanSum acc;
    for (int i = 0; i < d; ++i) acc.add(diag.p_same(i));
    for (double re : offdiag.re) acc.add(2.0 * re);
    return acc.value() / d;
}

int schmidt_number_bound(double fidelity, int d) {
    check_dim(d);
    const double f = clamp_fidelity(fidelity);
    const double m = f * d;
    const double nearest = std::round(m);
    int k;
    if (std::abs(m - nearest) <= 1e-9 * d)
        k = static_cast<int>(nearest);  // exact boundary F = k/d certifies only k
    else
        k = static_cast<int>(std::floor(m)) + 1;
    return std::clamp(k, 1, d);
}

double separability_threshold(int d) {
    check_dim(d);
    return 1.0 / d;
}

double white_noise_threshold(int d) {
    check_dim(d);
    return 1.0 / (d + 1);
}

double binary_entropy(double x) {
    if (x < -1e-12 || x > 1.0 + 1e-12)
        throw ValidationError("invalid-parameter: binary entropy argument outside [0,1]");
    const double p = std::clamp(x, 0.0, 1.0);
    return plog2p(p) + plog2p(1.0 - p);
}

double h_down_comp(const elements::DiagonalData& diag) {
    check_dim(diag.d);
    KahanSum total;
    for (int i = 0; i < diag.d; ++i) total.add(diag.p_same(i));
    const double n = total.value();
    if (n > 1.0 + 1e-9)
        throw ValidationError("invalid-parameter: same-index populations sum past 1");
    int largest = 0;
    for (int i = 1; i < diag.d; ++i)
        if (diag.p_same(i) > diag.p_same(largest)) largest = i;
    KahanSum entropy;
    for (int i = 0; i < diag.d; ++i) {
        double q = diag.p_same(i);
        if (i == largest) q = std::max(q + (1.0 - n), 0.0);
        entropy.add(plog2p(q));
    }
    return entropy.value();
}

double h_up_comp(const elements::DiagonalData& diag) {
    check_dim(diag.d);
    KahanSum total;
    for (int i = 0; i < diag.d; ++i) total.add(diag.p_same(i));
    const double n = total.value();
    if (n > 1.0 + 1e-9)
        throw ValidationError("invalid-parameter: same-index populations sum past 1");
    KahanSum entropy;
    for (int i = 0; i < diag.d; ++i) entropy.add(plog2p(diag.p_same(i)));
    const double rest = 1.0 - n;
    if (rest > 0.0) {
        const double cells = static_cast<double>(diag.d) * diag.d - diag.d;
        entropy.add(-rest * std::log2(rest / cells));
    }
    return entropy.value();
}

double h_down_mub(double fidelity, int d) {
    check_dim(d);
    const double f = clamp_fidelity(fidelity);
    const double x = (d - 1) * f / d;
    return binary_entropy(x) + x * std::log2(static_cast<double>(d - 1));
}

double h_up_mub(double fidelity, int d) {
    check_dim(d);
    const double f = clamp_fidelity(fidelity);
    if (f * d < 1.0 - 1e-12)
        throw ValidationError("assumption-violated: the joint-entropy bound needs fidelity >= 1/d");
    const double cells = static_cast<double>(d) * d - d;
    double value = -f * std::log2(f / d);
    const double rest = 1.0 - f;
    if (rest > 0.0) value += -rest * std::log2(rest / cells);
    return value;
}

double eof_combination(double h_down_m, double h_up_mm, double h_down_mub_v,
                       double h_up_mub_v, int d) {
    check_dim(d);
    return -h_up_mm - h_up_mub_v + h_down_m + h_down_mub_v + std::log2(static_cast<double>(d));
}

double eof_bound(const elements::DiagonalData& diag, double fidelity, int d) {
    if (diag.d != d) throw ValidationError("invalid-dimension: diagonal data disagrees with d");
    return eof_combination(h_down_comp(diag), h_up_comp(diag), h_down_mub(fidelity, d),
                           h_up_mub(fidelity, d), d);
}

std::vector<measure::CountsRecord> restrict_records(const std::vector<measure::CountsRecord>& records,
                                                    int d) {
    check_dim(d);
    std::vector<measure::CountsRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (r.desc.a.i < d && r.desc.a.j < d && r.desc.b.i < d && r.desc.b.j < d)
            out.push_back(r);
    }
    return out;
}

CertRow analyze_dimension(const std::vector<measure::CountsRecord>& records, int d,
                          const measure::EstimatorOptions& est) {
    measure::CountsDataset ds(records, d, est);
    const elements::DiagonalData diag = ds.diagonals();
    const elements::OffDiagonalData off = ds.offdiag_all();
    CertRow row;
    row.d = d;
    row.fidelity = fidelity_from_elements(diag, off);
    row.schmidt = schmidt_number_bound(row.fidelity, d);
    row.h_down_m = h_down_comp(diag);
    row.h_up_mm = h_up_comp(diag);
    row.h_down_mub = h_down_mub(row.fidelity, d);
    row.h_up_mub = h_up_mub(row.fidelity, d);
    row.eof = eof_combination(row.h_down_m, row.h_up_mm, row.h_down_mub, row.h_up_mub, d);
    return row;
}

namespace {

std::vector<measure::CountsRecord> resample_records(const std::vector<measure::CountsRecord>& records,
                                                    std::uint64_t seed, std::uint64_t resample) {
    std::vector<measure::CountsRecord> out = records;
    for (std::size_t k = 0; k < out.size(); ++k) {
        // subindex k+1: the simulation itself owns the (seed, s, 0) streams
        SplitMix64 rng = stream_for(seed, resample, k + 1);
        out[k].counts = sample_poisson(rng, static_cast<double>(records[k].counts));
    }
    return out;
}

double sample_std(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    KahanSum mean_acc;
    for (double x : xs) mean_acc.add(x);
    const double mean = mean_acc.value() / n;
    KahanSum var_acc;
    for (double x : xs) var_acc.add((x - mean) * (x - mean));
    return std::sqrt(var_acc.value() / (n - 1));
}

void check_resamples(int n) {
    if (n != 0 && n < 100)
        throw ValidationError("invalid-parameter: n_resamples must be 0 (disabled) or >= 100");
}

struct FidelityEof {
    double fidelity = 0.0;
    double eof = 0.0;
};

FidelityEof evaluate_f_e(const std::vector<measure::CountsRecord>& records, int d,
                         const measure::EstimatorOptions& est) {
    measure::CountsDataset ds(records, d, est);
    const elements::DiagonalData diag = ds.diagonals();
    FidelityEof fe;
    fe.fidelity = fidelity_from_elements(diag, ds.offdiag_all());
    fe.eof = eof_bound(diag, fe.fidelity, d);
    return fe;
}

}  // namespace

BootstrapStd bootstrap_errors(const std::vector<measure::CountsRecord>& records, int d,
                              const measure::EstimatorOptions& est, int n_resamples,
                              std::uint64_t seed) {
    if (n_resamples < 100)
        throw ValidationError("invalid-parameter: bootstrap needs n_resamples >= 100");
    std::vector<double> fs, es;
    fs.reserve(n_resamples);
    es.reserve(n_resamples);
    for (int r = 0; r < n_resamples; ++r) {
        const FidelityEof fe = evaluate_f_e(resample_records(records, seed, r), d, est);
        fs.push_back(fe.fidelity);
        es.push_back(fe.eof);
    }
    BootstrapStd out;
    out.fidelity_std = sample_std(fs);
    out.eof_std = sample_std(es);
    return out;
}

CertReport nested_analysis(const std::vector<measure::CountsRecord>& records,
                           const std::vector<int>& dims, const AnalysisOptions& opts) {
    if (dims.empty()) throw ValidationError("invalid-parameter: dimension list is empty");
    for (std::size_t k = 0; k < dims.size(); ++k) {
        check_dim(dims[k]);
        if (k > 0 && dims[k] <= dims[k - 1])
            throw ValidationError("invalid-parameter: dimensions must be strictly ascending");
    }
    check_resamples(opts.n_resamples);

    CertReport report;
    report.seed = opts.seed;
    report.n_resamples = opts.n_resamples;
    report.crosstalk_assumed = opts.estimator.assumed_cross;
    for (int d : dims)
        report.rows.push_back(analyze_dimension(restrict_records(records, d), d, opts.estimator));

    if (opts.n_resamples > 0) {
        std::vector<std::vector<double>> fs(dims.size()), es(dims.size());
        for (int r = 0; r < opts.n_resamples; ++r) {
            // one shared resample of the whole campaign, re-analyzed per row
            const std::vector<measure::CountsRecord> resampled =
                resample_records(records, opts.seed, r);
            for (std::size_t k = 0; k < dims.size(); ++k) {
                const FidelityEof fe =
                    evaluate_f_e(restrict_records(resampled, dims[k]), dims[k], opts.estimator);
                fs[k].push_back(fe.fidelity);
                es[k].push_back(fe.eof);
            }
        }
        for (std::size_t k = 0; k < dims.size(); ++k) {
            report.rows[k].fidelity_std = sample_std(fs[k]);
            report.rows[k].eof_std = sample_std(es[k]);
        }
    }
    return report;
}

std::string report_to_json_text(const CertReport& report, const Provenance* provenance) {
    nlohmann::ordered_json doc;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const CertRow& row : report.rows) {
        nlohmann::ordered_json r;
        r["d"] = row.d;
        r["fidelity"] = row.fidelity;
        r["fidelity_std"] = row.fidelity_std;
        r["schmidt"] = row.schmidt;
        r["eof"] = row.eof;
        r["eof_std"] = row.eof_std;
        r["h_down_m"] = row.h_down_m;
        r["h_up_mm"] = row.h_up_mm;
        r["h_down_mub"] = row.h_down_mub;
        r["h_up_mub"] = row.h_up_mub;
        doc["rows"].push_back(std::move(r));
    }
    doc["meta"] = {{"seed", report.seed},
                   {"n_resamples", report.n_resamples},
                   {"crosstalk_assumed", report.crosstalk_assumed}};
    if (provenance) {
        doc["provenance"] = {{"config_hash", provenance->config_hash},
                             {"seed", provenance->seed},
                             {"version", provenance->version}};
    }
    return doc.dump(2) + "\n";
}

std::string plot_csv_text(const CertReport& report) {
    std::string out = "d,F,F_sep,k_witness,eof\n";
    for (const CertRow& row : report.rows) {
        out += std::to_string(row.d);
        out += ',';
        out += format_double(row.fidelity);
        out += ',';
        out += format_double(1.0 / row.d);
        out += ',';
        out += std::to_string(row.schmidt);
        out += ',';
        out += format_double(row.eof);
        out += '\n';
    }
    return out;
}

}  // namespace pathcert::certify
