#include "pathcert/measure.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "pathcert/rng.hpp"

namespace pathcert::measure {

namespace {

constexpr double kExactScale = 1e15;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

const char* basis_name(BasisKind b) {
    switch (b) {
        case BasisKind::Z: return "Z";
        case BasisKind::X: return "X";
        default: return "Y";
    }
}

BasisKind basis_from_name(const std::string& s) {
    if (s == "Z") return BasisKind::Z;
    if (s == "X") return BasisKind::X;
    if (s == "Y") return BasisKind::Y;
    throw ValidationError("invalid-file: unknown basis '" + s + "'");
}

void check_arm(const ArmSetting& a, int d) {
    if (a.i < 0 || a.i >= d || a.j < 0 || a.j >= d)
        throw ValidationError("invalid-index: arm setting index out of range for d=" + std::to_string(d));
    if (a.basis == BasisKind::Z) {
        if (a.sign != +1) throw ValidationError("invalid-parameter: Z settings carry sign +");
    } else {
        if (a.i >= a.j) throw ValidationError("invalid-index: subspace setting needs i < j");
        if (a.sign != +1 && a.sign != -1) throw ValidationError("invalid-parameter: sign must be +1 or -1");
    }
}

ArmSetting make_arm(BasisKind basis, int i, int j, int sign) {
    ArmSetting a;
    a.basis = basis;
    a.i = i;
    a.j = j;
    a.sign = sign;
    return a;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

Eigen::VectorXcd ArmSetting::vector(int d) const {
    check_arm(*this, d);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    switch (basis) {
        case BasisKind::Z:
            v(i) = 1.0;
            break;
        case BasisKind::X:
            v(i) = kInvSqrt2;
            v(j) = sign * kInvSqrt2;
            break;
        case BasisKind::Y:
            v(i) = kInvSqrt2;
            v(j) = Cx(0.0, sign * kInvSqrt2);
            break;
    }
    return v;
}

std::string ArmSetting::str() const {
    if (basis == BasisKind::Z) return std::string("Z") + std::to_string(i);
    return std::string(basis_name(basis)) + (sign > 0 ? "+" : "-") + std::to_string(i) + "," + std::to_string(j);
}

ExperimentPlan plan_full(int d, const PlanOptions& opts) {
    if (d < 2) throw ValidationError("invalid-dimension: plan needs d >= 2");
    ExperimentPlan plan;
    plan.dim = d;
    auto add = [&](const ArmSetting& a, const ArmSetting& b) {
        ProjectiveSetting s;
        s.desc.a = a;
        s.desc.b = b;
        s.vec_a = a.vector(d);
        s.vec_b = b.vector(d);
        plan.settings.push_back(std::move(s));
    };
    if (opts.diagonal_grid) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                add(make_arm(BasisKind::Z, i, i, +1), make_arm(BasisKind::Z, j, j, +1));
    } else {
        for (int i = 0; i < d; ++i)
            add(make_arm(BasisKind::Z, i, i, +1), make_arm(BasisKind::Z, i, i, +1));
    }
    const int signs[2] = {+1, -1};
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            for (int s : signs)
                for (int t : signs)
                    add(make_arm(BasisKind::X, i, j, s), make_arm(BasisKind::X, i, j, t));
            for (int s : signs)
                for (int t : signs)
                    add(make_arm(BasisKind::Y, i, j, s), make_arm(BasisKind::Y, i, j, t));
            if (opts.include_imag) {
                for (int s : signs)
                    for (int t : signs)
                        add(make_arm(BasisKind::X, i, j, s), make_arm(BasisKind::Y, i, j, t));
                for (int s : signs)
                    for (int t : signs)
                        add(make_arm(BasisKind::Y, i, j, s), make_arm(BasisKind::X, i, j, t));
            }
        }
    return plan;
}

double born_probability(const qstate::BipartiteDensityMatrix& rho, const ProjectiveSetting& setting) {
    if (setting.vec_a.size() != rho.dim_a || setting.vec_b.size() != rho.dim_b)
        throw ValidationError("invalid-dimension: setting vectors do not match state dimensions");
    // Joint projector vectors from measurement plans have at most 4 nonzero
    // entries; sum the few relevant matrix elements instead of a dense form.
    std::vector<std::pair<Eigen::Index, Cx>> support;
    for (Eigen::Index a = 0; a < setting.vec_a.size(); ++a) {
        if (setting.vec_a(a) == Cx(0.0, 0.0)) continue;
        for (Eigen::Index b = 0; b < setting.vec_b.size(); ++b) {
            if (setting.vec_b(b) == Cx(0.0, 0.0)) continue;
            support.emplace_back(a * rho.dim_b + b, setting.vec_a(a) * setting.vec_b(b));
        }
    }
    Cx acc = 0.0;
    for (const auto& [k1, w1] : support)
        for (const auto& [k2, w2] : support)
            acc += std::conj(w1) * rho.entries(k1, k2) * w2;
    return std::clamp(acc.real(), 0.0, 1.0);
}

std::vector<CountsRecord> simulate_counts(const qstate::BipartiteDensityMatrix& rho,
                                          const ExperimentPlan& plan, const SimOptions& opts) {
    if (opts.rate_hz <= 0.0 || opts.efficiency <= 0.0 || opts.efficiency > 1.0 || opts.duration_s <= 0.0)
        throw ValidationError("invalid-parameter: simulation needs rate > 0, 0 < efficiency <= 1, duration > 0");
    if (plan.dim != rho.dim_a || plan.dim != rho.dim_b)
        throw ValidationError("invalid-dimension: plan dimension does not match state");
    std::vector<CountsRecord> records;
    records.reserve(plan.settings.size());
    for (std::size_t s = 0; s < plan.settings.size(); ++s) {
        const double p = born_probability(rho, plan.settings[s]);
        CountsRecord rec;
        rec.desc = plan.settings[s].desc;
        rec.duration_s = opts.duration_s;
        rec.expected_rate_hz = p * opts.rate_hz * opts.efficiency;
        if (opts.exact) {
            rec.counts = static_cast<std::uint64_t>(std::llround(p * kExactScale));
        } else {
            SplitMix64 rng = stream_for(opts.seed, s);
            rec.counts = sample_poisson(rng, *rec.expected_rate_hz * opts.duration_s);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

double accidental_rate(double singles_a_hz, double singles_b_hz, double window_s) {
    if (singles_a_hz < 0.0 || singles_b_hz < 0.0 || window_s < 0.0)
        throw ValidationError("invalid-parameter: accidental rate inputs must be nonnegative");
    return singles_a_hz * singles_b_hz * window_s;
}

void write_counts_csv(const std::string& path, const std::vector<CountsRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("invalid-file: cannot open '" + path + "' for writing");
    out << "label,i_a,j_a,basis_a,sign_a,i_b,j_b,basis_b,sign_b,counts,duration_s\n";
    for (const auto& r : records) {
        out << r.desc.label() << ',' << r.desc.a.i << ',' << r.desc.a.j << ',' << basis_name(r.desc.a.basis)
            << ',' << (r.desc.a.sign > 0 ? '+' : '-') << ',' << r.desc.b.i << ',' << r.desc.b.j << ','
            << basis_name(r.desc.b.basis) << ',' << (r.desc.b.sign > 0 ? '+' : '-') << ',' << r.counts
            << ',' << format_double(r.duration_s) << '\n';
    }
    if (!out) throw ValidationError("invalid-file: write to '" + path + "' failed");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

int parse_int(const std::string& s, const char* what) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError(std::string("invalid-file: bad ") + what + " field '" + s + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError(std::string("invalid-file: bad ") + what + " field '" + s + "'");
    return v;
}

double parse_double(const std::string& s, const char* what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError(std::string("invalid-file: bad ") + what + " field '" + s + "'");
    return v;
}

int parse_sign(const std::string& s) {
    if (s == "+") return +1;
    if (s == "-") return -1;
    throw ValidationError("invalid-file: bad sign field '" + s + "'");
}

}  // namespace

std::vector<CountsRecord> read_counts_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("invalid-file: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("invalid-file: '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "label,i_a,j_a,basis_a,sign_a,i_b,j_b,basis_b,sign_b,counts,duration_s")
        throw ValidationError("invalid-file: unexpected counts CSV header in '" + path + "'");
    std::vector<CountsRecord> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        // The label field itself contains commas ("X-0,3|..."), so index the
        // 10 data fields from the end of the row.
        const auto f = split_csv_line(line);
        if (f.size() < 11)
            throw ValidationError("invalid-file: counts CSV row with " + std::to_string(f.size()) + " fields");
        const std::size_t base = f.size() - 10;
        CountsRecord r;
        r.desc.a.i = parse_int(f[base + 0], "i_a");
        r.desc.a.j = parse_int(f[base + 1], "j_a");
        r.desc.a.basis = basis_from_name(f[base + 2]);
        r.desc.a.sign = r.desc.a.basis == BasisKind::Z ? +1 : parse_sign(f[base + 3]);
        r.desc.b.i = parse_int(f[base + 4], "i_b");
        r.desc.b.j = parse_int(f[base + 5], "j_b");
        r.desc.b.basis = basis_from_name(f[base + 6]);
        r.desc.b.sign = r.desc.b.basis == BasisKind::Z ? +1 : parse_sign(f[base + 7]);
        r.counts = parse_u64(f[base + 8], "counts");
        r.duration_s = parse_double(f[base + 9], "duration_s");
        if (r.duration_s <= 0.0) throw ValidationError("invalid-file: nonpositive duration");
        records.push_back(std::move(r));
    }
    return records;
}

namespace {

// Compact per-arm key in [0, d + 4*pair_count(d)):
//   Z i        -> i
//   X s (i,j)  -> d +                  2*pair_index + (s<0)
//   Y s (i,j)  -> d + 2*pair_count  +  2*pair_index + (s<0)
int arm_compact_key(const ArmSetting& a, int d) {
    check_arm(a, d);
    if (a.basis == BasisKind::Z) return a.i;
    const int pairs = elements::pair_count(d);
    const int base = d + (a.basis == BasisKind::Y ? 2 * pairs : 0);
    return base + 2 * elements::pair_index(a.i, a.j, d) + (a.sign < 0 ? 1 : 0);
}

int arm_key_count(int d) { return d + 4 * elements::pair_count(d); }

}  // namespace

CountsDataset::CountsDataset(std::vector<CountsRecord> records, int d, const EstimatorOptions& opts)
    : records_(std::move(records)), d_(d), opts_(opts) {
    if (d_ < 2) throw ValidationError("invalid-dimension: dataset needs d >= 2");
    if (opts_.assumed_cross < 0.0)
        throw ValidationError("invalid-parameter: assumed cross-population must be nonnegative");
    const double cross_total = (static_cast<double>(d_) * d_ - d_) * opts_.assumed_cross;
    if (cross_total >= 1.0)
        throw ValidationError("invalid-parameter: assumed cross-population saturates the normalization");

    const int k = arm_key_count(d_);
    index_.assign(static_cast<std::size_t>(k) * k, -1);
    for (std::size_t r = 0; r < records_.size(); ++r) {
        const CountsRecord& rec = records_[r];
        if (rec.duration_s <= 0.0) throw ValidationError("invalid-parameter: record duration must be positive");
        const std::size_t slot = static_cast<std::size_t>(arm_compact_key(rec.desc.a, d_)) * k
                               + arm_compact_key(rec.desc.b, d_);
        if (index_[slot] >= 0)
            throw ValidationError("invalid-file: duplicate record for setting " + rec.desc.label());
        index_[slot] = static_cast<int>(r);
    }

    grid_ = true;
    for (int i = 0; i < d_ && grid_; ++i)
        for (int j = 0; j < d_; ++j)
            if (index_[static_cast<std::size_t>(i) * k + j] < 0) {
                grid_ = false;
                break;
            }

    if (grid_) {
        double sum = 0.0;
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) sum += records_[index_[static_cast<std::size_t>(i) * k + j]].rate();
        c_t_ = sum;
    } else {
        double sum = 0.0;
        for (int i = 0; i < d_; ++i) {
            const int r = index_[static_cast<std::size_t>(i) * k + i];
            if (r < 0)
                throw IncompleteDataError("missing diagonal setting Z" + std::to_string(i) + "|Z" + std::to_string(i));
            sum += records_[r].rate();
        }
        c_t_ = sum / (1.0 - cross_total);
    }
    if (!(c_t_ > 0.0)) throw ValidationError("invalid-file: dataset has zero total rate, cannot normalize");
}

const CountsRecord* CountsDataset::find(const SettingDescriptor& desc) const {
    const int k = arm_key_count(d_);
    const std::size_t slot = static_cast<std::size_t>(arm_compact_key(desc.a, d_)) * k
                           + arm_compact_key(desc.b, d_);
    const int r = index_[slot];
    return r < 0 ? nullptr : &records_[r];
}

double CountsDataset::diag_rate(int i, int j) const {
    SettingDescriptor desc;
    desc.a = make_arm(BasisKind::Z, i, i, +1);
    desc.b = make_arm(BasisKind::Z, j, j, +1);
    const CountsRecord* rec = find(desc);
    if (!rec) throw IncompleteDataError("missing diagonal setting " + desc.label());
    return rec->rate();
}

elements::DiagonalData CountsDataset::diagonals() const {
    elements::DiagonalData diag;
    diag.d = d_;
    diag.cross_measured = grid_;
    diag.p_ab = Eigen::MatrixXd::Zero(d_, d_);
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) {
            if (grid_ || i == j)
                diag.p_ab(i, j) = diag_rate(i, j) / c_t_;
            else
                diag.p_ab(i, j) = opts_.assumed_cross;
        }
    diag.validate();
    return diag;
}

double CountsDataset::correlator(int i, int j, PauliKind arm_a, PauliKind arm_b) const {
    if (i < 0 || j < 0 || i >= d_ || j >= d_ || i >= j)
        throw ValidationError("invalid-index: correlator needs 0 <= i < j < d");
    const BasisKind ba = arm_a == PauliKind::X ? BasisKind::X : BasisKind::Y;
    const BasisKind bb = arm_b == PauliKind::X ? BasisKind::X : BasisKind::Y;
    double acc = 0.0;
    for (int s : {+1, -1})
        for (int t : {+1, -1}) {
            SettingDescriptor desc;
            desc.a = make_arm(ba, i, j, s);
            desc.b = make_arm(bb, i, j, t);
            const CountsRecord* rec = find(desc);
            if (!rec) throw IncompleteDataError("missing subspace setting " + desc.label());
            acc += s * t * rec->rate();
        }
    return acc / c_t_;
}

bool CountsDataset::has_correlator(int i, int j, PauliKind arm_a, PauliKind arm_b) const {
    const BasisKind ba = arm_a == PauliKind::X ? BasisKind::X : BasisKind::Y;
    const BasisKind bb = arm_b == PauliKind::X ? BasisKind::X : BasisKind::Y;
    for (int s : {+1, -1})
        for (int t : {+1, -1}) {
            SettingDescriptor desc;
            desc.a = make_arm(ba, i, j, s);
            desc.b = make_arm(bb, i, j, t);
            if (!find(desc)) return false;
        }
    return true;
}

CountsDataset::OffDiagEstimate CountsDataset::offdiag(int i, int j) const {
    OffDiagEstimate est;
    est.re = (correlator(i, j, PauliKind::X, PauliKind::X) - correlator(i, j, PauliKind::Y, PauliKind::Y)) / 4.0;
    if (has_correlator(i, j, PauliKind::X, PauliKind::Y) && has_correlator(i, j, PauliKind::Y, PauliKind::X))
        est.im = -(correlator(i, j, PauliKind::X, PauliKind::Y) + correlator(i, j, PauliKind::Y, PauliKind::X)) / 4.0;
    return est;
}

elements::OffDiagonalData CountsDataset::offdiag_all() const {
    elements::OffDiagonalData data;
    data.d = d_;
    const int pairs = elements::pair_count(d_);
    data.re.assign(pairs, 0.0);
    std::vector<double> im(pairs, 0.0);
    bool all_imag = true;
    for (int i = 0; i < d_; ++i)
        for (int j = i + 1; j < d_; ++j) {
            const OffDiagEstimate est = offdiag(i, j);
            const int p = elements::pair_index(i, j, d_);
            data.re[p] = est.re;
            if (est.im)
                im[p] = *est.im;
            else
                all_imag = false;
        }
    if (all_imag) data.im = std::move(im);
    data.validate();
    return data;
}

double CountsDataset::visibility(int i, int j) const {
    const double pop = diag_rate(i, i) / c_t_ + diag_rate(j, j) / c_t_;
    if (!(pop > 0.0))
        throw ValidationError("invalid-parameter: visibility undefined when both populations vanish");
    const double num = correlator(i, j, PauliKind::X, PauliKind::X) - correlator(i, j, PauliKind::Y, PauliKind::Y);
    return num / (2.0 * pop);
}

elements::DiagonalData estimate_diagonals(const std::vector<CountsRecord>& records, int d,
                                          const EstimatorOptions& opts) {
    return CountsDataset(records, d, opts).diagonals();
}

double estimate_correlator(const std::vector<CountsRecord>& records, int d, int i, int j,
                           PauliKind arm_a, PauliKind arm_b, const EstimatorOptions& opts) {
    return CountsDataset(records, d, opts).correlator(i, j, arm_a, arm_b);
}

CountsDataset::OffDiagEstimate estimate_offdiag(const std::vector<CountsRecord>& records, int d,
                                                int i, int j, const EstimatorOptions& opts) {
    return CountsDataset(records, d, opts).offdiag(i, j);
}

double visibility(const std::vector<CountsRecord>& records, int d, int i, int j,
                  const EstimatorOptions& opts) {
    return CountsDataset(records, d, opts).visibility(i, j);
}

}
