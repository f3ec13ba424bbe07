#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pathcert/measure.hpp"
#include "pathcert/qstate.hpp"

using namespace pathcert;
using namespace pathcert::measure;

namespace {

std::string temp_path(const char* stem) {
    return (std::filesystem::temp_directory_path() / stem).string();
}

qstate::BipartiteDensityMatrix demo_state(int d) {
    qstate::StateSpec spec;
    spec.dim = d;
    spec.noise = {{"white", 0.9}, {"dephase", 0.25}};
    return qstate::synthesize(spec);
}

std::vector<CountsRecord> exact_records(const qstate::BipartiteDensityMatrix& rho, int d,
                                        const PlanOptions& popts = {}) {
    SimOptions sim;
    sim.exact = true;
    return simulate_counts(rho, plan_full(d, popts), sim);
}

}  // namespace

TEST_CASE("plan sizes follow d + 8*C(d,2) and the option variants") {
    CHECK(plan_full(2).settings.size() == 10);
    CHECK(plan_full(4).settings.size() == 52);
    CHECK(plan_full(32).settings.size() == 4000);

    PlanOptions grid;
    grid.diagonal_grid = true;
    CHECK(plan_full(4, grid).settings.size() == 52 + 12);

    PlanOptions imag;
    imag.include_imag = true;
    CHECK(plan_full(4, imag).settings.size() == 52 + 8 * 6);

    CHECK_THROWS_AS(plan_full(1), ValidationError);
    CHECK_THROWS_AS(plan_full(0), ValidationError);
}

TEST_CASE("arm setting vectors realize the labeled projectors") {
    const int d = 4;
    ArmSetting z{BasisKind::Z, 2, 2, +1};
    Eigen::VectorXcd vz = z.vector(d);
    CHECK(std::abs(vz(2) - Cx(1, 0)) < 1e-15);
    CHECK(std::abs(vz.norm() - 1.0) < 1e-15);

    ArmSetting x{BasisKind::X, 0, 3, -1};
    Eigen::VectorXcd vx = x.vector(d);
    CHECK(std::abs(vx(0) - Cx(1 / std::sqrt(2.0), 0)) < 1e-15);
    CHECK(std::abs(vx(3) + Cx(1 / std::sqrt(2.0), 0)) < 1e-15);

    ArmSetting y{BasisKind::Y, 1, 2, +1};
    Eigen::VectorXcd vy = y.vector(d);
    CHECK(std::abs(vy(2) - Cx(0, 1 / std::sqrt(2.0))) < 1e-15);

    // the "+" Y vector is the +1 eigenvector of the standard sigma_y on (i,j)
    Eigen::MatrixXcd sy = Eigen::MatrixXcd::Zero(d, d);
    sy(1, 2) = Cx(0, -1);
    sy(2, 1) = Cx(0, 1);
    CHECK(std::abs((vy.adjoint() * sy * vy)(0) - Cx(1, 0)) < 1e-12);

    CHECK_THROWS_AS((ArmSetting{BasisKind::X, 2, 2, +1}.vector(d)), ValidationError);
    CHECK_THROWS_AS((ArmSetting{BasisKind::X, 0, 4, +1}.vector(d)), ValidationError);
    CHECK_THROWS_AS((ArmSetting{BasisKind::Z, 0, 0, -1}.vector(d)), ValidationError);

    CHECK(z.str() == "Z2");
    CHECK(x.str() == "X-0,3");
    CHECK(y.str() == "Y+1,2");
}

TEST_CASE("born probabilities match direct expectation values") {
    const int d = 3;
    const auto rho = demo_state(d);
    const ExperimentPlan plan = plan_full(d);
    for (const auto& setting : plan.settings) {
        Eigen::VectorXcd joint = Eigen::VectorXcd::Zero(d * d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) joint(a * d + b) = setting.vec_a(a) * setting.vec_b(b);
        const double direct = (joint.adjoint() * rho.entries * joint)(0).real();
        CHECK(born_probability(rho, setting) == doctest::Approx(direct).epsilon(1e-13));
    }
}

TEST_CASE("count simulation is deterministic per seed and exact mode rounds p*1e15") {
    const int d = 2;
    const auto rho = demo_state(d);
    const ExperimentPlan plan = plan_full(d);

    SimOptions a;
    a.seed = 42;
    const auto ra = simulate_counts(rho, plan, a);
    const auto rb = simulate_counts(rho, plan, a);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t k = 0; k < ra.size(); ++k) CHECK(ra[k].counts == rb[k].counts);

    SimOptions c;
    c.seed = 43;
    const auto rc = simulate_counts(rho, plan, c);
    bool any_diff = false;
    for (std::size_t k = 0; k < ra.size(); ++k) any_diff = any_diff || ra[k].counts != rc[k].counts;
    CHECK(any_diff);

    SimOptions ex;
    ex.exact = true;
    const auto re = simulate_counts(rho, plan, ex);
    for (std::size_t k = 0; k < re.size(); ++k) {
        const double p = born_probability(rho, plan.settings[k]);
        CHECK(re[k].counts == std::uint64_t(std::llround(p * 1e15)));
        CHECK(re[k].duration_s == ex.duration_s);
    }

    // counts concentrate near lambda = p * rate * efficiency * duration
    for (std::size_t k = 0; k < ra.size(); ++k) {
        const double lambda = born_probability(rho, plan.settings[k]) * a.rate_hz * a.efficiency * a.duration_s;
        if (lambda > 50.0) CHECK(std::abs(double(ra[k].counts) - lambda) < 8.0 * std::sqrt(lambda));
    }

    SimOptions bad;
    bad.rate_hz = -1.0;
    CHECK_THROWS_AS(simulate_counts(rho, plan, bad), ValidationError);
}

TEST_CASE("counts CSV round-trips byte-identically") {
    const int d = 4;
    const auto rho = demo_state(d);
    PlanOptions popts;
    popts.include_imag = true;
    SimOptions sim;
    sim.seed = 5;
    const auto records = simulate_counts(rho, plan_full(d, popts), sim);

    const std::string p1 = temp_path("pathcert_counts_a.csv");
    const std::string p2 = temp_path("pathcert_counts_b.csv");
    write_counts_csv(p1, records);
    const auto back = read_counts_csv(p1);
    REQUIRE(back.size() == records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
        CHECK(back[k].desc.label() == records[k].desc.label());
        CHECK(back[k].counts == records[k].counts);
        CHECK(back[k].duration_s == records[k].duration_s);
    }
    write_counts_csv(p2, back);
    std::ifstream f1(p1), f2(p2);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK(s1.rfind("label,i_a,j_a,basis_a,sign_a,i_b,j_b,basis_b,sign_b,counts,duration_s\n", 0) == 0);

    CHECK_THROWS_AS(read_counts_csv(temp_path("pathcert_missing.csv")), ValidationError);
    const std::string bad = temp_path("pathcert_bad.csv");
    {
        std::ofstream out(bad);
        out << "label,i_a,j_a,basis_a,sign_a,i_b,j_b,basis_b,sign_b,counts,duration_s\n";
        out << "Z0|Z0,0,0,Z,+,0,0,Z,+,notanumber,10\n";
    }
    CHECK_THROWS_AS(read_counts_csv(bad), ValidationError);
}

TEST_CASE("estimators reconstruct matrix elements from exact counts") {
    for (int d : {2, 4}) {
        const auto rho = demo_state(d);
        PlanOptions popts;
        popts.diagonal_grid = true;
        popts.include_imag = true;
        const auto records = exact_records(rho, d, popts);
        const CountsDataset data(records, d);
        CHECK(data.has_diagonal_grid());

        const auto diag = data.diagonals();
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                CHECK(std::abs(diag.p_ab(a, b) - qstate::matrix_element(rho, a, b, a, b).real()) < 1e-12);

        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                const auto est = data.offdiag(i, j);
                const Cx truth = qstate::matrix_element(rho, i, i, j, j);
                CHECK(std::abs(est.re - truth.real()) < 1e-12);
                REQUIRE(est.im.has_value());
                CHECK(std::abs(*est.im - truth.imag()) < 1e-12);
            }
    }
}

TEST_CASE("visibility is 1 when pure, rides the white-noise background, and tracks dephasing") {
    const int d = 4;
    {
        qstate::StateSpec spec;
        spec.dim = d;
        const auto records = exact_records(qstate::synthesize(spec), d);
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                CHECK(visibility(records, d, i, j) == doctest::Approx(1.0).epsilon(1e-10));
    }
    {
        // White noise keeps the coherence at p/d but adds (1-p)/d^2 of flat
        // background per path: V = p*d / (p*d + 1 - p).
        const double p = 0.7;
        qstate::StateSpec spec;
        spec.dim = d;
        spec.noise = {{"white", p}};
        const auto records = exact_records(qstate::synthesize(spec), d);
        const double expected = p * d / (p * d + 1.0 - p);
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                CHECK(visibility(records, d, i, j) == doctest::Approx(expected).epsilon(1e-10));
    }
    {
        qstate::StateSpec spec;
        spec.dim = d;
        spec.noise = {{"dephase", 0.162308272554426356}};
        const auto records = exact_records(qstate::synthesize(spec), d);
        CHECK(visibility(records, d, 0, 1) == doctest::Approx(0.974).epsilon(1e-9));
    }
    {
        // a pure |ii> component with no coherence: visibility 0
        qstate::StateSpec spec;
        spec.dim = d;
        spec.noise = {{"dephase", 1e6}};
        const auto records = exact_records(qstate::synthesize(spec), d);
        CHECK(std::abs(visibility(records, d, 0, 1)) < 1e-9);
    }
}

TEST_CASE("same-index normalization models unmeasured cross populations") {
    const int d = 4;
    const double eps = 2e-4;
    qstate::StateSpec spec;
    spec.dim = d;
    spec.noise = {{"crosstalk", eps}};
    const auto rho = qstate::synthesize(spec);
    const double cross_true = qstate::matrix_element(rho, 0, 1, 0, 1).real();

    PlanOptions grid;
    grid.diagonal_grid = true;
    const auto grid_records = exact_records(rho, d, grid);
    const auto same_records = exact_records(rho, d);

    EstimatorOptions honest;
    honest.assumed_cross = cross_true;
    const auto diag_grid = estimate_diagonals(grid_records, d);
    const auto diag_same = estimate_diagonals(same_records, d, honest);
    for (int i = 0; i < d; ++i) {
        CHECK(std::abs(diag_grid.p_same(i) - diag_same.p_same(i)) < 1e-12);
    }
    // assumed cross populations are filled in for the unmeasured pairs
    CHECK(diag_same.p_ab(0, 1) == doctest::Approx(cross_true).epsilon(1e-12));

    // ignoring real crosstalk under-counts C_T and inflates the estimates
    const auto diag_naive = estimate_diagonals(same_records, d);
    CHECK(diag_naive.p_same(0) > diag_grid.p_same(0));
}

TEST_CASE("missing and duplicate settings are reported") {
    const int d = 2;
    const auto rho = demo_state(d);
    auto records = exact_records(rho, d);

    auto dropped = records;
    dropped.pop_back();  // removes a Y sign combination
    CHECK_THROWS_AS(estimate_offdiag(dropped, d, 0, 1), IncompleteDataError);

    auto dup = records;
    dup.push_back(records.front());
    CHECK_THROWS_AS(CountsDataset(dup, d), ValidationError);

    auto no_diag = records;
    no_diag.erase(no_diag.begin());
    CHECK_THROWS_AS(CountsDataset(no_diag, d), IncompleteDataError);

    // dataset restricted to a smaller dimension rejects stray indices
    CHECK_THROWS_AS(CountsDataset(records, 1), ValidationError);
}

TEST_CASE("accidental rate is the product of singles rates and the window") {
    CHECK(accidental_rate(1e5, 2e5, 3e-9) == doctest::Approx(1e5 * 2e5 * 3e-9).epsilon(1e-15));
    CHECK_THROWS_AS(accidental_rate(-1.0, 1.0, 1e-9), ValidationError);
}
