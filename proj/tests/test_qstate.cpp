#include <doctest.h>

#include <bit>
#include <cmath>
#include <complex>

#include "pathcert/qstate.hpp"
#include "pathcert/rng.hpp"

using namespace pathcert;
using namespace pathcert::qstate;

namespace {

BipartiteDensityMatrix isotropic(int d, double p) {
    return apply_white_noise(density_matrix(max_entangled(d)), p);
}

}  // namespace

TEST_CASE("maximally entangled state has uniform Schmidt structure") {
    for (int d : {2, 3, 4, 8, 32}) {
        const PureState psi = max_entangled(d);
        psi.validate();
        CHECK(psi.amplitudes.size() == d * d);
        const BipartiteDensityMatrix rho = density_matrix(psi);
        rho.validate();
        CHECK(fidelity_to_max_entangled(rho) == doctest::Approx(1.0).epsilon(1e-12));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const Cx m = matrix_element(rho, i, i, j, j);
                CHECK(std::abs(m - Cx(1.0 / d, 0.0)) < 1e-12);
            }
        CHECK(entanglement_entropy_pure(psi) == doctest::Approx(std::log2(double(d))).epsilon(1e-12));
    }
}

TEST_CASE("weighted entangled states normalize and reject empty input") {
    Eigen::VectorXcd amps(2);
    amps << Cx(3.0, 0.0), Cx(4.0, 0.0);
    const PureState psi = weighted_entangled(amps);
    CHECK(std::abs(psi.amplitudes(0) - Cx(0.6, 0.0)) < 1e-12);
    // Schmidt weights 0.36/0.64
    CHECK(entanglement_entropy_pure(psi) ==
          doctest::Approx(-0.36 * std::log2(0.36) - 0.64 * std::log2(0.64)).epsilon(1e-12));
    Eigen::VectorXcd zeros = Eigen::VectorXcd::Zero(3);
    CHECK_THROWS_AS(weighted_entangled(zeros), ValidationError);
}

TEST_CASE("white noise interpolates fidelity as p + (1-p)/d^2") {
    for (int d : {2, 5, 8, 32}) {
        for (double p : {0.0, 0.25, 0.6, 0.933, 1.0}) {
            const BipartiteDensityMatrix rho = isotropic(d, p);
            const double expected = p + (1.0 - p) / (double(d) * d);
            CHECK(fidelity_to_max_entangled(rho) == doctest::Approx(expected).epsilon(1e-12));
            CHECK(std::abs(rho.entries.trace().real() - 1.0) < 1e-12);
            // populations: same-index p/d + (1-p)/d^2, cross (1-p)/d^2
            const double same = p / d + (1.0 - p) / (double(d) * d);
            const double cross = (1.0 - p) / (double(d) * d);
            CHECK(std::abs(matrix_element(rho, 0, 0, 0, 0) - Cx(same, 0)) < 1e-12);
            if (d > 1) CHECK(std::abs(matrix_element(rho, 0, 1, 0, 1) - Cx(cross, 0)) < 1e-12);
        }
        CHECK_THROWS_AS(apply_white_noise(isotropic(d, 1.0), 1.5), ValidationError);
        CHECK_THROWS_AS(apply_white_noise(isotropic(d, 1.0), -0.1), ValidationError);
    }
}

TEST_CASE("crosstalk raises cross populations to eps/(1+(d^2-d)eps)") {
    const int d = 32;
    const double eps = 4.49e-5;
    const BipartiteDensityMatrix rho = apply_crosstalk(density_matrix(max_entangled(d)), eps);
    const double cross = eps / (1.0 + (double(d) * d - d) * eps);
    CHECK(std::abs(matrix_element(rho, 0, 1, 0, 1).real() - cross) < 1e-15);
    CHECK(std::abs(matrix_element(rho, 0, 1, 0, 1).real() - 4.2985396070694414e-5) < 1e-15);
    CHECK(std::abs(rho.entries.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("dephasing damps pair coherences by exp(-sigma^2) and keeps populations") {
    const int d = 4;
    const double sigma = 0.162308272554426356;  // tuned so exp(-sigma^2) = 0.974
    const BipartiteDensityMatrix rho = apply_dephasing(density_matrix(max_entangled(d)), sigma);
    CHECK(std::abs(matrix_element(rho, 0, 0, 1, 1).real() - 0.974 / d) < 1e-12);
    CHECK(std::abs(matrix_element(rho, 0, 0, 0, 0).real() - 1.0 / d) < 1e-12);
    // single differing arm gets one factor exp(-sigma^2/2) (zero here anyway)
    CHECK(std::abs(matrix_element(rho, 0, 0, 0, 1)) < 1e-15);
}

TEST_CASE("fourier and product bases are unbiased against the computational basis") {
    for (int d : {2, 3, 4, 8, 16, 32}) {
        const Basis comp = computational_basis(d);
        const Basis four = fourier_basis(d);
        four.validate();
        CHECK(unbiasedness(four, comp) < 1e-12);
    }
    for (int n = 1; n <= 5; ++n) {
        const int d = 1 << n;
        const Basis mub = product_mub_basis(n);
        mub.validate();
        CHECK(unbiasedness(mub, computational_basis(d)) < 1e-12);
        // entries are +-1/sqrt d with the parity sign convention
        for (int k = 0; k < d; ++k)
            for (int j = 0; j < d; ++j) {
                const double sign = (std::popcount(unsigned(k & j)) % 2 == 0) ? 1.0 : -1.0;
                CHECK(std::abs(mub.vectors(k, j) - Cx(sign / std::sqrt(double(d)), 0.0)) < 1e-12);
            }
    }
}

TEST_CASE("matrix_element checks index ranges") {
    const BipartiteDensityMatrix rho = density_matrix(max_entangled(2));
    CHECK_THROWS_AS(matrix_element(rho, 0, 0, 0, 2), ValidationError);
    CHECK_THROWS_AS(matrix_element(rho, -1, 0, 0, 0), ValidationError);
}

TEST_CASE("synthesize applies the noise stack in order and round-trips JSON") {
    StateSpec spec;
    spec.dim = 4;
    spec.noise = {{"white", 0.9}, {"dephase", 0.3}, {"crosstalk", 1e-4}};
    spec.seed = 7;
    const BipartiteDensityMatrix rho = synthesize(spec);
    rho.validate();

    // order matters: dephasing after white noise damps only the coherences
    BipartiteDensityMatrix manual = apply_white_noise(density_matrix(max_entangled(4)), 0.9);
    manual = apply_dephasing(manual, 0.3);
    manual = apply_crosstalk(manual, 1e-4);
    CHECK((rho.entries - manual.entries).cwiseAbs().maxCoeff() < 1e-14);

    const std::string text = state_spec_to_json_text(spec);
    const StateSpec back = state_spec_from_json_text(text);
    CHECK(back.dim == spec.dim);
    REQUIRE(back.noise.size() == 3);
    CHECK(back.noise[1].kind == "dephase");
    CHECK(back.noise[1].value == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(back.seed == 7);
    CHECK(state_spec_to_json_text(back) == text);

    spec.noise = {{"sparkle", 0.1}};
    CHECK_THROWS_AS(synthesize(spec), ValidationError);
}

TEST_CASE("custom amplitudes flow through StateSpec") {
    StateSpec spec;
    spec.dim = 2;
    spec.amplitudes = std::vector<Cx>{Cx(0.6, 0.0), Cx(0.8, 0.0)};
    const BipartiteDensityMatrix rho = synthesize(spec);
    CHECK(std::abs(matrix_element(rho, 0, 0, 0, 0).real() - 0.36) < 1e-12);
    CHECK(std::abs(matrix_element(rho, 0, 0, 1, 1).real() - 0.48) < 1e-12);
}

TEST_CASE("splitmix streams are deterministic and decorrelated by index") {
    SplitMix64 a = stream_for(1, 5);
    SplitMix64 b = stream_for(1, 5);
    SplitMix64 c = stream_for(1, 6);
    const std::uint64_t a1 = a.next();
    CHECK(a1 == b.next());
    CHECK(a1 != c.next());

    // Poisson sampling: zero and tiny means
    SplitMix64 r = stream_for(9, 0);
    CHECK(sample_poisson(r, 0.0) == 0);
    double mean = 0.0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) mean += double(sample_poisson(r, 100.0));
    mean /= trials;
    CHECK(std::abs(mean - 100.0) < 5.0 * 10.0 / std::sqrt(double(trials)));

    // large means switch to the normal approximation but stay near lambda
    SplitMix64 big = stream_for(9, 1);
    const double lambda = 3.0e6;
    const std::uint64_t n = sample_poisson(big, lambda);
    CHECK(std::abs(double(n) - lambda) < 6.0 * std::sqrt(lambda));
}
