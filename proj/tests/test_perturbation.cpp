#include <cmath>

#include "doctest.h"
#include "rvroot/errors.hpp"
#include "rvroot/oracles.hpp"
#include "rvroot/perturbation.hpp"

using namespace rvroot;

namespace {

Scenario baseline(double noise_power = 0.0) {
    Scenario s;
    s.array = UlaConfig{9, 0.5};
    s.angles_deg = {30.0, 50.0};
    s.snapshots = 200;
    s.noise_power = noise_power;
    s.seed = 7;
    return s;
}

struct Draw {
    ComplexMatrix clean;
    ComplexMatrix noise;  // unit power
};

Draw draw(const Scenario& s, std::uint64_t index = 0) {
    RandomStream rng = make_stream(s.seed, index);
    Draw d;
    d.clean = steering_matrix(s.array, s.angles_deg) * generate_sources(s, rng);
    d.noise = generate_noise(s.array, s.snapshots, 1.0, rng);
    return d;
}

SubspaceDecomp asymptotic_decomp(const UlaConfig& array, const std::vector<double>& angles) {
    const ComplexMatrix a = steering_matrix(array, angles);
    return extract_subspaces(real_covariance(a * a.adjoint()),
                             real_signal_dimension(static_cast<int>(angles.size())));
}

// |A K_m(r) G(r)| for 30 deg with 30/50 deg sources, L = 9, d/lambda = 0.5,
// evaluated independently in double precision with numpy (closed form).
constexpr double kDenominator30 = 52.990708140696626;

} // namespace

TEST_CASE("conjugate extension layout and preconditions") {
    const Draw d = draw(baseline());
    const ComplexMatrix xv = conjugate_extend(d.clean);
    REQUIRE(xv.cols() == 400);
    CHECK((xv.rightCols(200) - d.clean.conjugate()).norm() == 0.0);
    CHECK_THROWS_AS(conjugate_extension(d.clean.leftCols(4), 4), ContractViolation);
}

TEST_CASE("SVD of X_v matches the EVD of Re(X X^H)") {
    const Draw d = draw(baseline());
    const ConjugateExtension ext = conjugate_extension(d.clean, 4);
    const ComplexMatrix lhs = ext.extended * ext.extended.adjoint();
    const RealMatrix rhs = 2.0 * (d.clean * d.clean.adjoint()).real();
    CHECK((lhs - rhs.cast<Complex>()).norm() / rhs.norm() < 1e-12);

    const SubspaceDecomp decomp = extract_subspaces(real_covariance(sample_covariance(d.clean)), 4);
    const auto angles = principal_angles(ext.noise_left, decomp.noise_basis.cast<Complex>());
    CHECK(*std::max_element(angles.begin(), angles.end()) < 1e-8);
    const RealVector lam = 2.0 * 200 * decomp.signal_eigenvalues;
    CHECK((ext.signal_values.cwiseAbs2() - lam).norm() / lam.norm() < 1e-8);
    CHECK(ext.noise_values.maxCoeff() < 1e-8 * ext.signal_values.maxCoeff());
    // Noise basis is real.
    CHECK(ext.noise_left.imag().norm() == 0.0);
}

TEST_CASE("subspace perturbation agrees with finite differences; sign flip is caught") {
    const Draw d = draw(baseline());
    const ConjugateExtension ext = conjugate_extension(d.clean, 4);
    const RealMatrix delta = noise_subspace_perturbation(ext, conjugate_extend(d.noise));
    CHECK(subspace_fd_error(ext, d.clean, d.noise, delta) < 1e-3);
    CHECK(subspace_fd_error(ext, d.clean, d.noise, -delta) > 1.0);
}

TEST_CASE("noise_subspace_perturbation requires [N | N*]") {
    const Draw d = draw(baseline());
    const ConjugateExtension ext = conjugate_extension(d.clean, 4);
    ComplexMatrix nv = conjugate_extend(d.noise);
    nv(0, 250) += 1.0;
    CHECK_THROWS_AS(noise_subspace_perturbation(ext, nv), ContractViolation);
}

TEST_CASE("power vector and its derivative") {
    const Complex z(0.3, 0.8);
    const ComplexVector p = power_vector(z, 5);
    const ComplexVector p1 = power_vector_derivative(z, 5);
    CHECK(std::abs(p(4) - z * z * z * z) < 1e-15);
    CHECK(std::abs(p1(4) - 4.0 * z * z * z) < 1e-15);
    CHECK(p1(0) == Complex(0.0));
}

TEST_CASE("closed-form and deflation denominators agree") {
    for (int l = 5; l <= 12; ++l) {
        const UlaConfig array{l, 0.5};
        const std::vector<double> angles = l < 7 ? std::vector<double>{25.0} : std::vector<double>{-20.0, 45.0};
        const SubspaceDecomp decomp = asymptotic_decomp(array, angles);
        for (double theta : angles) {
            const FactoredSpectrum fs = factor_spectrum(decomp, source_root(array, theta), array);
            CHECK(std::abs(fs.gamma_true() - fs.deflation_true) < 1e-6 * std::abs(fs.gamma_true()));
            CHECK(std::abs(fs.gamma_mirror() - fs.deflation_mirror) < 1e-6 * std::abs(fs.gamma_mirror()));
            CHECK(std::abs(fs.gamma_true().imag()) < 1e-8 * std::abs(fs.gamma_true()));
        }
    }
}

TEST_CASE("regression: denominator magnitude for the 30 deg source, L = 9") {
    const UlaConfig array{9, 0.5};
    const FactoredSpectrum fs = factor_spectrum(asymptotic_decomp(array, {30.0, 50.0}), source_root(array, 30.0), array);
    CHECK(fs.correction == 1.0);
    CHECK(std::abs(fs.deflation_true) == doctest::Approx(kDenominator30).epsilon(1e-8));
}

TEST_CASE("even arrays carry the real-pair correction") {
    const UlaConfig array{8, 0.5};
    const Complex r = source_root(array, 30.0);
    const FactoredSpectrum fs = factor_spectrum(asymptotic_decomp(array, {30.0, 50.0}), r, array);
    REQUIRE(fs.real_pair.has_value());
    const double a = fs.real_pair->inner;
    CHECK(std::abs(a) <= 1.0);
    CHECK(fs.correction == doctest::Approx(a * a - 2.0 * a * r.real() + 1.0));
    const double b = fs.real_pair->outer;
    CHECK(fs.correction_outer == doctest::Approx(b * b - 2.0 * b * r.real() + 1.0));
    // gamma is the complete denominator including the pair factor.
    CHECK(std::abs(fs.gamma_true() - fs.deflation_true) < 1e-6 * std::abs(fs.deflation_true));
}

TEST_CASE("even_array_correction") {
    RootDiagnostics odd;
    odd.all_roots.assign(16, Complex(0.5));
    CHECK(even_array_correction(odd, Complex(0.0, 1.0)) == 1.0);

    RootDiagnostics even;
    even.all_roots.assign(14, Complex(0.5));
    CHECK_THROWS_AS(even_array_correction(even, Complex(0.0, 1.0)), TheoremViolation);
    even.real_axis_pairs.push_back({0.5, 2.0});
    CHECK(even_array_correction(even, Complex(0.0, 1.0)) == doctest::Approx(1.25));
}

TEST_CASE("factor_spectrum rejects a point that is not a root") {
    const UlaConfig array{9, 0.5};
    CHECK_THROWS_AS(factor_spectrum(asymptotic_decomp(array, {30.0, 50.0}), source_root(array, 40.0), array),
                    ContractViolation);
}

TEST_CASE("predicted deviation matches the estimator to first order") {
    const Scenario s = baseline();
    const Draw d = draw(s);
    const PerturbationModel model(s, d.clean);
    const ComplexMatrix nv = conjugate_extend(d.noise);
    double previous = 1e300;
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        const EstimationResult res = estimate(d.clean + eps * d.noise, 2, s.array);
        double worst = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
            const auto& src = model.sources()[k];
            const double meas_t = deg_to_rad(res.estimate.raw_candidates_deg[2 * k] - src.theta_deg);
            const double meas_m = deg_to_rad(res.estimate.raw_candidates_deg[2 * k + 1] + src.theta_deg);
            const double pred_t = eps * predicted_deviation(src.true_row, nv);
            const double pred_m = eps * predicted_deviation(src.mirror_row, nv);
            worst = std::max({worst, std::abs(meas_t / pred_t - 1.0), std::abs(meas_m / pred_m - 1.0)});
        }
        CHECK(worst < previous);
        previous = worst;
    }
    CHECK(previous < 0.05);
}

TEST_CASE("theoretical MSE is linear in the noise power and mirrors match") {
    const Scenario s = baseline();
    const PerturbationModel model(s, draw(s).clean);
    for (const auto& src : model.sources()) {
        const double m1 = theoretical_mse(src.true_row, 0.1);
        CHECK(theoretical_mse(src.true_row, 0.2) == doctest::Approx(2.0 * m1));
        CHECK(theoretical_mse(src.mirror_row, 0.1) == doctest::Approx(m1).epsilon(1e-6));
    }
    CHECK_THROWS_AS(theoretical_mse(model.sources()[0].true_row, -1.0), ContractViolation);
}

TEST_CASE("Monte Carlo mean of squared deviations approaches the closed-form MSE") {
    const double sigma2 = 0.1;
    const Scenario s = baseline(sigma2);
    const PerturbationModel model(s, draw(s).clean);
    RandomStream rng = make_stream(123, 0);
    const int n = 4000;
    double acc_t = 0.0, acc_m = 0.0;
    for (int i = 0; i < n; ++i) {
        const PerturbationReport rep = model.report(generate_noise(s.array, s.snapshots, sigma2, rng), sigma2);
        acc_t += rep.sources[0].predicted_dtheta_rad * rep.sources[0].predicted_dtheta_rad;
        acc_m += rep.sources[0].predicted_dphi_rad * rep.sources[0].predicted_dphi_rad;
    }
    const double theory = theoretical_mse(model.sources()[0].true_row, sigma2);
    CHECK(acc_t / n == doctest::Approx(theory).epsilon(0.1));
    CHECK(acc_m / n == doctest::Approx(theory).epsilon(0.1));
}

TEST_CASE("full_report uses the scenario noise power") {
    const Scenario s = baseline(0.05);
    const Draw d = draw(s);
    const PerturbationReport rep = full_report(s, d.clean, d.noise * std::sqrt(0.05));
    REQUIRE(rep.sources.size() == 2);
    CHECK(rep.sources[1].theta_deg == 50.0);
    CHECK(rep.sources[0].theoretical_mse_true_rad2 > 0.0);
}
