#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rvroot/array_model.hpp"
#include "rvroot/errors.hpp"

using namespace rvroot;

namespace {

Scenario reference_scenario() {
    Scenario s;
    s.array = UlaConfig{9, 0.5};
    s.angles_deg = {30.0, 50.0};
    s.snapshots = 200;
    s.seed = 11;
    return s;
}

} // namespace

TEST_CASE("steering vector phase progression") {
    const UlaConfig array{9, 0.5};
    const ComplexVector a = steering_vector(array, 30.0);
    // sin 30 = 1/2, so consecutive elements differ by -pi/2.
    for (int i = 0; i < 9; ++i) {
        CHECK(std::abs(a(i) - std::polar(1.0, -std::numbers::pi / 2 * i)) < 1e-14);
    }
    CHECK(std::abs(steering_vector(array, 0.0)(8) - Complex(1.0)) < 1e-15);
}

TEST_CASE("mirror steering vector is the conjugate") {
    const UlaConfig array{7, 0.4};
    const ComplexVector a = steering_vector(array, 37.0);
    const ComplexVector b = steering_vector(array, -37.0);
    CHECK((a.conjugate() - b).norm() < 1e-14);
}

TEST_CASE("steering vector domain") {
    const UlaConfig array;
    CHECK_THROWS_AS(steering_vector(array, 90.0), DomainError);
    CHECK_THROWS_AS(steering_vector(array, -91.0), DomainError);
    CHECK_NOTHROW(steering_vector(array, 89.9));
}

TEST_CASE("array and scenario validation") {
    CHECK_THROWS_AS((UlaConfig{2, 0.5}.validate()), ContractViolation);
    CHECK_THROWS_AS((UlaConfig{9, 0.6}.validate()), ContractViolation);
    CHECK_THROWS_AS((UlaConfig{9, 0.0}.validate()), ContractViolation);

    Scenario s = reference_scenario();
    CHECK_NOTHROW(s.validate());
    s.angles_deg = {10.0, 20.0, 30.0, 40.0, 50.0};  // K > floor((L-1)/2) = 4
    CHECK_THROWS_AS(s.validate(), ContractViolation);
    s.angles_deg = {30.0, -30.0};
    CHECK_THROWS_AS(s.validate(), ContractViolation);
    s.angles_deg = {0.0};
    CHECK_THROWS_AS(s.validate(), ContractViolation);
    s.angles_deg = {30.0, 30.0};
    CHECK_THROWS_AS(s.validate(), ContractViolation);
    s = reference_scenario();
    s.noise_power = -1.0;
    CHECK_THROWS_AS(s.validate(), ContractViolation);
}

TEST_CASE("noise power from SNR") {
    CHECK(noise_power_from_snr_db(0.0) == doctest::Approx(1.0));
    CHECK(noise_power_from_snr_db(10.0) == doctest::Approx(0.1));
    CHECK(noise_power_from_snr_db(20.0) == doctest::Approx(0.01));
}

TEST_CASE("synthesis is deterministic per stream and consumes no noise draws when noiseless") {
    const Scenario s = reference_scenario();
    RandomStream r1 = make_stream(s.seed, 3);
    RandomStream r2 = make_stream(s.seed, 3);
    const SnapshotData a = synthesize(s, r1);
    const SnapshotData b = synthesize(s, r2);
    CHECK((a.observed - b.observed).norm() == 0.0);
    CHECK(a.noise.norm() == 0.0);
    CHECK(r1() == r2());

    RandomStream r3 = make_stream(s.seed, 4);
    CHECK((synthesize(s, r3).clean - a.clean).norm() > 1.0);
}

TEST_CASE("sources come before noise in the stream") {
    Scenario noisy = reference_scenario();
    noisy.noise_power = 0.5;
    RandomStream r1 = make_stream(1, 0);
    RandomStream r2 = make_stream(1, 0);
    const SnapshotData a = synthesize(noisy, r1);
    const SnapshotData b = synthesize(reference_scenario(), r2);
    CHECK((a.clean - b.clean).norm() == 0.0);
}

TEST_CASE("noise statistics") {
    const UlaConfig array{8, 0.5};
    RandomStream rng = make_stream(5, 0);
    const double power = 0.25;
    const ComplexMatrix n = generate_noise(array, 20000, power, rng);
    const double mean_power = n.cwiseAbs2().mean();
    CHECK(mean_power == doctest::Approx(power).epsilon(0.02));
    CHECK(std::abs(n.mean()) < 0.01);
    // Circularity: E[n^2] = 0.
    CHECK(std::abs(n.array().square().mean()) < 0.01);
}

TEST_CASE("sample covariance is Hermitian and CBF peaks at a lone source") {
    Scenario s = reference_scenario();
    s.angles_deg = {25.0};
    RandomStream rng = make_stream(2, 0);
    const SnapshotData d = synthesize(s, rng);
    const ComplexMatrix r = sample_covariance(d.observed);
    CHECK((r - r.adjoint()).norm() == 0.0);
    CHECK(cbf_spectrum(r, s.array, 25.0) > cbf_spectrum(r, s.array, -25.0));
    CHECK(cbf_spectrum(r, s.array, 25.0) > cbf_spectrum(r, s.array, 40.0));
    CHECK_THROWS_AS(cbf_spectrum(r, UlaConfig{5, 0.5}, 0.0), ContractViolation);
}
