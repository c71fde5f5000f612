#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rvroot/numerics.hpp"

namespace rvroot {

/// Uniform linear array geometry.
struct UlaConfig {
    int elements = 9;            ///< L >= 3
    double spacing_ratio = 0.5;  ///< d / lambda in (0, 0.5]

    void validate() const;
};

/// Full description of one narrowband far-field experiment.
struct Scenario {
    UlaConfig array;
    std::vector<double> angles_deg;  ///< true DOAs, (-90, 90)
    int snapshots = 200;             ///< M
    double noise_power = 0.0;        ///< sigma_n^2, per complex sample
    std::uint64_t seed = 0;

    int num_sources() const noexcept { return static_cast<int>(angles_deg.size()); }
    void validate() const;
};

struct SnapshotData {
    ComplexMatrix clean;     ///< X = A(theta) S, L x M
    ComplexMatrix noise;     ///< N, L x M
    ComplexMatrix observed;  ///< X + N
};

/// Random stream type used throughout. One stream per trial; see make_stream.
using RandomStream = std::mt19937_64;

/// Deterministic stream for trial `index` of a run seeded with `seed`.
/// Seeding goes through std::seed_seq over the four 32-bit halves of
/// (seed, index), so streams for distinct indices are decorrelated and
/// do not depend on execution order.
RandomStream make_stream(std::uint64_t seed, std::uint64_t index);

/// sigma_n^2 = 10^(-SNR/10) for unit-power sources.
double noise_power_from_snr_db(double snr_db);

double deg_to_rad(double deg) noexcept;
double rad_to_deg(double rad) noexcept;

/// a(theta)_i = exp(-j 2 pi (d/lambda) sin(theta) i), i = 0..L-1.
ComplexVector steering_vector(const UlaConfig& array, double theta_deg);

/// Columns are steering vectors, one per angle.
ComplexMatrix steering_matrix(const UlaConfig& array, std::span<const double> angles_deg);

/// K x M unit-power circular complex Gaussian source waveforms.
ComplexMatrix generate_sources(const Scenario& scenario, RandomStream& rng);

/// L x M circular complex Gaussian noise; real and imaginary parts each
/// have variance noise_power / 2. No draws are consumed when noise_power is 0.
ComplexMatrix generate_noise(const UlaConfig& array, int snapshots, double noise_power, RandomStream& rng);

/// Sources are drawn before noise from the same stream.
SnapshotData synthesize(const Scenario& scenario, RandomStream& rng);

/// (1/M) X X^H.
ComplexMatrix sample_covariance(const ComplexMatrix& x);

/// |a(theta)^H R a(theta)|^2.
double cbf_spectrum(const ComplexMatrix& r, const UlaConfig& array, double theta_deg);

} // namespace rvroot
