#include "rvroot/array_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rvroot/errors.hpp"

namespace rvroot {

namespace {

// Sources closer than this to broadside, or to the mirror of another source,
// cannot be separated by the real covariance.
constexpr double kMinMirrorSeparationDeg = 0.1;

} // namespace

void UlaConfig::validate() const {
    if (elements < 3) {
        throw ContractViolation("elements must be >= 3, got " + std::to_string(elements));
    }
    if (!(spacing_ratio > 0.0 && spacing_ratio <= 0.5)) {
        throw ContractViolation("spacing_ratio must lie in (0, 0.5], got " + std::to_string(spacing_ratio));
    }
}

void Scenario::validate() const {
    array.validate();
    const int k = num_sources();
    if (k < 1) throw ContractViolation("scenario needs at least one source angle");
    if (k > (array.elements - 1) / 2) {
        throw ContractViolation("source count " + std::to_string(k) + " exceeds floor((L-1)/2) = " +
                                std::to_string((array.elements - 1) / 2) + " for L = " +
                                std::to_string(array.elements));
    }
    for (int i = 0; i < k; ++i) {
        const double a = angles_deg[static_cast<std::size_t>(i)];
        if (!(std::abs(a) < 90.0)) {
            throw ContractViolation("angle " + std::to_string(a) + " deg outside (-90, 90)");
        }
        if (std::abs(a) < kMinMirrorSeparationDeg) {
            throw ContractViolation("angle " + std::to_string(a) +
                                    " deg is within 0.1 deg of broadside where true and mirror roots coincide");
        }
        for (int j = 0; j < i; ++j) {
            const double b = angles_deg[static_cast<std::size_t>(j)];
            if (std::abs(a - b) < kMinMirrorSeparationDeg) {
                throw ContractViolation("angles must be pairwise distinct");
            }
            if (std::abs(a + b) < kMinMirrorSeparationDeg) {
                throw ContractViolation("angles " + std::to_string(b) + " and " + std::to_string(a) +
                                        " are mirror images; the real covariance cannot separate them");
            }
        }
    }
    if (snapshots < 1) throw ContractViolation("snapshots must be >= 1");
    if (!(noise_power >= 0.0) || !std::isfinite(noise_power)) {
        throw ContractViolation("noise_power must be finite and >= 0");
    }
}

RandomStream make_stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return RandomStream(seq);
}

double noise_power_from_snr_db(double snr_db) {
    return std::pow(10.0, -snr_db / 10.0);
}

double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

ComplexVector steering_vector(const UlaConfig& array, double theta_deg) {
    if (!(std::abs(theta_deg) < 90.0)) {
        throw DomainError("steering_vector: |theta| must be < 90 deg, got " + std::to_string(theta_deg));
    }
    const double step = -2.0 * std::numbers::pi * array.spacing_ratio * std::sin(deg_to_rad(theta_deg));
    ComplexVector a(array.elements);
    for (int i = 0; i < array.elements; ++i) a(i) = std::polar(1.0, step * i);
    return a;
}

ComplexMatrix steering_matrix(const UlaConfig& array, std::span<const double> angles_deg) {
    ComplexMatrix a(array.elements, static_cast<Eigen::Index>(angles_deg.size()));
    for (std::size_t k = 0; k < angles_deg.size(); ++k) {
        a.col(static_cast<Eigen::Index>(k)) = steering_vector(array, angles_deg[k]);
    }
    return a;
}

namespace {

ComplexMatrix circular_gaussian(Eigen::Index rows, Eigen::Index cols, double power, RandomStream& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(power / 2.0));
    ComplexMatrix m(rows, cols);
    // Column-major fill: each snapshot gets consecutive draws.
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(r, c) = Complex(re, im);
        }
    }
    return m;
}

} // namespace

ComplexMatrix generate_sources(const Scenario& scenario, RandomStream& rng) {
    return circular_gaussian(scenario.num_sources(), scenario.snapshots, 1.0, rng);
}

ComplexMatrix generate_noise(const UlaConfig& array, int snapshots, double noise_power, RandomStream& rng) {
    if (!(noise_power >= 0.0)) {
        throw ContractViolation("generate_noise: noise_power must be >= 0");
    }
    if (noise_power == 0.0) return ComplexMatrix::Zero(array.elements, snapshots);
    return circular_gaussian(array.elements, snapshots, noise_power, rng);
}

SnapshotData synthesize(const Scenario& scenario, RandomStream& rng) {
    scenario.validate();
    const ComplexMatrix s = generate_sources(scenario, rng);
    SnapshotData data;
    data.clean = steering_matrix(scenario.array, scenario.angles_deg) * s;
    data.noise = generate_noise(scenario.array, scenario.snapshots, scenario.noise_power, rng);
    data.observed = data.clean + data.noise;
    return data;
}

ComplexMatrix sample_covariance(const ComplexMatrix& x) {
    if (x.cols() < 1) throw ContractViolation("sample_covariance: need at least one snapshot");
    ComplexMatrix r = (x * x.adjoint()) / static_cast<double>(x.cols());
    // Exact Hermitian symmetry regardless of BLAS rounding order.
    r = (0.5 * (r + r.adjoint())).eval();
    return r;
}

double cbf_spectrum(const ComplexMatrix& r, const UlaConfig& array, double theta_deg) {
    if (r.rows() != array.elements || r.cols() != array.elements) {
        throw ContractViolation("cbf_spectrum: covariance must be L x L");
    }
    const ComplexVector a = steering_vector(array, theta_deg);
    const Complex q = a.dot(r * a);  // dot conjugates the first argument
    return std::norm(q);
}

} // namespace rvroot
