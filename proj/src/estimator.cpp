#include "rvroot/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rvroot/errors.hpp"

namespace rvroot {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kGapTol = 1e-12;
constexpr double kRealAxisTol = 1e-6;
constexpr double kUnitDiskSlack = 1e-6;
constexpr double kBandHalfWidth = 0.5;
constexpr double kDuplicateArgTol = 1e-6;
constexpr double kCbfTieTol = 1e-12;
constexpr double kPartnerTol = 1e-5;

// Rounding errors of the two members of a near-double root {z, 1/z*} are
// amplified in opposite directions; their mean argument is not amplified.
Complex pair_averaged(Complex z, std::span<const Complex> roots) {
    const Complex target = 1.0 / std::conj(z);
    const Complex* partner = nullptr;
    double best = kPartnerTol;
    for (const auto& w : roots) {
        if (&w == &z || w == z) continue;
        const double dist = std::abs(w - target);
        if (dist < best) {
            best = dist;
            partner = &w;
        }
    }
    if (partner == nullptr) return z;
    const double mean_arg = std::arg(z) + 0.5 * std::arg(*partner / z);
    return std::polar(std::abs(z), mean_arg);
}

bool on_real_axis(Complex z) {
    return std::abs(z.imag()) < kRealAxisTol * std::abs(z);
}

std::vector<RealAxisPair> pair_real_roots_impl(std::span<const Complex> roots) {
    std::vector<double> reals;
    for (const auto& z : roots) {
        if (on_real_axis(z)) reals.push_back(z.real());
    }
    std::sort(reals.begin(), reals.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    std::vector<bool> used(reals.size(), false);
    std::vector<RealAxisPair> pairs;
    for (std::size_t i = 0; i < reals.size(); ++i) {
        if (used[i] || std::abs(reals[i]) > 1.0 + kUnitDiskSlack || reals[i] == 0.0) continue;
        const double target = 1.0 / reals[i];
        std::size_t best = reals.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < reals.size(); ++j) {
            if (j == i || used[j]) continue;
            const double dist = std::abs(reals[j] - target);
            if (dist < best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        if (best == reals.size() || best_dist > 1e-3 * std::abs(target)) continue;
        used[i] = used[best] = true;
        pairs.push_back({reals[i], reals[best]});
    }
    return pairs;
}

} // namespace

std::vector<RealAxisPair> detect_real_axis_pairs(std::span<const Complex> roots) {
    return pair_real_roots_impl(roots);
}

int real_signal_dimension(int num_sources) noexcept {
    return 2 * num_sources;
}

RealSymmetricMatrix real_covariance(const ComplexMatrix& r) {
    if (r.rows() != r.cols()) {
        throw ContractViolation("real_covariance: matrix is not square");
    }
    const double scale = std::max(r.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const double skew = (r - r.adjoint()).cwiseAbs().maxCoeff();
    if (skew > kHermitianTol * scale) {
        throw ContractViolation("real_covariance: input is not Hermitian (relative skew " +
                                std::to_string(skew / scale) + ")");
    }
    RealMatrix re = r.real();
    re = (0.5 * (re + re.transpose())).eval();
    return RealSymmetricMatrix(std::move(re));
}

SubspaceDecomp extract_subspaces(const RealSymmetricMatrix& r_real, int signal_dim) {
    const auto n = static_cast<int>(r_real.order());
    if (signal_dim < 1 || signal_dim >= n) {
        throw ContractViolation("extract_subspaces: signal dimension " + std::to_string(signal_dim) +
                                " must lie in [1, " + std::to_string(n - 1) + "]");
    }
    const EvdResult evd = symmetric_evd(r_real);
    SubspaceDecomp out;
    out.signal_basis = evd.eigenvectors.leftCols(signal_dim);
    out.noise_basis = evd.eigenvectors.rightCols(n - signal_dim);
    out.signal_eigenvalues = evd.eigenvalues.head(signal_dim);
    out.noise_eigenvalues = evd.eigenvalues.tail(n - signal_dim);
    const double lmax = std::max(std::abs(evd.eigenvalues(0)), std::numeric_limits<double>::min());
    if (evd.eigenvalues(signal_dim - 1) - evd.eigenvalues(signal_dim) < kGapTol * lmax) {
        out.degenerate_gap = true;
        out.warnings.push_back("eigenvalues " + std::to_string(signal_dim) + " and " +
                               std::to_string(signal_dim + 1) + " are degenerate; subspace split is ill-defined");
    }
    return out;
}

ComplexPolynomial build_polynomial_from_projector(const RealMatrix& c) {
    const auto n = static_cast<int>(c.rows());
    std::vector<Complex> coeffs(static_cast<std::size_t>(2 * n - 1), 0.0);
    for (int m = -(n - 1); m <= n - 1; ++m) {
        double diag_sum = 0.0;
        for (int i = std::max(0, -m); i < n && i + m < n; ++i) diag_sum += c(i, i + m);
        coeffs[static_cast<std::size_t>(n - 1 + m)] = diag_sum;
    }
    return ComplexPolynomial(std::move(coeffs));
}

ComplexPolynomial build_polynomial(const SubspaceDecomp& decomp) {
    return build_polynomial_from_projector(decomp.noise_projector());
}

RootDiagnostics classify_roots(std::span<const Complex> roots, int num_sources, const UlaConfig& array,
                               Complex leading) {
    const std::size_t expected = 2 * static_cast<std::size_t>(array.elements - 1);
    if (roots.size() > expected) {
        throw ContractViolation("classify_roots: expected at most " + std::to_string(expected) + " roots, got " +
                                std::to_string(roots.size()));
    }
    RootDiagnostics diag;
    diag.all_roots.assign(roots.begin(), roots.end());
    diag.roots_at_infinity = static_cast<int>(expected - roots.size());
    diag.leading_coefficient = leading;
    diag.real_axis_pairs = detect_real_axis_pairs(roots);

    std::vector<Complex> candidates;
    for (const auto& z : roots) {
        const double mag = std::abs(z);
        if (on_real_axis(z) || z.imag() <= 0.0) continue;
        if (mag > 1.0 + kUnitDiskSlack) continue;
        if (std::abs(1.0 - mag) >= kBandHalfWidth) continue;
        candidates.push_back(z);
    }
    std::sort(candidates.begin(), candidates.end(), [](Complex a, Complex b) {
        return std::abs(1.0 - std::abs(a)) < std::abs(1.0 - std::abs(b));
    });

    // Members of a (near-)double root share their argument; keep one, with
    // its argument averaged over the reciprocal partner.
    for (const auto& z : candidates) {
        if (static_cast<int>(diag.selected_true.size()) == num_sources) break;
        const bool duplicate = std::any_of(diag.selected_true.begin(), diag.selected_true.end(), [&](Complex s) {
            return std::abs(std::arg(s) - std::arg(z)) < kDuplicateArgTol;
        });
        if (!duplicate) diag.selected_true.push_back(pair_averaged(z, roots));
    }
    if (static_cast<int>(diag.selected_true.size()) < num_sources) {
        throw EstimationFailure("classify_roots: only " + std::to_string(2 * diag.selected_true.size()) +
                                " roots within the unit-circle band, need " + std::to_string(2 * num_sources));
    }
    std::sort(diag.selected_true.begin(), diag.selected_true.end(),
              [](Complex a, Complex b) { return std::arg(a) < std::arg(b); });
    for (const auto& z : diag.selected_true) diag.selected_mirror.push_back(std::conj(z));
    return diag;
}

std::vector<double> roots_to_angles(std::span<const Complex> roots, const UlaConfig& array) {
    std::vector<double> out;
    out.reserve(roots.size());
    for (const auto& z : roots) {
        const double s = std::arg(z) / (2.0 * std::numbers::pi * array.spacing_ratio);
        if (std::abs(s) > 1.0) {
            throw GratingLobeError("roots_to_angles: root phase " + std::to_string(std::arg(z)) +
                                   " maps outside the visible region for d/lambda = " +
                                   std::to_string(array.spacing_ratio));
        }
        out.push_back(rad_to_deg(std::asin(s)));
    }
    return out;
}

MirrorSplit filter_mirrors(std::span<const double> candidates_deg, const ComplexMatrix& r, const UlaConfig& array,
                           int num_sources) {
    if (candidates_deg.size() != 2 * static_cast<std::size_t>(num_sources)) {
        throw ContractViolation("filter_mirrors: expected " + std::to_string(2 * num_sources) + " candidates");
    }
    MirrorSplit out;
    for (int k = 0; k < num_sources; ++k) {
        const double a = candidates_deg[2 * static_cast<std::size_t>(k)];
        const double b = candidates_deg[2 * static_cast<std::size_t>(k) + 1];
        const double pa = cbf_spectrum(r, array, a);
        const double pb = cbf_spectrum(r, array, b);
        bool keep_a;
        if (std::abs(pa - pb) <= kCbfTieTol * std::max(pa, pb)) {
            out.ambiguous = true;
            keep_a = a >= b;
        } else {
            keep_a = pa > pb;
        }
        out.kept.push_back(keep_a ? a : b);
        out.rejected.push_back(keep_a ? b : a);
    }
    return out;
}

EstimationResult estimate(const ComplexMatrix& x, int num_sources, const UlaConfig& array) {
    array.validate();
    if (x.rows() != array.elements) {
        throw ContractViolation("estimate: data has " + std::to_string(x.rows()) + " rows, array has " +
                                std::to_string(array.elements) + " elements");
    }
    if (num_sources < 1 || 2 * num_sources >= array.elements) {
        throw ContractViolation("estimate: need 1 <= K < (L+1)/2 sources");
    }
    EstimationResult res;
    res.covariance = sample_covariance(x);
    const RealSymmetricMatrix r_real = real_covariance(res.covariance);
    res.eigenvalues = symmetric_evd(r_real).eigenvalues;
    res.subspaces = extract_subspaces(r_real, real_signal_dimension(num_sources));
    res.polynomial = build_polynomial(res.subspaces);
    if (res.polynomial.degree() < 2 * num_sources) {
        throw EstimationFailure("estimate: polynomial degree collapsed to " +
                                std::to_string(res.polynomial.degree()));
    }
    const std::vector<Complex> roots = polynomial_roots(res.polynomial);
    res.roots = classify_roots(roots, num_sources, array, res.polynomial.leading());

    std::vector<double> candidates;
    const std::vector<double> pos = roots_to_angles(res.roots.selected_true, array);
    const std::vector<double> neg = roots_to_angles(res.roots.selected_mirror, array);
    for (int k = 0; k < num_sources; ++k) {
        candidates.push_back(pos[static_cast<std::size_t>(k)]);
        candidates.push_back(neg[static_cast<std::size_t>(k)]);
    }
    const MirrorSplit split = filter_mirrors(candidates, res.covariance, array, num_sources);

    std::vector<std::size_t> order(split.kept.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return split.kept[a] < split.kept[b]; });
    for (auto i : order) {
        res.estimate.angles_deg.push_back(split.kept[i]);
        res.estimate.mirror_angles_deg.push_back(split.rejected[i]);
    }
    res.estimate.raw_candidates_deg = std::move(candidates);
    res.estimate.ambiguous = split.ambiguous;
    return res;
}

} // namespace rvroot
