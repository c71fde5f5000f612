#pragma once

#include <span>
#include <string>
#include <vector>

#include "rvroot/array_model.hpp"
#include "rvroot/numerics.hpp"

namespace rvroot {

/// Signal/noise partition of the eigendecomposition of Re(R).
struct SubspaceDecomp {
    RealMatrix signal_basis;       ///< E_s, L x d
    RealMatrix noise_basis;        ///< E_n, L x (L - d)
    RealVector signal_eigenvalues; ///< descending
    RealVector noise_eigenvalues;  ///< descending
    bool degenerate_gap = false;   ///< eigenvalues d and d+1 within 1e-12 * lambda_max
    std::vector<std::string> warnings;

    int dimension() const noexcept { return static_cast<int>(signal_basis.rows()); }
    RealMatrix noise_projector() const { return noise_basis * noise_basis.transpose(); }
};

/// Reciprocal pair {inner, outer} of real roots, |inner| <= 1.
struct RealAxisPair {
    double inner = 0.0;
    double outer = 0.0;
};

struct RootDiagnostics {
    std::vector<Complex> all_roots;        ///< finite roots of q(z)
    int roots_at_infinity = 0;             ///< 2(L-1) - all_roots.size(); q lost its top coefficients
    std::vector<Complex> selected_true;    ///< K roots, positive argument, ascending argument
    std::vector<Complex> selected_mirror;  ///< conj(selected_true[k])
    std::vector<RealAxisPair> real_axis_pairs;
    Complex leading_coefficient{0.0};
};

struct DoaEstimate {
    std::vector<double> angles_deg;          ///< CBF-kept, ascending
    std::vector<double> mirror_angles_deg;   ///< mirror_angles_deg[i] is the partner of angles_deg[i]
    std::vector<double> raw_candidates_deg;  ///< 2K entries, consecutive (+, -) pairs
    bool ambiguous = false;                  ///< a CBF comparison tied
};

struct MirrorSplit {
    std::vector<double> kept;
    std::vector<double> rejected;  ///< rejected[i] pairs with kept[i]
    bool ambiguous = false;
};

struct EstimationResult {
    DoaEstimate estimate;
    SubspaceDecomp subspaces;
    RootDiagnostics roots;
    RealVector eigenvalues;     ///< full spectrum of Re(R), descending
    ComplexMatrix covariance;   ///< sample covariance used for CBF
    ComplexPolynomial polynomial;
};

/// Dimension of the signal subspace of Re(R) for `num_sources` sources off
/// broadside: each source contributes a(theta) and its mirror a(-theta).
int real_signal_dimension(int num_sources) noexcept;

/// Elementwise real part of a Hermitian matrix.
RealSymmetricMatrix real_covariance(const ComplexMatrix& r);

/// Top `signal_dim` eigenvectors form E_s, the rest E_n.
SubspaceDecomp extract_subspaces(const RealSymmetricMatrix& r_real, int signal_dim);

/// q(z) = z^(L-1) p^T(1/z) C p(z) for a real symmetric C. The coefficient of
/// z^(L-1+m) is the sum of the m-th diagonal of C.
ComplexPolynomial build_polynomial_from_projector(const RealMatrix& c);

ComplexPolynomial build_polynomial(const SubspaceDecomp& decomp);

/// Real roots (|Im z| < 1e-6 |z|) matched into {a, 1/a} pairs, ordered by
/// ascending |inner|.
std::vector<RealAxisPair> detect_real_axis_pairs(std::span<const Complex> roots);

/// Splits the roots into true candidates, their mirrors, and real-axis pairs.
/// Throws EstimationFailure when fewer than K candidates sit within the band
/// |1 - |z|| < 0.5. Fewer than 2(L-1) roots are accepted when the projector
/// corner entries vanish (e.g. 30 deg at half-wavelength spacing, L = 4);
/// the missing roots are at infinity and their reciprocal partners at 0.
/// A selected root whose reciprocal partner 1/z* is present takes the mean
/// argument of the two.
RootDiagnostics classify_roots(std::span<const Complex> roots, int num_sources, const UlaConfig& array,
                               Complex leading = 0.0);

/// theta = asin(arg(z) / (2 pi d/lambda)) in degrees.
std::vector<double> roots_to_angles(std::span<const Complex> roots, const UlaConfig& array);

/// For each consecutive pair (candidates[2i], candidates[2i+1]) keep the
/// member with the larger CBF output.
MirrorSplit filter_mirrors(std::span<const double> candidates_deg, const ComplexMatrix& r, const UlaConfig& array,
                           int num_sources);

/// Complete RV-root-MUSIC pipeline on raw snapshots (L x M).
EstimationResult estimate(const ComplexMatrix& x, int num_sources, const UlaConfig& array);

} // namespace rvroot
