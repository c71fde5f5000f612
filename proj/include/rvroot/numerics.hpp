#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rvroot {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Real matrix checked for symmetry on construction (1e-12 relative).
class RealSymmetricMatrix {
public:
    explicit RealSymmetricMatrix(RealMatrix m);

    const RealMatrix& matrix() const noexcept { return m_; }
    Eigen::Index order() const noexcept { return m_.rows(); }

private:
    RealMatrix m_;
};

/// Eigenpairs sorted by descending eigenvalue; eigenvectors are columns.
struct EvdResult {
    RealVector eigenvalues;
    RealMatrix eigenvectors;
};

/// Thin SVD, A = left * diag(singular_values) * right^H.
struct SvdResult {
    ComplexMatrix left;
    RealVector singular_values;
    ComplexMatrix right;
};

/// Polynomial with complex coefficients in ascending powers of z.
///
/// High-order coefficients whose magnitude is below 1e-14 of the largest
/// coefficient are dropped on construction, so the leading coefficient is
/// always significant. The zero polynomial is kept as a single 0 coefficient.
class ComplexPolynomial {
public:
    ComplexPolynomial() : coeffs_{Complex{0.0}} {}
    explicit ComplexPolynomial(std::vector<Complex> ascending);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }
    Complex coefficient(int power) const { return coeffs_.at(static_cast<std::size_t>(power)); }
    Complex leading() const noexcept { return coeffs_.back(); }
    double max_abs_coefficient() const noexcept;

    /// Monic polynomial prod (z - r_i) scaled by `leading`.
    static ComplexPolynomial from_roots(std::span<const Complex> roots, Complex leading = 1.0);

private:
    std::vector<Complex> coeffs_;
};

EvdResult symmetric_evd(const RealSymmetricMatrix& a);

SvdResult complex_svd(const ComplexMatrix& a);

/// All `degree` roots (with multiplicity) from the eigenvalues of the
/// balanced companion matrix. Isolated roots are refined by guarded Newton
/// steps; members of a cluster (gap < 1e-3) are left as computed.
std::vector<Complex> polynomial_roots(const ComplexPolynomial& p);

Complex horner_eval(const ComplexPolynomial& p, Complex z);

ComplexPolynomial poly_derivative(const ComplexPolynomial& p, int order = 1);

/// Quotient of p by (z - root); the remainder is discarded.
ComplexPolynomial deflate(const ComplexPolynomial& p, Complex root);

/// max |Q^H Q - I| over entries.
double gram_error(const ComplexMatrix& q);
double gram_error(const RealMatrix& q);

/// Principal angles (radians, ascending) between the column spans of a and b.
/// Both inputs must have orthonormal columns.
std::vector<double> principal_angles(const ComplexMatrix& a, const ComplexMatrix& b);

/// Orthonormal basis of the column span of `a` after orthogonal Procrustes
/// alignment onto `reference`: returns a * Q with Q unitary minimising
/// ||a Q - reference||_F.
ComplexMatrix procrustes_align(const ComplexMatrix& a, const ComplexMatrix& reference);

} // namespace rvroot
