#include "rvroot/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rvroot/errors.hpp"

namespace rvroot {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kTrimTol = 1e-14;
constexpr double kClusterGap = 1e-3;

bool all_finite(const auto& m) {
    return m.allFinite();
}

// Parlett-Reinsch balancing with radix-2 scaling; similarity transform only,
// so eigenvalues are unchanged.
void balance(ComplexMatrix& a) {
    constexpr double radix = 2.0;
    constexpr double sq_radix = radix * radix;
    const Eigen::Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i).real()) + std::abs(a(j, i).imag());
                r += std::abs(a(i, j).real()) + std::abs(a(i, j).imag());
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sq_radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sq_radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

struct HornerPair {
    Complex value;
    Complex derivative;
};

HornerPair horner_with_derivative(const std::vector<Complex>& c, Complex z) {
    Complex v = c.back();
    Complex d = 0.0;
    for (auto it = c.rbegin() + 1; it != c.rend(); ++it) {
        d = d * z + v;
        v = v * z + *it;
    }
    return {v, d};
}

} // namespace

RealSymmetricMatrix::RealSymmetricMatrix(RealMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw ContractViolation("RealSymmetricMatrix: matrix is " + std::to_string(m_.rows()) + "x" +
                                std::to_string(m_.cols()) + ", not square");
    }
    if (!all_finite(m_)) {
        throw ContractViolation("RealSymmetricMatrix: non-finite entry");
    }
    const double scale = std::max(m_.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol * scale) {
        throw ContractViolation("RealSymmetricMatrix: asymmetry " + std::to_string(asym / scale) +
                                " exceeds 1e-12 relative");
    }
}

ComplexPolynomial::ComplexPolynomial(std::vector<Complex> ascending) : coeffs_(std::move(ascending)) {
    if (coeffs_.empty()) {
        coeffs_.push_back(0.0);
        return;
    }
    const double peak = max_abs_coefficient();
    while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= kTrimTol * peak) {
        coeffs_.pop_back();
    }
}

double ComplexPolynomial::max_abs_coefficient() const noexcept {
    double peak = 0.0;
    for (const auto& c : coeffs_) peak = std::max(peak, std::abs(c));
    return peak;
}

ComplexPolynomial ComplexPolynomial::from_roots(std::span<const Complex> roots, Complex leading) {
    std::vector<Complex> c{leading};
    for (const auto& r : roots) {
        c.push_back(0.0);
        for (std::size_t i = c.size() - 1; i > 0; --i) {
            c[i] = c[i - 1] - r * c[i];
        }
        c[0] = -r * c[0];
    }
    return ComplexPolynomial(std::move(c));
}

EvdResult symmetric_evd(const RealSymmetricMatrix& a) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(a.matrix());
    if (solver.info() != Eigen::Success) {
        const int budget = Eigen::SelfAdjointEigenSolver<RealMatrix>::m_maxIterations * static_cast<int>(a.order());
        throw NumericalError("symmetric_evd: tridiagonal QR did not converge within " + std::to_string(budget) +
                                 " iterations",
                             budget);
    }
    const Eigen::Index n = a.order();
    EvdResult out{RealVector(n), RealMatrix(n, n)};
    // Eigen returns ascending order.
    for (Eigen::Index i = 0; i < n; ++i) {
        out.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
        out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

SvdResult complex_svd(const ComplexMatrix& a) {
    if (!all_finite(a)) {
        throw ContractViolation("complex_svd: non-finite entry");
    }
    Eigen::BDCSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw NumericalError("complex_svd: bidiagonal divide-and-conquer did not converge");
    }
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

std::vector<Complex> polynomial_roots(const ComplexPolynomial& p) {
    const int n = p.degree();
    if (n < 1) {
        throw DomainError("polynomial_roots: degree " + std::to_string(n) + " has no roots");
    }
    const auto& c = p.coefficients();
    if (n == 1) return {-c[0] / c[1]};

    ComplexMatrix companion = ComplexMatrix::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    balance(companion);

    Eigen::ComplexEigenSolver<ComplexMatrix> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("polynomial_roots: companion Schur iteration did not converge");
    }
    std::vector<Complex> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

    // Newton refinement against the original coefficients, for isolated
    // roots only. Members of a tight cluster keep their eigenvalue estimates:
    // those come from one backward-stable perturbation, so their errors stay
    // correlated (a cluster's mean is accurate even when its members are not).
    for (std::size_t i = 0; i < roots.size(); ++i) {
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (j != i) gap = std::min(gap, std::abs(roots[i] - roots[j]));
        }
        if (gap < kClusterGap * std::max(1.0, std::abs(roots[i]))) continue;
        Complex r = roots[i];
        HornerPair hp = horner_with_derivative(c, r);
        for (int iter = 0; iter < 8; ++iter) {
            if (hp.derivative == Complex{0.0}) break;
            const Complex step = hp.value / hp.derivative;
            if (!(std::abs(step) < 0.1 * gap)) break;
            const Complex trial = r - step;
            const HornerPair next = horner_with_derivative(c, trial);
            if (!(std::abs(next.value) < std::abs(hp.value))) break;
            r = trial;
            hp = next;
            if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(r)) break;
        }
        roots[i] = r;
    }
    return roots;
}

Complex horner_eval(const ComplexPolynomial& p, Complex z) {
    const auto& c = p.coefficients();
    Complex v = c.back();
    for (auto it = c.rbegin() + 1; it != c.rend(); ++it) v = v * z + *it;
    return v;
}

ComplexPolynomial poly_derivative(const ComplexPolynomial& p, int order) {
    if (order < 1) {
        throw ContractViolation("poly_derivative: order must be >= 1");
    }
    std::vector<Complex> c = p.coefficients();
    for (int k = 0; k < order; ++k) {
        if (c.size() <= 1) return ComplexPolynomial({0.0});
        std::vector<Complex> d(c.size() - 1);
        for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i];
        c = std::move(d);
    }
    return ComplexPolynomial(std::move(c));
}

ComplexPolynomial deflate(const ComplexPolynomial& p, Complex root) {
    const auto& c = p.coefficients();
    if (c.size() < 2) {
        throw DomainError("deflate: constant polynomial");
    }
    std::vector<Complex> q(c.size() - 1);
    Complex carry = c.back();
    q.back() = carry;
    for (std::size_t i = c.size() - 2; i > 0; --i) {
        carry = c[i] + root * carry;
        q[i - 1] = carry;
    }
    return ComplexPolynomial(std::move(q));
}

double gram_error(const ComplexMatrix& q) {
    if (q.cols() == 0) return 0.0;
    return (q.adjoint() * q - ComplexMatrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

double gram_error(const RealMatrix& q) {
    if (q.cols() == 0) return 0.0;
    return (q.transpose() * q - RealMatrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

std::vector<double> principal_angles(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows()) {
        throw ContractViolation("principal_angles: row counts differ");
    }
    if (a.cols() < b.cols()) return principal_angles(b, a);
    if (b.cols() == 0) return {};
    // Sines of the angles are the singular values of the part of b outside
    // span(a); this stays accurate for tiny angles where arccos does not.
    const ComplexMatrix residual = b - a * (a.adjoint() * b);
    Eigen::JacobiSVD<ComplexMatrix> svd(residual);
    std::vector<double> angles;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        angles.push_back(std::asin(std::clamp(svd.singularValues()(i), 0.0, 1.0)));
    }
    std::sort(angles.begin(), angles.end());
    return angles;
}

ComplexMatrix procrustes_align(const ComplexMatrix& a, const ComplexMatrix& reference) {
    if (a.rows() != reference.rows() || a.cols() != reference.cols()) {
        throw ContractViolation("procrustes_align: shape mismatch");
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(a.adjoint() * reference, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return a * (svd.matrixU() * svd.matrixV().adjoint());
}

} // namespace rvroot
