#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rvroot/errors.hpp"
#include "rvroot/numerics.hpp"

using namespace rvroot;

namespace {

RealMatrix random_symmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    RealMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    return a + a.transpose();
}

ComplexMatrix random_complex(int r, int c, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix a(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) a(i, j) = Complex(g(rng), g(rng));
    return a;
}

// Closest computed root to z.
double distance_to_set(Complex z, const std::vector<Complex>& set) {
    double best = 1e300;
    for (const auto& w : set) best = std::min(best, std::abs(z - w));
    return best;
}

} // namespace

TEST_CASE("RealSymmetricMatrix rejects asymmetric input") {
    RealMatrix m(2, 2);
    m << 1.0, 2.0, 2.0 + 1e-6, 1.0;
    CHECK_THROWS_AS(RealSymmetricMatrix{m}, ContractViolation);
    m(1, 0) = 2.0;
    CHECK_NOTHROW(RealSymmetricMatrix{m});
}

TEST_CASE("symmetric_evd returns descending orthonormal eigenpairs") {
    std::mt19937_64 rng(1);
    for (int n : {2, 5, 9, 12}) {
        const RealMatrix a = random_symmetric(n, rng);
        const EvdResult evd = symmetric_evd(RealSymmetricMatrix(a));
        for (int i = 1; i < n; ++i) CHECK(evd.eigenvalues(i - 1) >= evd.eigenvalues(i));
        CHECK(gram_error(evd.eigenvectors) < 1e-12);
        const RealMatrix back = evd.eigenvectors * evd.eigenvalues.asDiagonal() * evd.eigenvectors.transpose();
        CHECK((back - a).norm() / a.norm() < 1e-12);
    }
}

TEST_CASE("symmetric_evd on a diagonal matrix sorts the diagonal") {
    RealMatrix d = RealMatrix::Zero(3, 3);
    d.diagonal() << 1.0, 3.0, 2.0;
    const EvdResult evd = symmetric_evd(RealSymmetricMatrix(d));
    CHECK(evd.eigenvalues(0) == doctest::Approx(3.0));
    CHECK(evd.eigenvalues(1) == doctest::Approx(2.0));
    CHECK(evd.eigenvalues(2) == doctest::Approx(1.0));
    CHECK(std::abs(evd.eigenvectors(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("complex_svd reconstructs wide and tall matrices") {
    std::mt19937_64 rng(2);
    for (auto [r, c] : {std::pair{9, 400}, std::pair{6, 3}, std::pair{4, 4}}) {
        const ComplexMatrix a = random_complex(r, c, rng);
        const SvdResult svd = complex_svd(a);
        const auto k = std::min(r, c);
        REQUIRE(svd.singular_values.size() == k);
        for (int i = 1; i < k; ++i) CHECK(svd.singular_values(i - 1) >= svd.singular_values(i));
        CHECK(gram_error(svd.left) < 1e-12);
        CHECK(gram_error(svd.right) < 1e-12);
        const ComplexMatrix back = svd.left * svd.singular_values.cast<Complex>().asDiagonal() * svd.right.adjoint();
        CHECK((back - a).norm() / a.norm() < 1e-12);
    }
}

TEST_CASE("ComplexPolynomial drops negligible leading coefficients") {
    const ComplexPolynomial p({1.0, 2.0, 1e-20});
    CHECK(p.degree() == 1);
    CHECK(p.leading() == Complex(2.0));
    const ComplexPolynomial zero({0.0, 0.0});
    CHECK(zero.degree() == 0);
}

TEST_CASE("polynomial_roots recovers known roots") {
    const std::vector<Complex> roots{1.0, 2.0, -3.0, {0.5, 0.5}, {0.5, -0.5}, {0.0, 1.0}};
    const ComplexPolynomial p = ComplexPolynomial::from_roots(roots, Complex(2.0, -1.0));
    const std::vector<Complex> found = polynomial_roots(p);
    REQUIRE(found.size() == roots.size());
    for (const auto& r : roots) CHECK(distance_to_set(r, found) < 1e-10);
}

TEST_CASE("polynomial_roots keeps both members of a double root on the unit circle") {
    const Complex r = std::polar(1.0, 0.7);
    const std::vector<Complex> roots{r, r, std::conj(r), std::conj(r), 0.4, 2.5};
    const std::vector<Complex> found = polynomial_roots(ComplexPolynomial::from_roots(roots));
    int near = 0;
    for (const auto& z : found) near += std::abs(z - r) < 1e-6;
    CHECK(near == 2);
}

TEST_CASE("polynomial_roots handles a zero root and rejects constants") {
    const std::vector<Complex> found = polynomial_roots(ComplexPolynomial({0.0, -1.0, 1.0}));
    CHECK(distance_to_set(0.0, found) < 1e-14);
    CHECK(distance_to_set(1.0, found) < 1e-14);
    CHECK_THROWS_AS(polynomial_roots(ComplexPolynomial({3.0})), DomainError);
}

TEST_CASE("residuals of computed roots are small relative to the coefficients") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int deg : {4, 10, 16, 22}) {
        std::vector<Complex> c(static_cast<std::size_t>(deg + 1));
        for (auto& v : c) v = g(rng);
        const ComplexPolynomial p(c);
        for (const auto& z : polynomial_roots(p)) {
            const double scale = p.max_abs_coefficient() * std::pow(std::max(1.0, std::abs(z)), deg);
            CHECK(std::abs(horner_eval(p, z)) <= 1e-8 * scale);
        }
    }
}

TEST_CASE("horner_eval, poly_derivative and deflate") {
    const ComplexPolynomial p({1.0, -2.0, 0.0, 3.0});  // 3z^3 - 2z + 1
    const Complex z(0.3, -1.2);
    CHECK(std::abs(horner_eval(p, z) - (3.0 * z * z * z - 2.0 * z + 1.0)) < 1e-14);
    CHECK(std::abs(horner_eval(poly_derivative(p), z) - (9.0 * z * z - 2.0)) < 1e-14);
    CHECK(std::abs(horner_eval(poly_derivative(p, 2), z) - 18.0 * z) < 1e-14);

    const std::vector<Complex> roots{0.5, {1.0, 2.0}, -4.0};
    const ComplexPolynomial q = ComplexPolynomial::from_roots(roots);
    const ComplexPolynomial d = deflate(q, roots[1]);
    CHECK(d.degree() == 2);
    CHECK(std::abs(horner_eval(d, 0.5)) < 1e-13);
    CHECK(std::abs(horner_eval(d, -4.0)) < 1e-12);
}

TEST_CASE("principal_angles between spans") {
    ComplexMatrix a = ComplexMatrix::Zero(3, 1);
    a(0, 0) = 1.0;
    ComplexMatrix b = ComplexMatrix::Zero(3, 1);
    b(1, 0) = 1.0;
    CHECK(principal_angles(a, a)[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(principal_angles(a, b)[0] == doctest::Approx(std::numbers::pi / 2));
    ComplexMatrix c(3, 1);
    c << std::cos(0.3), std::sin(0.3), 0.0;
    CHECK(principal_angles(a, c)[0] == doctest::Approx(0.3));
}

TEST_CASE("procrustes_align undoes a unitary change of basis") {
    std::mt19937_64 rng(4);
    const ComplexMatrix q = complex_svd(random_complex(6, 3, rng)).left;
    const ComplexMatrix u = complex_svd(random_complex(3, 3, rng)).left;
    const ComplexMatrix rotated = q * u;
    CHECK((procrustes_align(rotated, q) - q).norm() < 1e-12);
}
