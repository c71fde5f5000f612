#include "rvroot/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/SVD>

#include "rvroot/errors.hpp"

namespace rvroot {

namespace {

constexpr double kDualMethodTol = 1e-6;
constexpr double kGammaImagTol = 1e-8;
constexpr double kRootResidualTol = 1e-8;

// Real orthonormal basis for a conjugation-closed column span.
ComplexMatrix realify_basis(const ComplexMatrix& u) {
    if (u.cols() == 0) return u;
    RealMatrix stacked(u.rows(), 2 * u.cols());
    stacked << u.real(), u.imag();
    Eigen::JacobiSVD<RealMatrix> svd(stacked, Eigen::ComputeThinU);
    return svd.matrixU().leftCols(u.cols()).cast<Complex>();
}

Complex second_derivative_denominator(const ComplexPolynomial& q, Complex r, int degree_shift) {
    // f(z) = z^-n q(z); returns -r^2 f''(r) / 2.
    const double n = degree_shift;
    const Complex q0 = horner_eval(q, r);
    const Complex q1 = horner_eval(poly_derivative(q, 1), r);
    const Complex q2 = horner_eval(poly_derivative(q, 2), r);
    const Complex zn = std::pow(r, -n);
    const Complex f2 = n * (n + 1.0) * zn / (r * r) * q0 - 2.0 * n * zn / r * q1 + zn * q2;
    return -r * r * f2 / 2.0;
}

Complex deflation_denominator(const ComplexPolynomial& q, std::span<const Complex> roots, Complex r,
                              int degree_shift) {
    // Divide out the two computed roots nearest r; q = Q (z - r)^2 near r.
    std::vector<std::size_t> idx(roots.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(roots[a] - r) < std::abs(roots[b] - r);
    });
    ComplexPolynomial quotient = deflate(deflate(q, roots[idx[0]]), roots[idx[1]]);
    // f''(r) = 2 r^-n Q(r), so -r^2 f''(r) / 2 = -r^(2-n) Q(r).
    return -std::pow(r, 2.0 - degree_shift) * horner_eval(quotient, r);
}

} // namespace

ComplexMatrix conjugate_extend(const ComplexMatrix& x) {
    ComplexMatrix xv(x.rows(), 2 * x.cols());
    xv << x, x.conjugate();
    return xv;
}

ConjugateExtension conjugate_extension(const ComplexMatrix& x, int signal_dim) {
    const auto l = static_cast<int>(x.rows());
    if (signal_dim < 1 || signal_dim >= l) {
        throw ContractViolation("conjugate_extension: signal dimension out of range");
    }
    if (2 * x.cols() < x.rows()) {
        throw ContractViolation("conjugate_extension: need 2M >= L for a complete left basis");
    }
    ConjugateExtension ext;
    ext.extended = conjugate_extend(x);
    SvdResult svd = complex_svd(ext.extended);
    ComplexMatrix us = svd.left.leftCols(signal_dim);
    ComplexMatrix vs = svd.right.leftCols(signal_dim);
    for (int i = 0; i < signal_dim; ++i) {
        Eigen::Index peak = 0;
        us.col(i).cwiseAbs().maxCoeff(&peak);
        const Complex phase = std::polar(1.0, -std::arg(us(peak, i)));
        us.col(i) *= phase;
        vs.col(i) *= phase;
    }
    ext.signal_left = std::move(us);
    ext.signal_right = std::move(vs);
    ext.signal_values = svd.singular_values.head(signal_dim);
    ext.noise_left = realify_basis(svd.left.rightCols(l - signal_dim));
    ext.noise_values = svd.singular_values.tail(svd.singular_values.size() - signal_dim);
    return ext;
}

RealMatrix noise_subspace_perturbation(const ConjugateExtension& ext, const ComplexMatrix& nv) {
    if (nv.rows() != ext.extended.rows() || nv.cols() != ext.extended.cols()) {
        throw ContractViolation("noise_subspace_perturbation: N_v must match X_v in shape");
    }
    const Eigen::Index m = nv.cols() / 2;
    const double scale = std::max(nv.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if ((nv.rightCols(m) - nv.leftCols(m).conjugate()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ContractViolation("noise_subspace_perturbation: N_v is not of the form [N | N*]");
    }
    const RealVector& w = ext.signal_values;
    if (!(w.minCoeff() > 0.0) || !w.allFinite()) {
        throw RankDeficiency("noise_subspace_perturbation: W_s is singular");
    }
    const ComplexMatrix delta =
        -ext.signal_left * w.cwiseInverse().asDiagonal() * (ext.signal_right.adjoint() * (nv.adjoint() * ext.noise_left));
    return delta.real();
}

ComplexVector power_vector(Complex z, int n) {
    ComplexVector p(n);
    Complex v = 1.0;
    for (int i = 0; i < n; ++i) {
        p(i) = v;
        v *= z;
    }
    return p;
}

ComplexVector power_vector_derivative(Complex z, int n) {
    ComplexVector p(n);
    p(0) = 0.0;
    Complex v = 1.0;
    for (int i = 1; i < n; ++i) {
        p(i) = static_cast<double>(i) * v;
        v *= z;
    }
    return p;
}

Complex source_root(const UlaConfig& array, double theta_deg) {
    return std::polar(1.0, 2.0 * std::numbers::pi * array.spacing_ratio * std::sin(deg_to_rad(theta_deg)));
}

FactoredSpectrum factor_spectrum(const SubspaceDecomp& decomp, Complex r_true, const UlaConfig& array) {
    FactoredSpectrum fs;
    fs.q = build_polynomial(decomp);
    const int shift = array.elements - 1;
    fs.r_true = r_true;
    fs.r_mirror = std::conj(r_true);
    const double scale = fs.q.max_abs_coefficient();
    for (Complex r : {fs.r_true, fs.r_mirror}) {
        if (std::abs(horner_eval(fs.q, r)) > kRootResidualTol * scale) {
            throw ContractViolation("factor_spectrum: r is not a root of q (residual " +
                                    std::to_string(std::abs(horner_eval(fs.q, r)) / scale) + ")");
        }
    }

    const std::vector<Complex> roots = polynomial_roots(fs.q);
    RootDiagnostics diag;
    diag.all_roots = roots;
    diag.roots_at_infinity = 2 * shift - fs.q.degree();
    diag.real_axis_pairs = detect_real_axis_pairs(roots);
    fs.correction = even_array_correction(diag, fs.r_true);
    if (!diag.real_axis_pairs.empty() && array.elements % 2 == 0) {
        fs.real_pair = diag.real_axis_pairs.front();
        const double a = fs.real_pair->outer;
        fs.correction_outer = a * a - 2.0 * a * fs.r_true.real() + 1.0;
    }

    const Complex full_true = second_derivative_denominator(fs.q, fs.r_true, shift);
    const Complex full_mirror = second_derivative_denominator(fs.q, fs.r_mirror, shift);
    fs.deflation_true = deflation_denominator(fs.q, roots, fs.r_true, shift);
    fs.deflation_mirror = deflation_denominator(fs.q, roots, fs.r_mirror, shift);
    for (auto [closed, defl] : {std::pair{full_true, fs.deflation_true}, std::pair{full_mirror, fs.deflation_mirror}}) {
        const double rel = std::abs(closed - defl) / std::abs(closed);
        if (!(rel <= kDualMethodTol)) {
            throw InconsistencyError("factor_spectrum: closed-form and deflation denominators differ by " +
                                     std::to_string(rel) + " relative; root is not a clean double root");
        }
    }
    fs.denom_true = full_true / fs.correction;
    fs.denom_mirror = full_mirror / fs.correction;
    return fs;
}

GeneralizedParams generalized_params(const ConjugateExtension& ext, const SubspaceDecomp& decomp,
                                     const FactoredSpectrum& spectrum, RootKind which, const UlaConfig& array,
                                     double theta_deg) {
    const bool is_true = which == RootKind::true_root;
    const Complex r = is_true ? spectrum.r_true : spectrum.r_mirror;
    const double angle = deg_to_rad(is_true ? theta_deg : -theta_deg);
    const int l = array.elements;

    GeneralizedParams gp;
    gp.scale = 1.0 / (2.0 * std::numbers::pi * array.spacing_ratio * std::cos(angle));
    const ComplexVector p = power_vector(r, l);
    const ComplexVector p1 = power_vector_derivative(r, l);
    const RealMatrix projector = decomp.noise_projector();
    gp.alpha = projector.cast<Complex>() * p1 * (gp.scale * r);
    gp.beta = ext.signal_right * ext.signal_values.cwiseInverse().asDiagonal() * (ext.signal_left.adjoint() * p);
    gp.gamma = is_true ? spectrum.gamma_true() : spectrum.gamma_mirror();
    if (gp.gamma == Complex{0.0}) {
        throw NumericalError("generalized_params: gamma vanished");
    }
    return gp;
}

double predicted_deviation(const GeneralizedParams& params, const ComplexMatrix& nv) {
    if (nv.rows() != params.alpha.size() || nv.cols() != params.beta.size()) {
        throw ContractViolation("predicted_deviation: N_v must be L x 2M");
    }
    if (std::abs(params.gamma.imag()) > kGammaImagTol * std::abs(params.gamma)) {
        throw NumericalError("predicted_deviation: gamma has a non-negligible imaginary part");
    }
    // beta^H N_v^H alpha = (N_v beta)^H alpha
    const Complex y = (nv * params.beta).dot(params.alpha);
    return -y.imag() / params.gamma.real();
}

double theoretical_mse(const GeneralizedParams& params, double noise_power) {
    if (!(noise_power >= 0.0)) {
        throw ContractViolation("theoretical_mse: noise power must be >= 0");
    }
    return params.alpha.squaredNorm() * params.beta.squaredNorm() * noise_power / (2.0 * std::norm(params.gamma));
}

double even_array_correction(const RootDiagnostics& diag, Complex r_k) {
    const std::size_t elements = (diag.all_roots.size() + static_cast<std::size_t>(diag.roots_at_infinity)) / 2 + 1;
    if (elements % 2 == 1) return 1.0;
    if (diag.real_axis_pairs.empty()) {
        throw TheoremViolation("even_array_correction: even element count " + std::to_string(elements) +
                               " but no real-axis root pair was detected");
    }
    const double a = diag.real_axis_pairs.front().inner;
    return a * a - 2.0 * a * r_k.real() + 1.0;
}

PerturbationModel::PerturbationModel(const Scenario& scenario, const ComplexMatrix& clean) : array_(scenario.array) {
    scenario.validate();
    const int dim = real_signal_dimension(scenario.num_sources());
    ext_ = conjugate_extension(clean, dim);
    decomp_ = extract_subspaces(real_covariance(sample_covariance(clean)), dim);
    for (double theta : scenario.angles_deg) {
        SourceTerms terms;
        terms.theta_deg = theta;
        terms.spectrum = factor_spectrum(decomp_, source_root(array_, theta), array_);
        terms.true_row = generalized_params(ext_, decomp_, terms.spectrum, RootKind::true_root, array_, theta);
        terms.mirror_row = generalized_params(ext_, decomp_, terms.spectrum, RootKind::mirror_root, array_, theta);
        sources_.push_back(std::move(terms));
    }
}

PerturbationReport PerturbationModel::report(const ComplexMatrix& noise, double noise_power) const {
    const ComplexMatrix nv = conjugate_extend(noise);
    PerturbationReport out;
    for (const auto& s : sources_) {
        SourcePerturbation sp;
        sp.theta_deg = s.theta_deg;
        sp.predicted_dtheta_rad = predicted_deviation(s.true_row, nv);
        sp.predicted_dphi_rad = predicted_deviation(s.mirror_row, nv);
        sp.theoretical_mse_true_rad2 = theoretical_mse(s.true_row, noise_power);
        sp.theoretical_mse_mirror_rad2 = theoretical_mse(s.mirror_row, noise_power);
        out.sources.push_back(sp);
    }
    return out;
}

PerturbationReport full_report(const Scenario& scenario, const ComplexMatrix& clean, const ComplexMatrix& noise) {
    return PerturbationModel(scenario, clean).report(noise, scenario.noise_power);
}

} // namespace rvroot
