#pragma once

#include <optional>
#include <vector>

#include "rvroot/array_model.hpp"
#include "rvroot/estimator.hpp"
#include "rvroot/numerics.hpp"

namespace rvroot {

/// Thin SVD of the conjugate-extended data X_v = [X | X*], split at the
/// signal dimension. Left singular vectors are returned as real bases (the
/// column spaces of X_v are closed under conjugation); V_s carries the
/// matching phases so that X_v = U_s W_s V_s^H + U_n W_n V_n^H still holds.
struct ConjugateExtension {
    ComplexMatrix extended;      ///< X_v, L x 2M
    ComplexMatrix signal_left;   ///< U_s, L x d
    RealVector signal_values;    ///< W_s, descending
    ComplexMatrix signal_right;  ///< V_s, 2M x d
    ComplexMatrix noise_left;    ///< U_n, L x (L - d)
    RealVector noise_values;     ///< W_n (not materialised beyond the values)
};

/// Polynomial factorisation data around one source root.
///
/// The full denominator A * K_m(r) * G_full(r) comes from the closed form
/// -r^2 f''(r) / 2 (r is a double zero of f on the unit circle). For an even
/// element count G_full contains the real-axis pair, whose factor evaluated
/// at r equals R(a); `denom_true` / `denom_mirror` exclude it, so the
/// complete denominator is denom * correction.
struct FactoredSpectrum {
    ComplexPolynomial q;
    Complex r_true{0.0};
    Complex r_mirror{0.0};
    Complex denom_true{0.0};    ///< A K_m(r_k) G(r_k)
    Complex denom_mirror{0.0};  ///< A K_t(r_k*) G(r_k*)
    double correction = 1.0;    ///< R(a), inner member of the real pair
    double correction_outer = 1.0;  ///< R(1/a), reported only
    std::optional<RealAxisPair> real_pair;
    Complex deflation_true{0.0};    ///< cross-check of denom_true * correction
    Complex deflation_mirror{0.0};  ///< cross-check of denom_mirror * correction

    Complex gamma_true() const { return denom_true * correction; }
    Complex gamma_mirror() const { return denom_mirror * correction; }
};

enum class RootKind { true_root, mirror_root };

/// alpha, beta, gamma of the generalised deviation -Im(beta^H N_v^H alpha) / gamma.
struct GeneralizedParams {
    ComplexVector alpha;  ///< length L
    ComplexVector beta;   ///< length 2M
    Complex gamma{0.0};
    double scale = 0.0;   ///< C_k = 1 / (2 pi (d/lambda) cos theta), rad per rad
};

struct SourcePerturbation {
    double theta_deg = 0.0;
    double predicted_dtheta_rad = 0.0;
    double predicted_dphi_rad = 0.0;
    double theoretical_mse_true_rad2 = 0.0;
    double theoretical_mse_mirror_rad2 = 0.0;
};

struct PerturbationReport {
    std::vector<SourcePerturbation> sources;
};

/// [X | X*].
ComplexMatrix conjugate_extend(const ComplexMatrix& x);

ConjugateExtension conjugate_extension(const ComplexMatrix& x, int signal_dim);

/// First-order noise-subspace perturbation -U_s W_s^-1 V_s^H N_v^H U_n.
/// `nv` must have the form [N | N*].
RealMatrix noise_subspace_perturbation(const ConjugateExtension& ext, const ComplexMatrix& nv);

/// p(z) = [1, z, ..., z^(n-1)] and its elementwise derivative.
ComplexVector power_vector(Complex z, int n);
ComplexVector power_vector_derivative(Complex z, int n);

/// Denominators by the second-derivative closed form, cross-checked against
/// polynomial deflation. Throws InconsistencyError when the two disagree by
/// more than 1e-6 relative.
FactoredSpectrum factor_spectrum(const SubspaceDecomp& decomp, Complex r_true, const UlaConfig& array);

/// Deviation parameters for the true root (r_k) or the mirror root (r_k*).
GeneralizedParams generalized_params(const ConjugateExtension& ext, const SubspaceDecomp& decomp,
                                     const FactoredSpectrum& spectrum, RootKind which, const UlaConfig& array,
                                     double theta_deg);

/// -Im(beta^H N_v^H alpha) / Re(gamma), radians.
double predicted_deviation(const GeneralizedParams& params, const ComplexMatrix& nv);

/// ||alpha||^2 ||beta||^2 sigma^2 / (2 |gamma|^2), radians^2.
double theoretical_mse(const GeneralizedParams& params, double noise_power);

/// R(a) = a^2 - 2 a Re(r_k) + 1 with a the inner member of the first
/// detected real-axis pair. Returns 1 for odd element counts.
double even_array_correction(const RootDiagnostics& diag, Complex r_k);

/// e^{j 2 pi (d/lambda) sin theta}: the noiseless root labelled as source theta.
Complex source_root(const UlaConfig& array, double theta_deg);

/// All theoretical quantities for one noiseless realisation X; evaluates
/// predictions for any number of noise draws without recomputation.
class PerturbationModel {
public:
    struct SourceTerms {
        double theta_deg = 0.0;
        FactoredSpectrum spectrum;
        GeneralizedParams true_row;
        GeneralizedParams mirror_row;
    };

    PerturbationModel(const Scenario& scenario, const ComplexMatrix& clean);

    const ConjugateExtension& extension() const noexcept { return ext_; }
    const SubspaceDecomp& subspaces() const noexcept { return decomp_; }
    const std::vector<SourceTerms>& sources() const noexcept { return sources_; }

    /// Deviations for the noise draw N (L x M) and MSEs at `noise_power`.
    PerturbationReport report(const ComplexMatrix& noise, double noise_power) const;

private:
    UlaConfig array_;
    ConjugateExtension ext_;
    SubspaceDecomp decomp_;
    std::vector<SourceTerms> sources_;
};

PerturbationReport full_report(const Scenario& scenario, const ComplexMatrix& clean, const ComplexMatrix& noise);

} // namespace rvroot
