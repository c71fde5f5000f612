#pragma once

#include <string>
#include <vector>

#include "rvroot/array_model.hpp"
#include "rvroot/perturbation.hpp"

namespace rvroot {

enum class VerifyLevel { quick, full };

struct OracleResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

/// Relative error between the finite-difference derivative of the noise
/// basis of Re(R) (perturbed data X + eps N, Procrustes-aligned to U_n) and
/// the candidate first-order perturbation `delta`.
double subspace_fd_error(const ConjugateExtension& ext, const ComplexMatrix& clean, const ComplexMatrix& noise,
                         const RealMatrix& delta, double eps = 1e-6);

/// Finite-difference check of noise_subspace_perturbation. `sign` scales the
/// prediction before comparison; -1 injects a sign error that must be caught.
OracleResult oracle_subspace_fd(VerifyLevel level, double sign = 1.0);

/// Closed-form and deflation denominators over L = 5..12, K = 1, 2.
OracleResult oracle_dual_denominators(VerifyLevel level);

/// Monte Carlo mean of the squared first-order deviation vs the closed-form MSE.
OracleResult oracle_mse_closure(VerifyLevel level);

/// X_v X_v^H = 2 Re(X X^H), SVD vs EVD subspaces, W_s^2 = 2M Lambda_s.
OracleResult oracle_svd_evd_equivalence(VerifyLevel level);

/// Full-pipeline deviation under eps-scaled noise vs the first-order prediction.
OracleResult oracle_first_order_deviation(VerifyLevel level);

std::vector<OracleResult> run_oracles(VerifyLevel level);

/// Deterministic random source angles within +-70 deg, at least 5 deg from
/// broadside, from each other and from each other's mirrors.
std::vector<double> random_angles(RandomStream& rng, int count);

} // namespace rvroot
