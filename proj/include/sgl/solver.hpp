#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "sgl/system.hpp"

namespace sgl {

struct SolverOptions {
    double solve_tol = 1e-12;  // relative residual target for linear solves
    double eig_tol = 1e-9;     // eigenresidual target, relative to operator scale
    double heat_tol = 1e-10;   // local error target for semigroup propagation
    int dense_threshold = 500; // strictly below: direct dense factorizations
    int max_cg_iters = 0;      // 0 = 20n + 2000
    int max_eig_iters = 400;
};

// Solves (H - diag(shift)) u = rhs for the assembled matrix H, requiring the
// shifted matrix to be positive definite. Dense Cholesky with one step of
// iterative refinement under the threshold, Jacobi-preconditioned CG above;
// a direction of nonpositive curvature is reported through DefinitenessError.
Eigen::VectorXd solve_spd(const DirichletSystem& S, const Eigen::VectorXd& shift,
                          const Eigen::VectorXd& rhs, const SolverOptions& opts,
                          const std::string& context);

// Green column of the region: H g = 1_x. Positivity on x's component is the
// minimum principle at work and is checked by the callers that rely on it.
Eigen::VectorXd solve_green_vec(const DirichletSystem& S, int ix, const SolverOptions& opts = {});
RegionFunction solve_green(const DirichletSystem& S, VertexId x, const SolverOptions& opts = {});

struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector; // unit norm in ℓ²(m), sign-fixed to positive mass
    double residual = 0.0;  // ||Hv - λMv|| relative to the operator scale
    int iterations = 0;
};

// Bottom of the spectrum of the ℓ²(m) operator on the region, by shifted
// inverse iteration started from the positive constant vector (Gershgorin
// shift, then guarded Rayleigh updates). Never uses a dense eigensolver, so
// it stays an independent route from the reference spectrum.
EigenPair lambda_min(const DirichletSystem& S, const SolverOptions& opts = {});

// Bottom two. The second slot is empty on one-vertex regions.
std::pair<EigenPair, std::optional<EigenPair>> lambda_pair(const DirichletSystem& S,
                                                           const SolverOptions& opts = {});

struct GeneralizedBottom {
    double value = 0.0;
    Eigen::VectorXd vector; // full region length; harmonic extension off supp(w)
    double residual = 0.0;
    int support = 0;
};

// Smallest eigenvalue of the pencil (H_K, diag w) for w ≥ 0, w ≠ 0: the
// infimum of h(φ)/Σwφ² over functions supported in K. Zeros of w are
// eliminated by a Schur complement on the support (dense only).
GeneralizedBottom generalized_lambda_min(const DirichletSystem& S, const Eigen::VectorXd& w,
                                         const SolverOptions& opts = {});

// (H - λM)^{-1} (M f), defined for λ below the bottom eigenvalue; λ at or
// above it surfaces as SpectralParameterError.
Eigen::VectorXd resolvent_apply(const DirichletSystem& S, double lambda,
                                const Eigen::VectorXd& f, const SolverOptions& opts = {});

// e^{-t m^{-1} H} f for t ≥ 0.
Eigen::VectorXd heat_apply(const DirichletSystem& S, double t, const Eigen::VectorXd& f,
                           const SolverOptions& opts = {});

// PD certificate for H + slack·M (i.e. λ_min ≥ -slack in ℓ²(m)), by direct
// factorization. Certificate only: no eigenvalue estimate.
bool certify_nonnegative(const DirichletSystem& S, double slack = 1e-10,
                         const SolverOptions& opts = {});

// e^{-tA} v through Lanczos with full reorthogonalization and adaptive
// substepping; apply is the (symmetric) matvec. Exposed so higher layers can
// build time-stepping routes that share no code with the dense spectral path.
Eigen::VectorXd krylov_expm_apply(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                                  const Eigen::VectorXd& v, double t, double tol,
                                  int max_krylov = 90);

// Reusable propagator for repeated times on one system: dense
// eigendecomposition under the threshold, Lanczos substepping above.
class HeatPlan {
public:
    static HeatPlan make(const DirichletSystem& S, const SolverOptions& opts = {});

    Eigen::VectorXd apply(double t, const Eigen::VectorXd& f) const;
    // Kernel entry p_t(x,y) with respect to the counting measure; the plan
    // requires m ≡ 1 so ℓ² and ℓ²(m) agree.
    double kernel(double t, int ix, int iy) const;

    bool dense() const { return dense_; }
    // Dense route only: spectrum ascending and m-orthonormal column vectors.
    const Eigen::VectorXd& eigenvalues() const;
    const Eigen::MatrixXd& eigenvectors() const;

private:
    HeatPlan() = default;

    const DirichletSystem* S_ = nullptr;
    SolverOptions opts_;
    bool dense_ = false;
    Eigen::VectorXd evals_;
    Eigen::MatrixXd evecs_;
    Eigen::VectorXd msqrt_, msqrt_inv_;
};

} // namespace sgl
