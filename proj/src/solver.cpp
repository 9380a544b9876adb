#include "sgl/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace sgl {
namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

// --------------------------------------------------------------------------
// Linear solves

[[noreturn]] void throw_indefinite_dense(const Eigen::MatrixXd& A, const std::string& context) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    double mu = es.eigenvalues()(0);
    Eigen::VectorXd dir = es.eigenvectors().col(0);
    throw DefinitenessError(context + ": matrix is not positive definite (bottom eigenvalue " +
                                std::to_string(mu) + ")",
                            to_std(dir));
}

Eigen::VectorXd dense_solve_pd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                               const std::string& context) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw_indefinite_dense(A, context);
    Eigen::VectorXd x = llt.solve(b);
    x += llt.solve(b - A * x); // one refinement step tightens the forward error
    if (!x.allFinite()) throw ConvergenceError(context + ": dense solve produced non-finite values");
    return x;
}

struct ShiftedOp {
    const Eigen::SparseMatrix<double>* H;
    const Eigen::VectorXd* shift; // may be null for no shift

    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
        Eigen::VectorXd y = (*H) * x;
        if (shift) y -= shift->cwiseProduct(x);
        return y;
    }
};

// best_effort callers (inverse iteration) take the iterate at budget
// exhaustion instead of an exception: the outer loop has its own residual
// test and an unconverged inner solve still amplifies the eigendirection.
Eigen::VectorXd cg_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                         const Eigen::VectorXd& precond_diag, const Eigen::VectorXd& b,
                         double tol, int max_iters, const std::string& context,
                         bool best_effort = false) {
    const double bnorm = b.norm();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    if (bnorm == 0.0) return x;

    Eigen::VectorXd r = b;
    Eigen::VectorXd z = r.cwiseQuotient(precond_diag);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    const double target = tol * bnorm;

    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd Ap = apply(p);
        double pAp = p.dot(Ap);
        if (!(pAp > 0.0)) {
            Eigen::VectorXd dir = p;
            double pn = p.norm();
            if (pn > 0) dir /= pn;
            throw DefinitenessError(context + ": direction of nonpositive curvature found (p'Ap = " +
                                        std::to_string(pAp) + ")",
                                    to_std(dir));
        }
        double alpha = rz / pAp;
        x += alpha * p;
        r -= alpha * Ap;
        if ((it + 1) % 64 == 0) r = b - apply(x); // refresh against drift
        if (r.norm() <= target) {
            r = b - apply(x);
            if (r.norm() <= target) return x;
        }
        z = r.cwiseQuotient(precond_diag);
        double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    if (best_effort && x.allFinite()) return x;
    throw ConvergenceError(context + ": CG did not reach tolerance " + std::to_string(tol) +
                           " within " + std::to_string(max_iters) +
                           " iterations (residual " + std::to_string(r.norm() / bnorm) + ")");
}

int cg_budget(const SolverOptions& opts, int n) {
    return opts.max_cg_iters > 0 ? opts.max_cg_iters : 20 * n + 2000;
}

} // namespace

Eigen::VectorXd solve_spd(const DirichletSystem& S, const Eigen::VectorXd& shift,
                          const Eigen::VectorXd& rhs, const SolverOptions& opts,
                          const std::string& context) {
    const int n = S.n();
    if (rhs.size() != n || shift.size() != n)
        throw DomainError(context + ": vector length does not match region size");

    if (n < opts.dense_threshold) {
        Eigen::MatrixXd A = S.dense();
        A.diagonal() -= shift;
        return dense_solve_pd(A, rhs, context);
    }

    Eigen::VectorXd d = S.diagonal() - shift;
    for (int i = 0; i < n; ++i)
        if (!(d[i] > 0.0)) {
            std::vector<double> dir(static_cast<std::size_t>(n), 0.0);
            dir[static_cast<std::size_t>(i)] = 1.0;
            throw DefinitenessError(context + ": nonpositive diagonal entry at index " +
                                        std::to_string(i),
                                    std::move(dir));
        }
    ShiftedOp op{&S.matrix(), &shift};
    return cg_solve([op](const Eigen::VectorXd& x) { return op(x); }, d, rhs, opts.solve_tol,
                    cg_budget(opts, n), context);
}

Eigen::VectorXd solve_green_vec(const DirichletSystem& S, int ix, const SolverOptions& opts) {
    if (ix < 0 || ix >= S.n()) throw DomainError("green: vertex index outside region");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S.n());
    rhs[ix] = 1.0;
    Eigen::VectorXd zero_shift = Eigen::VectorXd::Zero(S.n());
    return solve_spd(S, zero_shift, rhs, opts, "green");
}

RegionFunction solve_green(const DirichletSystem& S, VertexId x, const SolverOptions& opts) {
    int ix = S.region()->index_of(x);
    if (ix < 0) throw DomainError("green: vertex not in region");
    return RegionFunction(S.region(), solve_green_vec(S, ix, opts));
}

// --------------------------------------------------------------------------
// Shifted inverse iteration

namespace {

// Symmetrized operator B = D H D with D = diag(s)^{-1/2}; covers both the
// ℓ²(m) spectrum (s = m) and full-support weight pencils (s = w).
struct SymOp {
    int n = 0;
    bool dense = false;
    Eigen::MatrixXd B;
    const Eigen::SparseMatrix<double>* H = nullptr;
    Eigen::VectorXd dinv_sqrt;
    Eigen::VectorXd diag;
    double glow = 0.0, gup = 0.0;

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        if (dense) return B * x;
        return dinv_sqrt.cwiseProduct((*H) * dinv_sqrt.cwiseProduct(x));
    }
};

SymOp make_symop(const DirichletSystem& S, const Eigen::VectorXd& s, const SolverOptions& opts) {
    SymOp op;
    op.n = S.n();
    op.dinv_sqrt = s.cwiseSqrt().cwiseInverse();
    op.diag = S.diagonal().cwiseQuotient(s);

    Eigen::VectorXd row_abs = Eigen::VectorXd::Zero(op.n);
    for (const InducedEdge& e : S.region()->induced_edges()) {
        double t = e.b * op.dinv_sqrt[e.i] * op.dinv_sqrt[e.j];
        row_abs[e.i] += t;
        row_abs[e.j] += t;
    }
    op.glow = std::numeric_limits<double>::infinity();
    op.gup = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < op.n; ++i) {
        op.glow = std::min(op.glow, op.diag[i] - row_abs[i]);
        op.gup = std::max(op.gup, op.diag[i] + row_abs[i]);
    }

    if (op.n < opts.dense_threshold) {
        op.dense = true;
        Eigen::MatrixXd A = Eigen::MatrixXd(S.matrix());
        op.B = op.dinv_sqrt.asDiagonal() * A * op.dinv_sqrt.asDiagonal();
        op.B = 0.5 * (op.B + op.B.transpose()).eval();
    } else {
        op.H = &S.matrix();
    }
    return op;
}

SymOp make_symop_dense(Eigen::MatrixXd B) {
    SymOp op;
    op.n = static_cast<int>(B.rows());
    op.dense = true;
    op.diag = B.diagonal();
    op.glow = std::numeric_limits<double>::infinity();
    op.gup = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < op.n; ++i) {
        double off = B.row(i).cwiseAbs().sum() - std::abs(B(i, i));
        op.glow = std::min(op.glow, B(i, i) - off);
        op.gup = std::max(op.gup, B(i, i) + off);
    }
    op.B = std::move(B);
    op.dinv_sqrt = Eigen::VectorXd::Ones(op.n);
    return op;
}

struct CoreResult {
    double value = 0.0;
    Eigen::VectorXd vector; // unit Euclidean norm in B coordinates
    double residual = 0.0;
    int iterations = 0;
};

// One solver per shift; rebuilt only when the shift moves.
class ShiftSolver {
public:
    ShiftSolver(const SymOp& op, const SolverOptions& opts) : op_(op), opts_(opts) {}

    void set_shift(double sigma) {
        sigma_ = sigma;
        if (op_.dense) {
            Eigen::MatrixXd A = op_.B;
            A.diagonal().array() -= sigma;
            llt_.compute(A);
            if (llt_.info() != Eigen::Success)
                throw DefinitenessError("inverse iteration: shifted matrix not positive definite");
        } else {
            precond_ = op_.diag.array() - sigma;
            if (!(precond_.minCoeff() > 0.0))
                throw DefinitenessError("inverse iteration: shifted diagonal not positive");
        }
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        if (op_.dense) {
            Eigen::VectorXd x = llt_.solve(rhs);
            if (!x.allFinite())
                throw ConvergenceError("inverse iteration: dense solve produced non-finite values");
            return x;
        }
        double sigma = sigma_;
        const SymOp& op = op_;
        return cg_solve([&op, sigma](const Eigen::VectorXd& x) {
                            return (op.apply(x) - sigma * x).eval();
                        },
                        precond_, rhs, opts_.solve_tol, cg_budget(opts_, op_.n),
                        "inverse iteration", /*best_effort=*/true);
    }

private:
    const SymOp& op_;
    const SolverOptions& opts_;
    double sigma_ = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd precond_;
};

void project_out(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis) {
    for (const auto& u : basis) v -= u.dot(v) * u;
}

CoreResult eig_smallest(const SymOp& op, const SolverOptions& opts,
                        const std::vector<Eigen::VectorXd>& deflate,
                        std::optional<double> sigma0 = std::nullopt) {
    const int n = op.n;
    const double span = std::max(op.gup - op.glow, 1e-12 * (std::abs(op.gup) + 1.0));
    const double scale = std::max({std::abs(op.glow), std::abs(op.gup), 1.0});
    const double tol_abs = opts.eig_tol * scale;
    const double delta0 = std::max(1e-8 * span, 1e-14 * scale);

    // Positive constant start for the ground state. Deflated runs need a
    // generic start instead: on symmetric regions the constant is exactly
    // orthogonal to split eigenvectors and the iteration would skip them.
    Eigen::VectorXd v;
    if (deflate.empty()) {
        v = Eigen::VectorXd::Ones(n);
    } else {
        std::mt19937_64 rng(0x6a09e667f3bcc909ULL);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        v = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return unif(rng); });
    }
    project_out(v, deflate);
    if (v.norm() < 1e-8 * std::sqrt(static_cast<double>(n))) {
        for (int i = 0; i < n; ++i) {
            v = Eigen::VectorXd::Zero(n);
            v[i] = 1.0;
            project_out(v, deflate);
            if (v.norm() > 1e-3) break;
        }
    }
    if (!(v.norm() > 0)) throw ConvergenceError("inverse iteration: no admissible start vector");
    v /= v.norm();

    double sigma = sigma0 ? *sigma0 : op.glow - delta0;
    ShiftSolver solver(op, opts);
    double retreat = delta0;
    int retreats = 0;
    while (true) {
        try {
            solver.set_shift(sigma);
            break;
        } catch (const DefinitenessError&) {
            sigma -= retreat;
            retreat *= 4.0;
            if (++retreats > 60)
                throw ConvergenceError("inverse iteration: could not find a definite shift");
        }
    }

    double rho = 0.0, res = std::numeric_limits<double>::infinity();
    int it = 0;
    for (it = 1; it <= opts.max_eig_iters; ++it) {
        Eigen::VectorXd w;
        try {
            w = solver.solve(v);
        } catch (const DefinitenessError&) {
            // Rayleigh shift overshot the eigenvalue: back off and refactor.
            sigma -= std::max(retreat, std::isfinite(res) ? 4.0 * res : 0.0);
            retreat *= 4.0;
            if (++retreats > 60)
                throw ConvergenceError("inverse iteration: shift management failed");
            solver.set_shift(sigma);
            continue;
        }
        project_out(w, deflate);
        double nw = w.norm();
        if (!(nw > 0.0) || !w.allFinite())
            throw ConvergenceError("inverse iteration: iterate collapsed");
        v = w / nw;

        Eigen::VectorXd Bv = op.apply(v);
        rho = v.dot(Bv);
        Eigen::VectorXd r = Bv - rho * v;
        project_out(r, deflate);
        res = r.norm();
        if (res <= tol_abs) break;

        double cand = rho - 2.0 * res;
        if (res <= 0.05 * span && cand > sigma + 0.05 * std::max(rho - sigma, delta0)) {
            const double old_sigma = sigma;
            try {
                solver.set_shift(cand);
                sigma = cand;
                retreat = delta0;
            } catch (const DefinitenessError&) {
                try {
                    solver.set_shift(cand - 4.0 * res);
                    sigma = cand - 4.0 * res;
                } catch (const DefinitenessError&) {
                    solver.set_shift(old_sigma); // known good
                }
            }
        }
    }
    if (res > tol_abs)
        throw ConvergenceError("inverse iteration: residual " + std::to_string(res) +
                               " above tolerance " + std::to_string(tol_abs) + " after " +
                               std::to_string(opts.max_eig_iters) + " iterations");

    CoreResult out;
    out.value = rho;
    out.vector = v;
    out.residual = res;
    out.iterations = it;
    return out;
}

// Positive-mass sign convention: flip so the dominant component is positive.
void fix_sign(Eigen::VectorXd& v) {
    double mass = v.sum();
    if (mass == 0.0) {
        int imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        mass = v[imax];
    }
    if (mass < 0.0) v = -v;
}

EigenPair to_pair(const DirichletSystem& S, const CoreResult& core) {
    EigenPair p;
    p.value = core.value;
    p.vector = S.measures().cwiseSqrt().cwiseInverse().cwiseProduct(core.vector);
    fix_sign(p.vector);
    p.residual = core.residual;
    p.iterations = core.iterations;
    return p;
}

} // namespace

EigenPair lambda_min(const DirichletSystem& S, const SolverOptions& opts) {
    SymOp op = make_symop(S, S.measures(), opts);
    return to_pair(S, eig_smallest(op, opts, {}));
}

std::pair<EigenPair, std::optional<EigenPair>> lambda_pair(const DirichletSystem& S,
                                                           const SolverOptions& opts) {
    SymOp op = make_symop(S, S.measures(), opts);
    CoreResult first = eig_smallest(op, opts, {});
    if (S.n() == 1) return {to_pair(S, first), std::nullopt};

    const double span = std::max(op.gup - op.glow, 1e-12 * (std::abs(op.gup) + 1.0));
    double sigma1 = first.value - 1e-3 * span - 1e-8 * span;
    CoreResult second = eig_smallest(op, opts, {first.vector}, sigma1);
    return {to_pair(S, first), to_pair(S, second)};
}

GeneralizedBottom generalized_lambda_min(const DirichletSystem& S, const Eigen::VectorXd& w,
                                         const SolverOptions& opts) {
    const int n = S.n();
    if (w.size() != n) throw DomainError("pencil: weight length does not match region size");
    int support = 0;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(w[i]) || w[i] < 0.0)
            throw DomainError("pencil: weight must be finite and nonnegative");
        support += (w[i] > 0.0);
    }
    if (support == 0)
        throw DegenerateWeightError("pencil: weight vanishes identically, no eigenvalue to take");

    GeneralizedBottom out;
    out.support = support;

    if (support == n) {
        SymOp op = make_symop(S, w, opts);
        CoreResult core = eig_smallest(op, opts, {});
        out.value = core.value;
        out.vector = w.cwiseSqrt().cwiseInverse().cwiseProduct(core.vector);
        fix_sign(out.vector);
        out.residual = core.residual;
        return out;
    }

    // Vanishing weight: eliminate the zero set by its Schur complement, so
    // the quotient is still an infimum over functions on the whole region.
    if (n > 2000)
        throw UnsupportedError(
            "pencil: weights with zeros are handled densely and the region exceeds 2000 vertices");

    std::vector<int> sup, zero;
    sup.reserve(static_cast<std::size_t>(support));
    for (int i = 0; i < n; ++i) (w[i] > 0.0 ? sup : zero).push_back(i);

    Eigen::MatrixXd H = S.dense();
    const int ns = static_cast<int>(sup.size());
    const int nz = static_cast<int>(zero.size());
    Eigen::MatrixXd Hss(ns, ns), Hzz(nz, nz), Hzs(nz, ns);
    for (int a = 0; a < ns; ++a)
        for (int b = 0; b < ns; ++b) Hss(a, b) = H(sup[static_cast<std::size_t>(a)], sup[static_cast<std::size_t>(b)]);
    for (int a = 0; a < nz; ++a)
        for (int b = 0; b < nz; ++b) Hzz(a, b) = H(zero[static_cast<std::size_t>(a)], zero[static_cast<std::size_t>(b)]);
    for (int a = 0; a < nz; ++a)
        for (int b = 0; b < ns; ++b) Hzs(a, b) = H(zero[static_cast<std::size_t>(a)], sup[static_cast<std::size_t>(b)]);

    Eigen::LLT<Eigen::MatrixXd> llt(Hzz);
    if (llt.info() != Eigen::Success)
        throw DefinitenessError(
            "pencil: the operator is not positive definite off the weight's support, "
            "the quotient is unbounded below");
    Eigen::MatrixXd X = llt.solve(Hzs); // Hzz^{-1} Hzs
    Eigen::MatrixXd schur = Hss - Hzs.transpose() * X;
    schur = 0.5 * (schur + schur.transpose()).eval();

    Eigen::VectorXd ws(ns);
    for (int a = 0; a < ns; ++a) ws[a] = w[sup[static_cast<std::size_t>(a)]];
    Eigen::VectorXd dws = ws.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd B = dws.asDiagonal() * schur * dws.asDiagonal();
    B = 0.5 * (B + B.transpose()).eval();

    SymOp op = make_symop_dense(std::move(B));
    CoreResult core = eig_smallest(op, opts, {});

    Eigen::VectorXd phi_s = dws.cwiseProduct(core.vector);
    Eigen::VectorXd phi_z = -X * phi_s;
    out.value = core.value;
    out.vector = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < ns; ++a) out.vector[sup[static_cast<std::size_t>(a)]] = phi_s[a];
    for (int a = 0; a < nz; ++a) out.vector[zero[static_cast<std::size_t>(a)]] = phi_z[a];
    fix_sign(out.vector);
    out.residual = core.residual;
    return out;
}

Eigen::VectorXd resolvent_apply(const DirichletSystem& S, double lambda,
                                const Eigen::VectorXd& f, const SolverOptions& opts) {
    if (!std::isfinite(lambda)) throw DomainError("resolvent: spectral parameter must be finite");
    if (f.size() != S.n()) throw DomainError("resolvent: vector length does not match region size");
    Eigen::VectorXd shift = lambda * S.measures();
    Eigen::VectorXd rhs = S.measures().cwiseProduct(f);
    try {
        return solve_spd(S, shift, rhs, opts, "resolvent");
    } catch (const DefinitenessError& e) {
        throw SpectralParameterError(
            std::string("resolvent: spectral parameter is not below the bottom of the spectrum (") +
            e.what() + ")");
    }
}

// --------------------------------------------------------------------------
// Heat semigroup

Eigen::VectorXd krylov_expm_apply(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                                  const Eigen::VectorXd& v, double t, double tol,
                                  int max_krylov) {
    if (t < 0.0) throw DomainError("semigroup: negative time");
    const int n = static_cast<int>(v.size());
    if (t == 0.0 || v.norm() == 0.0) return v;

    Eigen::VectorXd u = v;
    double t_rem = t;
    int steps = 0;
    while (t_rem > 0.0) {
        if (++steps > 100000) throw ConvergenceError("semigroup: substepping did not terminate");
        const double beta = u.norm();
        if (beta == 0.0) return u;
        const int m = std::min(max_krylov, n);

        Eigen::MatrixXd V(n, m);
        Eigen::VectorXd alpha(m), beta_off(m);
        V.col(0) = u / beta;
        int k = 0;
        bool invariant = false;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd w = apply(V.col(j));
            if (j > 0) w -= beta_off[j - 1] * V.col(j - 1);
            alpha[j] = V.col(j).dot(w);
            w -= alpha[j] * V.col(j);
            // Full reorthogonalization, two passes.
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i <= j; ++i) w -= V.col(i).dot(w) * V.col(i);
            double b = w.norm();
            beta_off[j] = b;
            k = j + 1;
            if (b <= 1e-13 * (std::abs(alpha[j]) + beta)) {
                invariant = true;
                break;
            }
            if (j + 1 < m) V.col(j + 1) = w / b;
        }

        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
        for (int j = 0; j < k; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < k) T(j, j + 1) = T(j + 1, j) = beta_off[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        if (es.info() != Eigen::Success)
            throw ConvergenceError("semigroup: small eigenproblem failed");
        const Eigen::VectorXd& d = es.eigenvalues();
        const Eigen::MatrixXd& Q = es.eigenvectors();
        Eigen::VectorXd q1 = Q.row(0).transpose();

        double tau = t_rem;
        Eigen::VectorXd small;
        for (int shrink = 0;; ++shrink) {
            small = Q * (-tau * d.array()).exp().matrix().cwiseProduct(q1).eval();
            double err = invariant ? 0.0
                                   : beta_off[k - 1] * std::abs(small[k - 1]) * tau * beta;
            if (err <= 0.25 * tol * beta || invariant || k >= n) break;
            if (shrink >= 60)
                throw ConvergenceError("semigroup: local error control failed to accept a step");
            tau *= 0.5;
        }
        u = V.leftCols(k) * (beta * small);
        t_rem -= tau;
    }
    return u;
}

HeatPlan HeatPlan::make(const DirichletSystem& S, const SolverOptions& opts) {
    HeatPlan plan;
    plan.S_ = &S;
    plan.opts_ = opts;
    plan.msqrt_ = S.measures().cwiseSqrt();
    plan.msqrt_inv_ = plan.msqrt_.cwiseInverse();
    plan.dense_ = S.n() < opts.dense_threshold;
    if (plan.dense_) {
        Eigen::MatrixXd B = plan.msqrt_inv_.asDiagonal() * S.dense() * plan.msqrt_inv_.asDiagonal();
        B = 0.5 * (B + B.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
        if (es.info() != Eigen::Success)
            throw ConvergenceError("heat: dense eigendecomposition failed");
        plan.evals_ = es.eigenvalues();
        plan.evecs_ = es.eigenvectors();
    }
    return plan;
}

Eigen::VectorXd HeatPlan::apply(double t, const Eigen::VectorXd& f) const {
    if (t < 0.0) throw DomainError("heat: negative time");
    if (f.size() != S_->n()) throw DomainError("heat: vector length does not match region size");
    if (t == 0.0) return f;
    Eigen::VectorXd g = msqrt_.cwiseProduct(f);
    Eigen::VectorXd y;
    if (dense_) {
        Eigen::VectorXd coef = evecs_.transpose() * g;
        y = evecs_ * (-t * evals_.array()).exp().matrix().cwiseProduct(coef);
    } else {
        const DirichletSystem& S = *S_;
        const Eigen::VectorXd& mi = msqrt_inv_;
        y = krylov_expm_apply(
            [&S, &mi](const Eigen::VectorXd& x) {
                return mi.cwiseProduct(S.matrix() * mi.cwiseProduct(x)).eval();
            },
            g, t, opts_.heat_tol);
    }
    return msqrt_inv_.cwiseProduct(y);
}

double HeatPlan::kernel(double t, int ix, int iy) const {
    if (!S_->unit_measure())
        throw DomainError("heat: kernel values are defined for unit vertex measure only");
    if (ix < 0 || ix >= S_->n() || iy < 0 || iy >= S_->n())
        throw DomainError("heat: vertex index outside region");
    if (t < 0.0) throw DomainError("heat: negative time");
    if (dense_) {
        double sum = 0.0;
        for (int j = 0; j < S_->n(); ++j)
            sum += std::exp(-t * evals_[j]) * evecs_(ix, j) * evecs_(iy, j);
        return sum;
    }
    Eigen::VectorXd ex = Eigen::VectorXd::Zero(S_->n());
    ex[ix] = 1.0;
    return apply(t, ex)[iy];
}

const Eigen::VectorXd& HeatPlan::eigenvalues() const {
    if (!dense_) throw DomainError("heat: spectral data only exists on the dense route");
    return evals_;
}

const Eigen::MatrixXd& HeatPlan::eigenvectors() const {
    if (!dense_) throw DomainError("heat: spectral data only exists on the dense route");
    return evecs_;
}

Eigen::VectorXd heat_apply(const DirichletSystem& S, double t, const Eigen::VectorXd& f,
                           const SolverOptions& opts) {
    return HeatPlan::make(S, opts).apply(t, f);
}

bool certify_nonnegative(const DirichletSystem& S, double slack, const SolverOptions& opts) {
    const int n = S.n();
    if (n < opts.dense_threshold) {
        Eigen::MatrixXd A = S.dense();
        A.diagonal() += slack * S.measures();
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        return llt.info() == Eigen::Success;
    }
    Eigen::SparseMatrix<double> A = S.matrix();
    Eigen::VectorXd bump = slack * S.measures();
    for (int i = 0; i < n; ++i) A.coeffRef(i, i) += bump[i];
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd& D = ldlt.vectorD();
    return D.minCoeff() >= -1e-12 * D.cwiseAbs().maxCoeff();
}

} // namespace sgl
