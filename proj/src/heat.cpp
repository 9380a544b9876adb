#include "sgl/heat.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sgl {

namespace {

int index_in(const DirichletSystem& S, VertexId v, const char* what) {
    int i = S.region()->index_of(v);
    if (i < 0) throw DomainError(std::string(what) + ": vertex not in the region");
    return i;
}

double operator_scale(const DirichletSystem& S) {
    double lo = 0.0, hi = 0.0;
    S.gershgorin(lo, hi);
    return std::max({1.0, std::abs(lo), std::abs(hi)});
}

// Bottom pair; the gap is +inf when there is no second eigenvalue.
double spectral_gap(const DirichletSystem& S, const SolverOptions& opts, EigenPair& bottom) {
    auto [first, second] = lambda_pair(S, opts);
    bottom = std::move(first);
    if (!second) return std::numeric_limits<double>::infinity();
    return second->value - bottom.value;
}

// Kernel values this small get their logarithm from the spectral expansion
// instead; beyond it the plain double is still far from denormal trouble.
constexpr double kUnderflowGuard = 1e-280;

} // namespace

LongTimeReport long_time_rate(const DirichletSystem& S, VertexId x, VertexId y,
                              std::vector<double> times, const SolverOptions& opts) {
    if (!S.unit_measure())
        throw DomainError("long-time rate: kernel asymptotics need unit vertex measure");
    if (times.empty()) throw DomainError("long-time rate: empty time grid");
    for (std::size_t k = 0; k < times.size(); ++k)
        if (!(times[k] > 0.0) || (k > 0 && !(times[k] > times[k - 1])))
            throw DomainError("long-time rate: times must be positive and increasing");

    const int ix = index_in(S, x, "long-time rate");
    const int iy = index_in(S, y, "long-time rate");

    EigenPair bottom;
    double gap = spectral_gap(S, opts, bottom);
    if (!(gap * times.back() >= 20.0))
        throw DomainError("long-time rate: grid too short for the spectral gap "
                          "(need gap * t_final >= 20)");
    double product = bottom.vector[ix] * bottom.vector[iy];
    if (!(product > 0.0))
        throw DomainError("long-time rate: ground state vanishes at the requested pair");

    HeatPlan plan = HeatPlan::make(S, opts);
    LongTimeReport report;
    report.times = std::move(times);
    report.lambda0 = bottom.value;
    report.gap = gap;
    report.bound = std::abs(std::log(product)) / report.times.back();

    std::vector<double> logs;
    for (double t : report.times) {
        double p = plan.kernel(t, ix, iy);
        double logp;
        if (p > kUnderflowGuard) {
            logp = std::log(p);
        } else {
            if (!plan.dense())
                throw UnsupportedError(
                    "long-time rate: kernel underflow outside the dense spectral route");
            report.eigen_path = true;
            const Eigen::VectorXd& ev = plan.eigenvalues();
            const Eigen::MatrixXd& V = plan.eigenvectors();
            double sum = 0.0;
            for (int j = 0; j < ev.size(); ++j)
                sum += std::exp(-(ev[j] - ev[0]) * t) * V(ix, j) * V(iy, j);
            if (!(sum > 0.0))
                throw DomainError("long-time rate: kernel not positive at t = " +
                                  std::to_string(t));
            logp = -ev[0] * t + std::log(sum);
        }
        logs.push_back(logp);
        report.rates.push_back(-logp / t);
    }

    report.estimate = report.rates.back();
    const std::size_t K = logs.size();
    report.slope_estimate =
        K >= 2 ? -(logs[K - 1] - logs[K - 2]) / (report.times[K - 1] - report.times[K - 2])
               : report.estimate;
    return report;
}

GroundStateLimit heat_gs_limit(const DirichletSystem& S, VertexId x, VertexId y,
                               const SolverOptions& opts) {
    if (!S.unit_measure())
        throw DomainError("ground-state heat limit: needs unit vertex measure");
    const int ix = index_in(S, x, "ground-state heat limit");
    const int iy = index_in(S, y, "ground-state heat limit");

    HeatPlan plan = HeatPlan::make(S, opts);
    if (!plan.dense())
        throw UnsupportedError(
            "ground-state heat limit: region too large for the dense spectral route");

    EigenPair bottom;
    double gap = spectral_gap(S, opts, bottom);
    if (!(gap > 1e-8 * operator_scale(S)))
        throw MultiplicityError(
            "ground-state heat limit: bottom eigenvalue not simple at tolerance");
    double t = std::isfinite(gap) ? 22.0 / gap : 1.0;
    const Eigen::VectorXd& ev = plan.eigenvalues();
    const Eigen::MatrixXd& V = plan.eigenvectors();
    double spectral = 0.0;
    for (int j = 0; j < ev.size(); ++j)
        spectral += std::exp(-(ev[j] - ev[0]) * t) * V(ix, j) * V(iy, j);

    // Second route never touches the eigendecomposition: Lanczos stepping of
    // the matvec shifted by the inverse-iteration bottom computes
    // e^{λ0 t} p_t directly, with no e^{λ0 t} amplification afterwards.
    auto shifted = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return S.apply(v) - bottom.value * v;
    };
    Eigen::VectorXd e_y = Eigen::VectorXd::Zero(S.n());
    e_y[iy] = 1.0;
    Eigen::VectorXd column = krylov_expm_apply(shifted, e_y, t, opts.heat_tol);

    return GroundStateLimit{spectral, column[ix], bottom.vector[ix] * bottom.vector[iy], t, gap};
}

ResolventLimitReport lambda_green_limit(const DirichletSystem& S, VertexId x, VertexId x0,
                                        std::vector<double> alphas, const SolverOptions& opts) {
    const int ix = index_in(S, x, "resolvent limit");
    const int ix0 = index_in(S, x0, "resolvent limit");
    if (alphas.empty())
        for (int k = 1; k <= 20; ++k) alphas.push_back(std::pow(2.0, -k));
    for (std::size_t k = 0; k < alphas.size(); ++k)
        if (!(alphas[k] > 0.0) || (k > 0 && !(alphas[k] < alphas[k - 1])))
            throw DomainError("resolvent limit: offsets must be positive and decreasing");

    ResolventLimitReport report;
    report.alphas = std::move(alphas);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(S.n());
    f[ix0] = 1.0 / S.measures()[ix0];
    for (double a : report.alphas)
        report.products.push_back(a * resolvent_apply(S, -a, f, opts)[ix]);

    EigenPair bottom = lambda_min(S, opts);
    report.lambda0 = bottom.value;
    report.comparison = std::abs(bottom.value) <= 1e-8 * operator_scale(S)
                            ? bottom.vector[ix] * bottom.vector[ix0]
                            : 0.0;
    return report;
}

} // namespace sgl
