#pragma once

#include <vector>

#include "sgl/solver.hpp"

namespace sgl {

// Long-time decay rate of the heat kernel between two vertices, tracked as
// -log p_t(x,y)/t along a time grid. The rate tends to the spectral bottom;
// the a-priori error of the final grid value is |log Ψ(x)Ψ(y)| / t_final.
struct LongTimeReport {
    std::vector<double> times;
    std::vector<double> rates;   // -log p_t / t at each grid time
    double estimate = 0.0;       // final rate
    double slope_estimate = 0.0; // log-kernel slope over the last interval
    double lambda0 = 0.0;        // inverse-iteration bottom, for comparison
    double gap = 0.0;            // +inf on one-vertex regions
    double bound = 0.0;          // |log Ψ(x)Ψ(y)| / t_final
    bool eigen_path = false;     // log-sum-exp fallback engaged past underflow
};

// Unit measure only. Requires gap * t_final ≥ 20 so the grid tail actually
// sits in the asymptotic regime.
LongTimeReport long_time_rate(const DirichletSystem& S, VertexId x, VertexId y,
                              std::vector<double> times, const SolverOptions& opts = {});

// e^{λ0 t} p_t(x,y) at a horizon with gap·t ≈ 22, through two disjoint
// routes: dense eigenprojection, and Lanczos stepping of the matvec shifted
// by the inverse-iteration bottom. Both approximate Ψ(x)Ψ(y).
struct GroundStateLimit {
    double spectral_value = 0.0;
    double stepped_value = 0.0;
    double product = 0.0; // Ψ(x)Ψ(y) from the inverse-iteration pair
    double time = 0.0;
    double gap = 0.0;
};

GroundStateLimit heat_gs_limit(const DirichletSystem& S, VertexId x, VertexId y,
                               const SolverOptions& opts = {});

// α G_{-α}(x, x0) for α ↓ 0. The products converge to φ(x)φ(x0) when the
// bottom eigenvalue vanishes (φ the ℓ²(m)-normalized bottom vector) and to
// zero when it is positive; `comparison` holds that limit from the
// eigenvalue route.
struct ResolventLimitReport {
    std::vector<double> alphas;   // positive, decreasing toward zero
    std::vector<double> products; // α · G_{-α}(x, x0)
    double comparison = 0.0;
    double lambda0 = 0.0;
};

ResolventLimitReport lambda_green_limit(const DirichletSystem& S, VertexId x, VertexId x0,
                                        std::vector<double> alphas = {},
                                        const SolverOptions& opts = {});

} // namespace sgl
