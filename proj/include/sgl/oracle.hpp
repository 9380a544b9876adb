#pragma once

#include <cstdint>

#include "sgl/region_function.hpp"

namespace sgl {
namespace oracle {

// Reference implementations used to cross-check the main solvers. Everything
// here is direct and dense on purpose: no CG, no inverse iteration, no
// Krylov, so a bug shared with the main path would have to live in the
// problem statement rather than the algorithm.

// Direct dense solve of H_K g = 1_x from its own assembly of the region.
RegionFunction dense_green(const RegionPtr& region, VertexId x);

struct DenseSpectrum {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // columns, orthonormal in ℓ²(m)
};

// Full eigendecomposition of the region operator in ℓ²(m).
DenseSpectrum dense_spectrum(const RegionPtr& region);

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long boxes = 0;
    long evaluations = 0;
};

// G_{Z^d}(0,0) = (2π)^{-d} ∫_{[-π,π]^d} (2 Σ_i (1 - cos θ_i))^{-1} dθ by
// adaptive tensor Gauss-Kronrod quadrature over [0,π]^d. initial_splits
// pre-halves every axis that many times (doubling resolution per unit
// length), which the stability tests use. Diverges for d < 3.
QuadratureResult lattice_green_quadrature(int d, double tol, int initial_splits = 0);

struct ReturnMassEstimate {
    double estimate = 0.0;
    double half_width = 0.0; // 95% CLT interval from per-trial visit counts
    long trials = 0;
    long horizon = 0;
};

// Monte-Carlo estimate of Σ_{n ≤ horizon} P^n(x,x) for the simple b-weighted
// walk P = D^{-1}A. Defined only for q ≡ 0; the walk checks this at every
// vertex it visits. Deterministic for a fixed seed regardless of thread
// count (per-trial RNG streams).
ReturnMassEstimate rw_return_estimate(const ModelPtr& model, VertexId x, long horizon,
                                      long trials, std::uint64_t seed);

struct ReturnMassSeries {
    std::vector<long> horizons;
    std::vector<double> estimates;   // shared trajectories: nondecreasing by construction
    std::vector<double> half_widths;
};

// Return mass at several horizons from one common set of trajectories, so
// growth between horizons is a per-trial statistic rather than a difference
// of independent estimates.
ReturnMassSeries rw_return_series(const ModelPtr& model, VertexId x,
                                  const std::vector<long>& horizons, long trials,
                                  std::uint64_t seed);

struct RandomGraphSpec {
    int min_vertices = 5;
    int max_vertices = 200;
    double edge_prob = 0.05;
    enum class QMode { Zero, NonNegative, ShiftedCertified } q_mode = QMode::NonNegative;
    bool random_measure = false;
    double certify_margin = 1e-3; // pencil bottom after shifting, QMode::ShiftedCertified
};

// Connected random instance: uniform attachment backbone plus Erdős–Rényi
// extras, weights in (0,1]. ShiftedCertified draws signed q and then shifts
// it so the dense spectrum of the whole graph certifies h ≥ margin.
std::shared_ptr<const ExplicitGraph> random_graph(const RandomGraphSpec& spec,
                                                  std::uint64_t seed);

// SplitMix64 step; used to derive independent RNG streams.
std::uint64_t splitmix64(std::uint64_t x);

} // namespace oracle
} // namespace sgl
