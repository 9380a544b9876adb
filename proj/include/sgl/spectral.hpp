#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sgl/evidence.hpp"
#include "sgl/region.hpp"
#include "sgl/region_function.hpp"
#include "sgl/solver.hpp"
#include "sgl/system.hpp"

namespace sgl {

// Bottom eigenvalue of the Dirichlet restriction at levels 1..N. Decreasing
// by domain monotonicity; the limit is the spectral bottom on the whole
// graph.
EvidenceSeries lambda0_series(const ExhaustionFamily& family, int N,
                              const SolverOptions& opts = {});

// Persson-style probe: remove a ball of the given level and track the bottom
// of the punctured regions. Each punctured bottom dominates the matching
// full-region bottom; growing the hole pushes the values toward the bottom
// of the essential spectrum.
struct EssentialProbeReport {
    EvidenceSeries base;                // full-region bottoms at 1..N
    std::vector<int> hole_levels;
    std::vector<EvidenceSeries> probes; // probe k covers hole_levels[k]+1 .. N
    double best_estimate = 0.0;         // largest final punctured bottom
    std::string caveat;
};

EssentialProbeReport lambda0_ess_probe(const FamilyPtr& family,
                                       const std::vector<int>& hole_levels, int N,
                                       const SolverOptions& opts = {});

// Positive function u on the region with (H - λ m) u = m pointwise, checked
// row by row against the model rather than the solver's matrix. A verified
// witness certifies λ below the region's spectral bottom.
struct WitnessReport {
    RegionFunction u;
    double lambda = 0.0;
    double min_value = 0.0; // min of u over the region
    double row_defect = 0.0; // max |(H - λm)u - m| over the region
    bool verified = false;
};

WitnessReport ap_witness(const DirichletSystem& S, double lambda, double tol = 1e-8,
                         const SolverOptions& opts = {});

// Chain bound for positive supersolutions of (H - f) u ≥ 0 on a window W:
// every step x→y costs d(x)/b(x,y) with d(x) = deg(x) + q(x) - f(x), so
// sup_W u / inf_W u is at most the max over ordered pairs of the cheapest
// simple path inside W.
struct HarnackInstance {
    ModelPtr model;
    std::vector<VertexId> window;
    std::function<double(VertexId)> f; // null means 0
    int size_cap = 16;
};

// Empty when some d(x) ≤ 0 (no finite constant certified this way). Throws
// SizeError past size_cap or the path-enumeration budget, DomainError when
// the window is not connected.
std::optional<double> harnack_constant(const HarnackInstance& instance);

} // namespace sgl
