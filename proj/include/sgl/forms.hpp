#pragma once

#include <functional>

#include "sgl/region_function.hpp"

namespace sgl {

// Pointwise formal operator: (Hu)(x) = Σ_y b(x,y)(u(x) − u(y)) + q(x)u(x),
// with u read as 0 outside its region.
double apply_H(const GraphModel& model, const RegionFunction& u, VertexId x);

// Bilinear form h(φ, ψ) = ½ Σ_{x,y} b(x,y)(φ(x)−φ(y))(ψ(x)−ψ(y)) + Σ q φ ψ.
// Each unordered pair is summed once (the ½ is absorbed); edges leaving the
// region contribute b(x,y)·φ(x)ψ(x) because functions vanish outside.
double quad_form(const GraphModel& model, const RegionFunction& phi, const RegionFunction& psi);
double quad_form(const GraphModel& model, const RegionFunction& phi);

// Transformed-energy form h_v(φ) = ½ Σ b(x,y) v(x)v(y) (φ(x)−φ(y))².
// v must be strictly positive at every vertex incident to a nonzero
// difference of φ.
double gst_form(const GraphModel& model, const RegionFunction& v, const RegionFunction& phi);

// |h(φ) − h_v(φ/v) − Σ f φ²| for a pair (v, f) with Hv = f·v. The identity's
// precondition is verified with apply_H at every support vertex of φ; a
// violation throws instead of returning a meaningless residual.
double gst_identity_residual(const GraphModel& model, const RegionFunction& v,
                             const std::function<double(VertexId)>& f,
                             const RegionFunction& phi, double check_tol = 1e-8);

// Partial evaluation of the v-weighted Dirichlet energy of g/v over a region:
// interior_sum collects the region's induced edges, boundary_sum the edges
// leaving it (g is 0 outside). truncated marks boundary terms that could not
// be evaluated because v was not available (or not positive) one step out.
struct ExtendedFormValue {
    double interior_sum = 0.0;
    double boundary_sum = 0.0;
    bool truncated = false;

    double value() const { return interior_sum + boundary_sum; }
};

ExtendedFormValue extended_form(const GraphModel& model, const RegionFunction& v,
                                const RegionFunction& g);

} // namespace sgl
