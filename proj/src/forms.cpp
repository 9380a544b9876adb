#include "sgl/forms.hpp"

#include <cmath>
#include <cstdlib>

namespace sgl {

double apply_H(const GraphModel& model, const RegionFunction& u, VertexId x) {
    if (!model.contains(x)) throw DomainError("apply_H: vertex not in graph");
    const double ux = u.value_at(x);
    double sum = model.potential(x) * ux;
    std::vector<Edge> nb;
    model.neighbors(x, nb);
    for (const Edge& e : nb) sum += e.weight * (ux - u.value_at(e.to));
    return sum;
}

namespace {

// Both functions read through the same region so the edge iteration can use
// its precomputed induced/boundary lists. Distinct regions merge first.
RegionPtr common_region(const RegionFunction& a, const RegionFunction& b) {
    if (a.region() == b.region()) return a.region();
    std::vector<VertexId> verts = a.region()->vertices();
    const auto& more = b.region()->vertices();
    verts.insert(verts.end(), more.begin(), more.end());
    ModelPtr keep = a.region()->model();
    return FiniteRegion::over(keep, std::move(verts),
                              std::max(a.region()->level(), b.region()->level()));
}

} // namespace

double quad_form(const GraphModel& model, const RegionFunction& phi,
                 const RegionFunction& psi) {
    (void)model;
    RegionPtr K = common_region(phi, psi);
    const bool shared = (K == phi.region()) && (K == psi.region());

    auto phi_at = [&](int i) {
        return shared ? phi[i] : phi.value_at(K->vertex(i));
    };
    auto psi_at = [&](int i) {
        return shared ? psi[i] : psi.value_at(K->vertex(i));
    };

    double sum = 0.0;
    for (const InducedEdge& e : K->induced_edges())
        sum += e.b * (phi_at(e.i) - phi_at(e.j)) * (psi_at(e.i) - psi_at(e.j));
    for (const BoundaryEdge& e : K->boundary_edges())
        sum += e.b * phi_at(e.i) * psi_at(e.i);
    for (int i = 0; i < K->size(); ++i) sum += K->potential(i) * phi_at(i) * psi_at(i);
    return sum;
}

double quad_form(const GraphModel& model, const RegionFunction& phi) {
    return quad_form(model, phi, phi);
}

namespace {

double positive_v(const RegionFunction& v, VertexId x, const GraphModel& model) {
    double val = v.value_at(x);
    if (!(val > 0.0))
        throw DomainError("ground state transform: v not positive at " + model.label(x));
    return val;
}

} // namespace

double gst_form(const GraphModel& model, const RegionFunction& v, const RegionFunction& phi) {
    const RegionPtr& K = phi.region();
    double sum = 0.0;
    for (const InducedEdge& e : K->induced_edges()) {
        double d = phi[e.i] - phi[e.j];
        if (d == 0.0) continue;
        sum += e.b * positive_v(v, K->vertex(e.i), model) *
               positive_v(v, K->vertex(e.j), model) * d * d;
    }
    for (const BoundaryEdge& e : K->boundary_edges()) {
        double d = phi[e.i];
        if (d == 0.0) continue;
        sum += e.b * positive_v(v, K->vertex(e.i), model) * positive_v(v, e.outside, model) *
               d * d;
    }
    return sum;
}

double gst_identity_residual(const GraphModel& model, const RegionFunction& v,
                             const std::function<double(VertexId)>& f,
                             const RegionFunction& phi, double check_tol) {
    const RegionPtr& K = phi.region();

    // Verify Hv = f·v where the identity actually uses it.
    for (int i = 0; i < K->size(); ++i) {
        if (phi[i] == 0.0) continue;
        VertexId x = K->vertex(i);
        double vx = positive_v(v, x, model);
        double hv = apply_H(model, v, x);
        double fv = f(x) * vx;
        double scale = std::abs(fv) + std::abs(vx) * (K->full_degree(i) + 1.0);
        if (std::abs(hv - fv) > check_tol * scale)
            throw DomainError("ground state transform: Hv = f*v fails at " + model.label(x) +
                              " (defect " + std::to_string(hv - fv) + ")");
    }

    Eigen::VectorXd ratio(K->size());
    for (int i = 0; i < K->size(); ++i)
        ratio[i] = phi[i] == 0.0 ? 0.0 : phi[i] / positive_v(v, K->vertex(i), model);
    RegionFunction phi_over_v(K, std::move(ratio));

    double potential_term = 0.0;
    for (int i = 0; i < K->size(); ++i)
        if (phi[i] != 0.0) potential_term += f(K->vertex(i)) * phi[i] * phi[i];

    return std::abs(quad_form(model, phi) - gst_form(model, v, phi_over_v) - potential_term);
}

ExtendedFormValue extended_form(const GraphModel& model, const RegionFunction& v,
                                const RegionFunction& g) {
    const RegionPtr& K = g.region();
    ExtendedFormValue out;
    for (const InducedEdge& e : K->induced_edges()) {
        double vi = positive_v(v, K->vertex(e.i), model);
        double vj = positive_v(v, K->vertex(e.j), model);
        double d = g[e.i] / vi - g[e.j] / vj;
        out.interior_sum += e.b * vi * vj * d * d;
    }
    for (const BoundaryEdge& e : K->boundary_edges()) {
        if (g[e.i] == 0.0) continue; // zero either way, no v sample needed
        double vi = positive_v(v, K->vertex(e.i), model);
        double vy = v.value_at(e.outside);
        if (!(vy > 0.0)) {
            out.truncated = true;
            continue;
        }
        double d = g[e.i] / vi;
        out.boundary_sum += e.b * vi * vy * d * d;
    }
    return out;
}

} // namespace sgl
