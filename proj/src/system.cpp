#include "sgl/system.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sgl {

DirichletSystem DirichletSystem::assemble(RegionPtr region) {
    if (!region) throw DomainError("assemble: null region");
    const int n = region->size();

    DirichletSystem sys;
    sys.region_ = region;
    sys.diag_.resize(n);
    sys.m_.resize(n);
    sys.unit_measure_ = true;
    for (int i = 0; i < n; ++i) {
        sys.diag_[i] = region->full_degree(i) + region->potential(i);
        sys.m_[i] = region->measure(i);
        if (sys.m_[i] != 1.0) sys.unit_measure_ = false;
    }

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) + 2 * region->induced_edges().size());
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, sys.diag_[i]);
    for (const InducedEdge& e : region->induced_edges()) {
        trip.emplace_back(e.i, e.j, -e.b);
        trip.emplace_back(e.j, e.i, -e.b);
    }
    sys.H_.resize(n, n);
    sys.H_.setFromTriplets(trip.begin(), trip.end());
    sys.H_.makeCompressed();
    return sys;
}

void DirichletSystem::gershgorin(double& lower, double& upper) const {
    const int size = n();
    Eigen::VectorXd inv_sqrt_m = m_.cwiseSqrt().cwiseInverse();
    Eigen::VectorXd row_abs = Eigen::VectorXd::Zero(size);
    for (const InducedEdge& e : region_->induced_edges()) {
        double s = e.b * inv_sqrt_m[e.i] * inv_sqrt_m[e.j];
        row_abs[e.i] += s;
        row_abs[e.j] += s;
    }
    lower = std::numeric_limits<double>::infinity();
    upper = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < size; ++i) {
        double center = diag_[i] / m_[i];
        lower = std::min(lower, center - row_abs[i]);
        upper = std::max(upper, center + row_abs[i]);
    }
}

} // namespace sgl
