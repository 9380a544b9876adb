#pragma once

#include <Eigen/Dense>
#include <functional>

#include "sgl/region.hpp"

namespace sgl {

// A real function on a region's vertices, extended by zero on the rest of
// the graph. Values are indexed by the region's canonical order.
class RegionFunction {
public:
    RegionFunction(RegionPtr region, Eigen::VectorXd values)
        : region_(std::move(region)), values_(std::move(values)) {
        if (!region_) throw DomainError("region function: null region");
        if (values_.size() != region_->size())
            throw DomainError("region function: value count does not match region size");
    }

    static RegionFunction zero(RegionPtr region) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(region->size());
        return RegionFunction(std::move(region), std::move(v));
    }

    static RegionFunction constant(RegionPtr region, double c) {
        Eigen::VectorXd v = Eigen::VectorXd::Constant(region->size(), c);
        return RegionFunction(std::move(region), std::move(v));
    }

    // Indicator of a single vertex, which must lie in the region.
    static RegionFunction delta(RegionPtr region, VertexId x) {
        int i = region->index_of(x);
        if (i < 0) throw DomainError("region function: vertex not in region");
        Eigen::VectorXd v = Eigen::VectorXd::Zero(region->size());
        v[i] = 1.0;
        return RegionFunction(std::move(region), std::move(v));
    }

    static RegionFunction tabulate(RegionPtr region,
                                   const std::function<double(VertexId)>& f) {
        Eigen::VectorXd v(region->size());
        for (int i = 0; i < region->size(); ++i) v[i] = f(region->vertex(i));
        return RegionFunction(std::move(region), std::move(v));
    }

    const RegionPtr& region() const { return region_; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::VectorXd& values() { return values_; }
    int size() const { return region_->size(); }

    double operator[](int i) const { return values_[i]; }
    double& operator[](int i) { return values_[i]; }

    // Zero outside the region by convention.
    double value_at(VertexId v) const {
        int i = region_->index_of(v);
        return i < 0 ? 0.0 : values_[i];
    }

private:
    RegionPtr region_;
    Eigen::VectorXd values_;
};

} // namespace sgl
