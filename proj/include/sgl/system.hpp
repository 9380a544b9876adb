#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sgl/region_function.hpp"

namespace sgl {

// The Dirichlet restriction H_K of H = L + q to a finite region: diagonal
// entries carry the full weighted degree over all graph neighbors (inside or
// not) plus q, off-diagonal entries are -b on induced edges. Functions on K
// are implicitly 0 outside, so <H_K φ, φ> equals the form h(φ) restricted to
// functions supported in K. Immutable after assembly.
class DirichletSystem {
public:
    static DirichletSystem assemble(RegionPtr region);

    int n() const { return static_cast<int>(diag_.size()); }
    const RegionPtr& region() const { return region_; }

    const Eigen::SparseMatrix<double>& matrix() const { return H_; }
    const Eigen::VectorXd& diagonal() const { return diag_; }
    // Vertex measures m, the weights of the ℓ²(m) pairing.
    const Eigen::VectorXd& measures() const { return m_; }
    bool unit_measure() const { return unit_measure_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return H_ * u; }
    double quad(const Eigen::VectorXd& u) const { return u.dot(H_ * u); }

    // Row sums of |entries| of M^{-1/2} H M^{-1/2}; Gershgorin data for the
    // ℓ²(m) spectrum.
    void gershgorin(double& lower, double& upper) const;

    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(H_); }

private:
    DirichletSystem() = default;

    RegionPtr region_;
    Eigen::SparseMatrix<double> H_;
    Eigen::VectorXd diag_, m_;
    bool unit_measure_ = true;
};

} // namespace sgl
