#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "sgl/graph.hpp"

namespace sgl {

struct InducedEdge {
    int i, j; // region indices, i < j
    double b;
};

struct BoundaryEdge {
    int i;            // region index of the inside endpoint
    VertexId outside; // the endpoint one step outside
    double b;
};

// A finite piece of the graph in canonical (ascending id) vertex order, with
// its interior, induced edges and boundary edges precomputed. Immutable.
class FiniteRegion {
public:
    // Builds the region over exactly the given vertex set. Checks the model
    // invariants on the way (symmetry, zero diagonal, positive m, finite q).
    static std::shared_ptr<const FiniteRegion> over(ModelPtr model,
                                                    std::vector<VertexId> vertices,
                                                    int level);

    // Graph-metric ball: BFS from the anchor out to the given radius.
    static std::shared_ptr<const FiniteRegion> ball(ModelPtr model, VertexId anchor, int radius);

    const ModelPtr& model() const { return model_; }
    int level() const { return level_; }
    int size() const { return static_cast<int>(vertices_.size()); }

    const std::vector<VertexId>& vertices() const { return vertices_; }
    VertexId vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
    // -1 when absent.
    int index_of(VertexId v) const;
    bool contains_vertex(VertexId v) const { return index_of(v) >= 0; }

    bool is_interior(int i) const { return interior_[static_cast<std::size_t>(i)] != 0; }
    int interior_count() const { return interior_count_; }

    const std::vector<InducedEdge>& induced_edges() const { return induced_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }

    // b-weighted degree over all model neighbors of vertex i, inside or out.
    double full_degree(int i) const { return degree_[static_cast<std::size_t>(i)]; }
    double potential(int i) const { return q_[static_cast<std::size_t>(i)]; }
    double measure(int i) const { return m_[static_cast<std::size_t>(i)]; }
    std::string label(int i) const { return model_->label(vertex(i)); }

    // Connected components of the induced subgraph; returns component ids
    // per index and the number of components.
    int components(std::vector<int>& comp) const;

private:
    FiniteRegion() = default;

    ModelPtr model_;
    int level_ = 0;
    std::vector<VertexId> vertices_;
    std::unordered_map<VertexId, int> index_;
    std::vector<InducedEdge> induced_;
    std::vector<BoundaryEdge> boundary_;
    std::vector<char> interior_;
    std::vector<double> degree_, q_, m_;
    int interior_count_ = 0;
};

using RegionPtr = std::shared_ptr<const FiniteRegion>;

// An increasing family of finite regions containing the anchor at every
// level. region(n) is memoized; levels start at 1 unless stated otherwise.
class ExhaustionFamily {
public:
    virtual ~ExhaustionFamily() = default;

    const ModelPtr& model() const { return model_; }
    VertexId anchor() const { return anchor_; }

    RegionPtr region(int level) const;

protected:
    ExhaustionFamily(ModelPtr model, VertexId anchor);
    virtual RegionPtr build(int level) const = 0;

    ModelPtr model_;
    VertexId anchor_;

private:
    mutable std::mutex cache_mutex_;
    mutable std::unordered_map<int, RegionPtr> cache_;
};

using FamilyPtr = std::shared_ptr<const ExhaustionFamily>;

// Balls in the graph metric around the anchor. The default for every model;
// for lattices an optional l1/linf coordinate ball replaces the BFS ball.
enum class BallShape { Graph, L1, Linf };

class BallFamily final : public ExhaustionFamily {
public:
    BallFamily(ModelPtr model, VertexId anchor, BallShape shape = BallShape::Graph);

protected:
    RegionPtr build(int level) const override;

private:
    BallShape shape_;
};

// Base family with a ball around an earlier level removed:
// region(n) = base.region(n) minus base.region(hole_level). Levels below
// hole_level + 1 are empty and rejected.
class HoleFamily final : public ExhaustionFamily {
public:
    HoleFamily(FamilyPtr base, int hole_level);

    int hole_level() const { return hole_level_; }

protected:
    RegionPtr build(int level) const override;

private:
    FamilyPtr base_;
    int hole_level_;
};

FamilyPtr make_ball_family(ModelPtr model, VertexId anchor, BallShape shape = BallShape::Graph);

} // namespace sgl
