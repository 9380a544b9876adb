#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "sgl/errors.hpp"

namespace sgl {

// Opaque vertex handle. Each model packs its own structure into the 64 bits;
// label()/parse_vertex() round-trip losslessly and the numeric order of ids
// is the canonical vertex order used everywhere (regions, matrices, output).
using VertexId = std::int64_t;

struct Edge {
    VertexId to;
    double weight; // b(x, to) > 0
};

// A weighted graph with potential q and measure m over a countable vertex
// set, exposed through local queries only. Implementations must present a
// symmetric b with zero diagonal and finitely many neighbors per vertex;
// validate_model() spot-checks those invariants instead of trusting them.
class GraphModel {
public:
    virtual ~GraphModel() = default;

    virtual bool contains(VertexId x) const = 0;
    // Clears `out` and fills it with the neighbors of x in a fixed order.
    virtual void neighbors(VertexId x, std::vector<Edge>& out) const = 0;
    virtual double potential(VertexId x) const = 0;
    virtual double measure(VertexId x) const { return in_domain(x), 1.0; }

    virtual std::string label(VertexId x) const = 0;
    virtual VertexId parse_vertex(const std::string& text) const = 0;
    // Natural magnitude of a vertex (lattice: Euclidean coordinate norm,
    // halflines: n, trees: depth). Weight profiles are defined through it.
    virtual double coord_norm(VertexId x) const = 0;
    virtual std::string name() const = 0;

    std::vector<Edge> neighbors(VertexId x) const {
        std::vector<Edge> out;
        neighbors(x, out);
        return out;
    }

    // Sum of b(x,y) over all neighbors, potential excluded.
    double weighted_degree(VertexId x) const;

protected:
    void in_domain(VertexId x) const {
        if (!contains(x)) throw DomainError(name() + ": vertex not in graph");
    }
};

using ModelPtr = std::shared_ptr<const GraphModel>;

// Pointwise overrides shared by the generator-backed models: constant part,
// per-vertex exceptions, and an optional functional hook (used by tests that
// manufacture potentials from a prescribed positive solution).
struct FieldSpec {
    double constant = 0.0;
    std::unordered_map<VertexId, double> points;
    std::function<double(VertexId)> fn;

    double at(VertexId x) const {
        double v = constant;
        if (auto it = points.find(x); it != points.end()) v += it->second;
        if (fn) v += fn(x);
        return v;
    }
};

// Integer lattice Z^d (d <= 3) with unit edge weights between nearest
// neighbors. Coordinates live in [-COORD_MAX, COORD_MAX] and are packed into
// 21-bit fields, so id order is lexicographic coordinate order.
class LatticeGraph final : public GraphModel {
public:
    static constexpr std::int64_t COORD_MAX = (1 << 20) - 1;

    LatticeGraph(int dim, FieldSpec q = {}, FieldSpec m = unit_measure());

    bool contains(VertexId x) const override;
    void neighbors(VertexId x, std::vector<Edge>& out) const override;
    double potential(VertexId x) const override { return in_domain(x), q_.at(x); }
    double measure(VertexId x) const override { return in_domain(x), m_.at(x); }
    std::string label(VertexId x) const override;
    VertexId parse_vertex(const std::string& text) const override;
    double coord_norm(VertexId x) const override;
    std::string name() const override { return "lattice-Z" + std::to_string(dim_); }

    int dim() const { return dim_; }
    VertexId encode(const std::array<std::int64_t, 3>& c) const;
    std::array<std::int64_t, 3> decode(VertexId x) const;

    static FieldSpec unit_measure() { return FieldSpec{1.0, {}, nullptr}; }

private:
    int dim_;
    FieldSpec q_, m_;
};

// Half-line 0 - 1 - 2 - ... with unit weights.
class HalfLineGraph final : public GraphModel {
public:
    explicit HalfLineGraph(FieldSpec q = {}, FieldSpec m = LatticeGraph::unit_measure())
        : q_(std::move(q)), m_(std::move(m)) {}

    bool contains(VertexId x) const override { return x >= 0; }
    void neighbors(VertexId x, std::vector<Edge>& out) const override;
    double potential(VertexId x) const override { return in_domain(x), q_.at(x); }
    double measure(VertexId x) const override { return in_domain(x), m_.at(x); }
    std::string label(VertexId x) const override { return std::to_string(x); }
    VertexId parse_vertex(const std::string& text) const override;
    double coord_norm(VertexId x) const override { return static_cast<double>(x); }
    std::string name() const override { return "halfline-N0"; }

private:
    FieldSpec q_, m_;
};

// Half-line on {1, 2, ...} obtained from the full half-line by deleting 0:
// the killed edge reappears as q(1) += b(1,0) = 1 on top of any user q.
class DirichletHalfLineGraph final : public GraphModel {
public:
    explicit DirichletHalfLineGraph(FieldSpec q = {}, FieldSpec m = LatticeGraph::unit_measure())
        : q_(std::move(q)), m_(std::move(m)) {}

    bool contains(VertexId x) const override { return x >= 1; }
    void neighbors(VertexId x, std::vector<Edge>& out) const override;
    double potential(VertexId x) const override {
        in_domain(x);
        return q_.at(x) + (x == 1 ? 1.0 : 0.0);
    }
    double measure(VertexId x) const override { return in_domain(x), m_.at(x); }
    std::string label(VertexId x) const override { return std::to_string(x); }
    VertexId parse_vertex(const std::string& text) const override;
    double coord_norm(VertexId x) const override { return static_cast<double>(x); }
    std::string name() const override { return "halfline-dirichlet"; }

private:
    FieldSpec q_, m_;
};

// Rooted k-ary tree in heap numbering: root 0, children of i are
// k*i + 1 ... k*i + k, unit weights. Id order groups vertices by depth.
class TreeGraph final : public GraphModel {
public:
    explicit TreeGraph(int arity, FieldSpec q = {}, FieldSpec m = LatticeGraph::unit_measure());

    bool contains(VertexId x) const override { return x >= 0; }
    void neighbors(VertexId x, std::vector<Edge>& out) const override;
    double potential(VertexId x) const override { return in_domain(x), q_.at(x); }
    double measure(VertexId x) const override { return in_domain(x), m_.at(x); }
    std::string label(VertexId x) const override { return std::to_string(x); }
    VertexId parse_vertex(const std::string& text) const override;
    double coord_norm(VertexId x) const override { return static_cast<double>(depth(x)); }
    std::string name() const override { return "tree-" + std::to_string(arity_) + "ary"; }

    int arity() const { return arity_; }
    int depth(VertexId x) const;

private:
    int arity_;
    FieldSpec q_, m_;
};

// Finite graph held fully in memory, as loaded from a file or built by the
// random-instance generator. Ids are the caller's vertex ids verbatim.
class ExplicitGraph final : public GraphModel {
public:
    struct Builder {
        std::vector<VertexId> vertices;
        std::vector<std::tuple<VertexId, VertexId, double>> edges; // one row per unordered pair
        std::unordered_map<VertexId, double> q;
        std::unordered_map<VertexId, double> m;
    };

    explicit ExplicitGraph(Builder b, std::string name = "explicit");

    bool contains(VertexId x) const override { return adjacency_.count(x) != 0; }
    void neighbors(VertexId x, std::vector<Edge>& out) const override;
    double potential(VertexId x) const override;
    double measure(VertexId x) const override;
    std::string label(VertexId x) const override { return in_domain(x), std::to_string(x); }
    VertexId parse_vertex(const std::string& text) const override;
    double coord_norm(VertexId x) const override { return in_domain(x), static_cast<double>(x); }
    std::string name() const override { return name_; }

    const std::vector<VertexId>& vertex_list() const { return vertices_; }
    // One row per unordered pair, as stored.
    const std::vector<std::tuple<VertexId, VertexId, double>>& edge_list() const { return edges_; }

private:
    std::string name_;
    std::vector<VertexId> vertices_;
    std::vector<std::tuple<VertexId, VertexId, double>> edges_;
    std::unordered_map<VertexId, std::vector<Edge>> adjacency_;
    std::unordered_map<VertexId, double> q_, m_;
};

struct ValidationIssue {
    std::string what;
};

// Spot-checks model invariants from a set of probe vertices: b symmetric,
// zero diagonal, positive weights, m > 0, finite q, and connectivity of the
// probed patch. Reports issues instead of throwing so callers can surface
// all of them at once.
std::vector<ValidationIssue> validate_model(const GraphModel& model,
                                            const std::vector<VertexId>& probes,
                                            int hops = 2);

VertexId parse_integer_vertex(const std::string& text, const std::string& who);

} // namespace sgl
