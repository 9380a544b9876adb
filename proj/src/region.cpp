#include "sgl/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <tuple>

namespace sgl {

std::shared_ptr<const FiniteRegion> FiniteRegion::over(ModelPtr model,
                                                       std::vector<VertexId> vertices,
                                                       int level) {
    if (!model) throw DomainError("region: null model");
    if (vertices.empty()) throw DomainError("region: empty vertex set");

    auto region = std::shared_ptr<FiniteRegion>(new FiniteRegion());
    region->model_ = model;
    region->level_ = level;

    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    region->vertices_ = std::move(vertices);

    const int n = static_cast<int>(region->vertices_.size());
    region->index_.reserve(static_cast<std::size_t>(n) * 2);
    for (int i = 0; i < n; ++i) {
        VertexId v = region->vertices_[static_cast<std::size_t>(i)];
        if (!model->contains(v))
            throw DomainError("region: vertex " + std::to_string(v) + " not in graph");
        region->index_.emplace(v, i);
    }

    region->degree_.assign(static_cast<std::size_t>(n), 0.0);
    region->q_.resize(static_cast<std::size_t>(n));
    region->m_.resize(static_cast<std::size_t>(n));
    region->interior_.assign(static_cast<std::size_t>(n), 1);

    // Each induced pair must be reported identically from both endpoints.
    std::unordered_map<std::uint64_t, double> pending;
    auto pair_key = [](int i, int j) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
               static_cast<std::uint32_t>(j);
    };

    std::vector<Edge> nb;
    for (int i = 0; i < n; ++i) {
        VertexId x = region->vertices_[static_cast<std::size_t>(i)];
        double q = model->potential(x);
        double m = model->measure(x);
        if (!std::isfinite(q))
            throw DomainError("region: potential not finite at " + model->label(x));
        if (!(m > 0.0) || !std::isfinite(m))
            throw DomainError("region: measure not positive at " + model->label(x));
        region->q_[static_cast<std::size_t>(i)] = q;
        region->m_[static_cast<std::size_t>(i)] = m;

        model->neighbors(x, nb);
        for (const Edge& e : nb) {
            if (e.to == x) throw DomainError("region: self-edge at " + model->label(x));
            if (!(e.weight > 0.0) || !std::isfinite(e.weight))
                throw DomainError("region: nonpositive edge weight at " + model->label(x));
            region->degree_[static_cast<std::size_t>(i)] += e.weight;
            int j = region->index_of(e.to);
            if (j < 0) {
                region->boundary_.push_back(BoundaryEdge{i, e.to, e.weight});
                region->interior_[static_cast<std::size_t>(i)] = 0;
                continue;
            }
            auto key = pair_key(std::min(i, j), std::max(i, j));
            auto it = pending.find(key);
            if (it == pending.end()) {
                pending.emplace(key, e.weight);
                if (i < j) region->induced_.push_back(InducedEdge{i, j, e.weight});
            } else {
                if (it->second != e.weight)
                    throw DomainError("region: asymmetric weight on {" + model->label(x) + "," +
                                      model->label(e.to) + "}");
                it->second = -1.0; // confirmed from both sides
            }
        }
    }
    for (const auto& [key, w] : pending)
        if (w != -1.0)
            throw DomainError("region: one-sided adjacency inside region (asymmetric model)");

    // Edges recorded from the smaller endpoint may have j < i when the larger
    // index was scanned first; normalize ordering for determinism.
    for (auto& e : region->induced_)
        if (e.i > e.j) std::swap(e.i, e.j);
    std::sort(region->induced_.begin(), region->induced_.end(),
              [](const InducedEdge& a, const InducedEdge& b) {
                  return std::tie(a.i, a.j) < std::tie(b.i, b.j);
              });

    region->interior_count_ = 0;
    for (char f : region->interior_) region->interior_count_ += (f != 0);
    return region;
}

std::shared_ptr<const FiniteRegion> FiniteRegion::ball(ModelPtr model, VertexId anchor,
                                                       int radius) {
    if (!model) throw DomainError("region: null model");
    if (!model->contains(anchor)) throw DomainError("region: anchor not in graph");
    if (radius < 0) throw DomainError("region: negative radius");

    std::unordered_map<VertexId, int> dist;
    dist.emplace(anchor, 0);
    std::queue<VertexId> frontier;
    frontier.push(anchor);
    std::vector<Edge> nb;
    while (!frontier.empty()) {
        VertexId x = frontier.front();
        frontier.pop();
        int d = dist[x];
        if (d == radius) continue;
        model->neighbors(x, nb);
        for (const Edge& e : nb)
            if (dist.emplace(e.to, d + 1).second) frontier.push(e.to);
    }
    std::vector<VertexId> verts;
    verts.reserve(dist.size());
    for (const auto& [v, d] : dist) verts.push_back(v);
    return over(std::move(model), std::move(verts), radius);
}

int FiniteRegion::index_of(VertexId v) const {
    auto it = index_.find(v);
    return it == index_.end() ? -1 : it->second;
}

int FiniteRegion::components(std::vector<int>& comp) const {
    const int n = size();
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const InducedEdge& e : induced_) {
        adj[static_cast<std::size_t>(e.i)].push_back(e.j);
        adj[static_cast<std::size_t>(e.j)].push_back(e.i);
    }
    comp.assign(static_cast<std::size_t>(n), -1);
    int count = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] != -1) continue;
        comp[static_cast<std::size_t>(s)] = count;
        std::queue<int> bfs;
        bfs.push(s);
        while (!bfs.empty()) {
            int x = bfs.front();
            bfs.pop();
            for (int y : adj[static_cast<std::size_t>(x)])
                if (comp[static_cast<std::size_t>(y)] == -1) {
                    comp[static_cast<std::size_t>(y)] = count;
                    bfs.push(y);
                }
        }
        ++count;
    }
    return count;
}

// ---------------------------------------------------------------------------
// Families

ExhaustionFamily::ExhaustionFamily(ModelPtr model, VertexId anchor)
    : model_(std::move(model)), anchor_(anchor) {
    if (!model_) throw DomainError("exhaustion: null model");
    if (!model_->contains(anchor_)) throw DomainError("exhaustion: anchor not in graph");
}

RegionPtr ExhaustionFamily::region(int level) const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(level);
        if (it != cache_.end()) return it->second;
    }
    RegionPtr built = build(level); // outside the lock; builds are idempotent
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto [it, fresh] = cache_.emplace(level, built);
    return it->second;
}

BallFamily::BallFamily(ModelPtr model, VertexId anchor, BallShape shape)
    : ExhaustionFamily(std::move(model), anchor), shape_(shape) {
    if (shape_ == BallShape::Linf && !dynamic_cast<const LatticeGraph*>(model_.get()))
        throw DomainError("exhaustion: linf balls need a lattice graph");
}

RegionPtr BallFamily::build(int level) const {
    if (level < 0) throw DomainError("exhaustion: negative level");

    // The half-line with killed origin exhausts by initial segments {1..n},
    // matching its role as the Dirichlet restriction of the full half-line.
    if (dynamic_cast<const DirichletHalfLineGraph*>(model_.get())) {
        if (level < 1) throw DomainError("exhaustion: level must be >= 1");
        std::vector<VertexId> verts;
        for (VertexId v = 1; v <= level; ++v) verts.push_back(v);
        return FiniteRegion::over(model_, std::move(verts), level);
    }

    if (shape_ == BallShape::Linf) {
        const auto* lat = static_cast<const LatticeGraph*>(model_.get());
        auto c0 = lat->decode(anchor_);
        std::vector<VertexId> verts;
        std::array<std::int64_t, 3> c{0, 0, 0};
        const int d = lat->dim();
        std::function<void(int)> fill = [&](int axis) {
            if (axis == d) {
                verts.push_back(lat->encode(c));
                return;
            }
            for (std::int64_t t = -level; t <= level; ++t) {
                c[static_cast<std::size_t>(axis)] = c0[static_cast<std::size_t>(axis)] + t;
                fill(axis + 1);
            }
        };
        fill(0);
        return FiniteRegion::over(model_, std::move(verts), level);
    }

    return FiniteRegion::ball(model_, anchor_, level);
}

namespace {
std::vector<VertexId> region_difference(const FiniteRegion& big, const FiniteRegion& hole) {
    std::vector<VertexId> verts;
    for (VertexId v : big.vertices())
        if (!hole.contains_vertex(v)) verts.push_back(v);
    return verts;
}

VertexId first_surviving_vertex(const ExhaustionFamily& base, int hole_level) {
    auto verts =
        region_difference(*base.region(hole_level + 1), *base.region(hole_level));
    if (verts.empty())
        throw DomainError("exhaustion: removing level " + std::to_string(hole_level) +
                          " leaves nothing at level " + std::to_string(hole_level + 1));
    return verts.front();
}
} // namespace

HoleFamily::HoleFamily(FamilyPtr base, int hole_level)
    : ExhaustionFamily(base->model(), first_surviving_vertex(*base, hole_level)),
      base_(std::move(base)),
      hole_level_(hole_level) {
    if (hole_level_ < 0) throw DomainError("exhaustion: negative hole level");
}

RegionPtr HoleFamily::build(int level) const {
    if (level <= hole_level_)
        throw DomainError("exhaustion: level " + std::to_string(level) +
                          " is inside the removed ball (level " + std::to_string(hole_level_) +
                          ")");
    auto verts = region_difference(*base_->region(level), *base_->region(hole_level_));
    return FiniteRegion::over(model_, std::move(verts), level);
}

FamilyPtr make_ball_family(ModelPtr model, VertexId anchor, BallShape shape) {
    return std::make_shared<BallFamily>(std::move(model), anchor, shape);
}

} // namespace sgl
