#include "sgl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

namespace sgl {
namespace {

constexpr std::int64_t FIELD_OFFSET = 1 << 20;
constexpr std::int64_t FIELD_MASK = (1 << 21) - 1;

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string strip_parens(const std::string& text) {
    std::size_t a = 0, b = text.size();
    while (a < b && std::isspace(static_cast<unsigned char>(text[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
    if (b - a >= 2 && text[a] == '(' && text[b - 1] == ')') {
        ++a;
        --b;
    }
    return text.substr(a, b - a);
}

} // namespace

VertexId parse_integer_vertex(const std::string& text, const std::string& who) {
    const std::string s = strip_parens(text);
    if (s.empty()) throw ParseError(who + ": empty vertex label");
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size())
        throw ParseError(who + ": cannot parse vertex label '" + text + "'");
    return static_cast<VertexId>(v);
}

double GraphModel::weighted_degree(VertexId x) const {
    in_domain(x);
    std::vector<Edge> nb;
    neighbors(x, nb);
    double sum = 0.0;
    for (const Edge& e : nb) sum += e.weight;
    return sum;
}

// ---------------------------------------------------------------------------
// LatticeGraph

LatticeGraph::LatticeGraph(int dim, FieldSpec q, FieldSpec m)
    : dim_(dim), q_(std::move(q)), m_(std::move(m)) {
    if (dim < 1 || dim > 3) throw DomainError("lattice: dimension must be 1, 2 or 3");
}

VertexId LatticeGraph::encode(const std::array<std::int64_t, 3>& c) const {
    VertexId id = 0;
    for (int i = 0; i < dim_; ++i) {
        if (std::llabs(c[i]) > COORD_MAX) throw DomainError("lattice: coordinate out of range");
        id = (id << 21) | (c[i] + FIELD_OFFSET);
    }
    return id;
}

std::array<std::int64_t, 3> LatticeGraph::decode(VertexId x) const {
    std::array<std::int64_t, 3> c{0, 0, 0};
    for (int i = dim_ - 1; i >= 0; --i) {
        c[i] = (x & FIELD_MASK) - FIELD_OFFSET;
        x >>= 21;
    }
    return c;
}

bool LatticeGraph::contains(VertexId x) const {
    if (x < 0) return false;
    VertexId rest = x >> (21 * dim_);
    if (rest != 0) return false;
    auto c = decode(x);
    for (int i = 0; i < dim_; ++i)
        if (std::llabs(c[i]) > COORD_MAX) return false;
    return true;
}

void LatticeGraph::neighbors(VertexId x, std::vector<Edge>& out) const {
    in_domain(x);
    out.clear();
    auto c = decode(x);
    for (int i = 0; i < dim_; ++i) {
        for (int s : {-1, +1}) {
            auto n = c;
            n[i] += s;
            if (std::llabs(n[i]) > COORD_MAX) continue; // coordinate box edge
            out.push_back(Edge{encode(n), 1.0});
        }
    }
}

std::string LatticeGraph::label(VertexId x) const {
    in_domain(x);
    auto c = decode(x);
    if (dim_ == 1) return std::to_string(c[0]);
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) {
        if (i) s += ",";
        s += std::to_string(c[i]);
    }
    return s + ")";
}

VertexId LatticeGraph::parse_vertex(const std::string& text) const {
    auto parts = split_commas(strip_parens(text));
    if (static_cast<int>(parts.size()) != dim_)
        throw ParseError(name() + ": expected " + std::to_string(dim_) +
                         " coordinates in '" + text + "'");
    std::array<std::int64_t, 3> c{0, 0, 0};
    for (int i = 0; i < dim_; ++i) c[i] = parse_integer_vertex(parts[i], name());
    return encode(c);
}

double LatticeGraph::coord_norm(VertexId x) const {
    in_domain(x);
    auto c = decode(x);
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += static_cast<double>(c[i]) * static_cast<double>(c[i]);
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Half-lines

void HalfLineGraph::neighbors(VertexId x, std::vector<Edge>& out) const {
    in_domain(x);
    out.clear();
    if (x > 0) out.push_back(Edge{x - 1, 1.0});
    out.push_back(Edge{x + 1, 1.0});
}

VertexId HalfLineGraph::parse_vertex(const std::string& text) const {
    VertexId v = parse_integer_vertex(text, name());
    if (v < 0) throw ParseError(name() + ": vertex must be >= 0");
    return v;
}

void DirichletHalfLineGraph::neighbors(VertexId x, std::vector<Edge>& out) const {
    in_domain(x);
    out.clear();
    if (x > 1) out.push_back(Edge{x - 1, 1.0});
    out.push_back(Edge{x + 1, 1.0});
}

VertexId DirichletHalfLineGraph::parse_vertex(const std::string& text) const {
    VertexId v = parse_integer_vertex(text, name());
    if (v < 1) throw ParseError(name() + ": vertex must be >= 1");
    return v;
}

// ---------------------------------------------------------------------------
// TreeGraph

TreeGraph::TreeGraph(int arity, FieldSpec q, FieldSpec m)
    : arity_(arity), q_(std::move(q)), m_(std::move(m)) {
    if (arity < 1) throw DomainError("tree: arity must be >= 1");
}

void TreeGraph::neighbors(VertexId x, std::vector<Edge>& out) const {
    in_domain(x);
    out.clear();
    if (x > 0) out.push_back(Edge{(x - 1) / arity_, 1.0});
    for (int k = 1; k <= arity_; ++k) out.push_back(Edge{x * arity_ + k, 1.0});
}

VertexId TreeGraph::parse_vertex(const std::string& text) const {
    VertexId v = parse_integer_vertex(text, name());
    if (v < 0) throw ParseError(name() + ": vertex must be >= 0");
    return v;
}

int TreeGraph::depth(VertexId x) const {
    in_domain(x);
    int d = 0;
    while (x > 0) {
        x = (x - 1) / arity_;
        ++d;
    }
    return d;
}

// ---------------------------------------------------------------------------
// ExplicitGraph

ExplicitGraph::ExplicitGraph(Builder b, std::string name)
    : name_(std::move(name)),
      vertices_(std::move(b.vertices)),
      edges_(std::move(b.edges)),
      q_(std::move(b.q)),
      m_(std::move(b.m)) {
    std::sort(vertices_.begin(), vertices_.end());
    if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
        throw ParseError(name_ + ": duplicate vertex id");
    for (VertexId v : vertices_) adjacency_[v]; // materialize every vertex, even isolated ones

    std::set<std::pair<VertexId, VertexId>> seen;
    for (const auto& [u, v, w] : edges_) {
        if (u == v) throw ParseError(name_ + ": self-edge at vertex " + std::to_string(u));
        if (!(w > 0.0) || !std::isfinite(w))
            throw ParseError(name_ + ": edge weight must be positive and finite");
        if (adjacency_.count(u) == 0 || adjacency_.count(v) == 0)
            throw ParseError(name_ + ": edge endpoint not in vertex list");
        auto key = std::minmax(u, v);
        if (!seen.insert(key).second)
            throw ParseError(name_ + ": duplicate edge {" + std::to_string(u) + "," +
                             std::to_string(v) + "}");
        adjacency_[u].push_back(Edge{v, w});
        adjacency_[v].push_back(Edge{u, w});
    }
    for (auto& [v, nb] : adjacency_)
        std::sort(nb.begin(), nb.end(), [](const Edge& a, const Edge& b2) { return a.to < b2.to; });

    for (const auto& [v, val] : q_)
        if (adjacency_.count(v) == 0)
            throw ParseError(name_ + ": potential given for unknown vertex " + std::to_string(v));
    for (const auto& [v, val] : m_) {
        if (adjacency_.count(v) == 0)
            throw ParseError(name_ + ": measure given for unknown vertex " + std::to_string(v));
        if (!(val > 0.0) || !std::isfinite(val))
            throw ParseError(name_ + ": measure must be positive and finite");
    }
}

void ExplicitGraph::neighbors(VertexId x, std::vector<Edge>& out) const {
    auto it = adjacency_.find(x);
    if (it == adjacency_.end()) throw DomainError(name_ + ": vertex not in graph");
    out = it->second;
}

double ExplicitGraph::potential(VertexId x) const {
    in_domain(x);
    auto it = q_.find(x);
    return it == q_.end() ? 0.0 : it->second;
}

double ExplicitGraph::measure(VertexId x) const {
    in_domain(x);
    auto it = m_.find(x);
    return it == m_.end() ? 1.0 : it->second;
}

VertexId ExplicitGraph::parse_vertex(const std::string& text) const {
    VertexId v = parse_integer_vertex(text, name_);
    if (adjacency_.count(v) == 0)
        throw ParseError(name_ + ": vertex " + text + " not in graph");
    return v;
}

// ---------------------------------------------------------------------------
// validate_model

std::vector<ValidationIssue> validate_model(const GraphModel& model,
                                            const std::vector<VertexId>& probes,
                                            int hops) {
    std::vector<ValidationIssue> issues;
    auto report = [&](std::string what) { issues.push_back(ValidationIssue{std::move(what)}); };

    std::vector<VertexId> live;
    for (VertexId p : probes) {
        if (!model.contains(p))
            report("probe vertex " + std::to_string(p) + " not in graph");
        else
            live.push_back(p);
    }
    if (live.empty()) return issues;

    // Patch BFS, one pass: invariant checks on every visited vertex and a
    // component id per probe for the connectivity report.
    std::unordered_map<VertexId, int> component;
    std::vector<Edge> nb, back;
    for (std::size_t pi = 0; pi < live.size(); ++pi) {
        if (component.count(live[pi])) continue;
        std::queue<std::pair<VertexId, int>> frontier;
        frontier.push({live[pi], 0});
        component[live[pi]] = static_cast<int>(pi);
        while (!frontier.empty()) {
            auto [x, depth] = frontier.front();
            frontier.pop();

            double m = model.measure(x);
            if (!(m > 0.0) || !std::isfinite(m))
                report("measure not positive at " + model.label(x));
            if (!std::isfinite(model.potential(x)))
                report("potential not finite at " + model.label(x));

            model.neighbors(x, nb);
            for (const Edge& e : nb) {
                if (e.to == x) report("self-edge at " + model.label(x));
                if (!(e.weight > 0.0) || !std::isfinite(e.weight))
                    report("nonpositive edge weight at " + model.label(x));
                if (!model.contains(e.to)) {
                    report("neighbor of " + model.label(x) + " not in graph");
                    continue;
                }
                if (x < e.to) { // check each unordered pair once
                    model.neighbors(e.to, back);
                    double reverse = -1.0;
                    for (const Edge& r : back)
                        if (r.to == x) reverse = r.weight;
                    if (reverse != e.weight)
                        report("asymmetric weight on {" + model.label(x) + "," + model.label(e.to) +
                               "}: " + std::to_string(e.weight) + " vs " + std::to_string(reverse));
                }
                if (depth < hops && component.emplace(e.to, static_cast<int>(pi)).second)
                    frontier.push({e.to, depth + 1});
            }
        }
    }
    for (VertexId p : live)
        if (component[p] != component[live[0]]) {
            report("probe vertices do not connect within " + std::to_string(hops) + " hops");
            break;
        }
    return issues;
}

} // namespace sgl
