#include "sgl/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

namespace sgl::io {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw ParseError("input spec: " + msg); }

const json& expect_object(const json& j, const std::string& what) {
    if (!j.is_object()) bad(what + " must be a JSON object");
    return j;
}

double expect_number(const json& j, const std::string& what) {
    if (!j.is_number()) bad(what + " must be a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) bad(what + " must be finite");
    return v;
}

std::string expect_string(const json& j, const std::string& what) {
    if (!j.is_string()) bad(what + " must be a string");
    return j.get<std::string>();
}

long long expect_integer(const json& j, const std::string& what) {
    if (!j.is_number_integer()) bad(what + " must be an integer");
    return j.get<long long>();
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) known = true;
        if (!known) bad(where + ": unknown key '" + item.key() + "'");
    }
}

// Vertex entries in explicit graphs may be written as integers or as the
// label strings the serializer emits.
VertexId vertex_from_json(const json& j, const std::string& where) {
    if (j.is_number_integer()) return j.get<VertexId>();
    if (j.is_string()) return parse_integer_vertex(j.get<std::string>(), where);
    bad(where + ": vertex must be an integer or a label string");
}

// Generator q/m entries: a bare number is the constant part; the object form
// adds per-vertex overrides on top of it. Labels go through the probe model
// so lattice coordinates parse the same way they print. Measures must stay
// positive, which the constant-plus-points form lets us check completely.
FieldSpec field_from_json(const json& j, double default_constant, const GraphModel& labels,
                          const std::string& where, bool require_positive = false) {
    FieldSpec f{default_constant, {}, nullptr};
    if (j.is_number()) {
        f.constant = expect_number(j, where);
    } else if (!j.is_null()) {
        expect_object(j, where);
        reject_unknown_keys(j, {"constant", "points"}, where);
        if (j.contains("constant"))
            f.constant = expect_number(j.at("constant"), where + ".constant");
        if (j.contains("points")) {
            expect_object(j.at("points"), where + ".points");
            for (const auto& item : j.at("points").items())
                f.points[labels.parse_vertex(item.key())] =
                    expect_number(item.value(), where + ".points['" + item.key() + "']");
        }
    }
    if (require_positive) {
        if (!(f.constant > 0.0)) bad(where + ": values must be positive");
        for (const auto& [v, offset] : f.points)
            if (!(f.constant + offset > 0.0)) bad(where + ": values must be positive");
    }
    return f;
}

BallShape shape_from_json(const json& params) {
    if (!params.contains("ball")) return BallShape::Graph;
    std::string s = expect_string(params.at("ball"), "params.ball");
    if (s == "graph") return BallShape::Graph;
    if (s == "l1") return BallShape::L1;
    if (s == "linf") return BallShape::Linf;
    bad("params.ball must be one of graph, l1, linf");
}

InputSpec from_generator(const json& doc) {
    const std::string gen = expect_string(doc.at("generator"), "generator");
    json params = doc.value("params", json::object());
    expect_object(params, "params");

    InputSpec spec;
    if (gen == "halfline") {
        reject_unknown_keys(params, {"q", "m"}, "params");
        HalfLineGraph probe;
        spec.model = std::make_shared<HalfLineGraph>(
            field_from_json(params.value("q", json()), 0.0, probe, "params.q"),
            field_from_json(params.value("m", json()), 1.0, probe, "params.m", true));
        spec.anchor = 0;
    } else if (gen == "halfline_dirichlet") {
        reject_unknown_keys(params, {"q", "m"}, "params");
        DirichletHalfLineGraph probe;
        spec.model = std::make_shared<DirichletHalfLineGraph>(
            field_from_json(params.value("q", json()), 0.0, probe, "params.q"),
            field_from_json(params.value("m", json()), 1.0, probe, "params.m", true));
        spec.anchor = 1;
    } else if (gen == "lattice") {
        reject_unknown_keys(params, {"dim", "q", "m", "ball"}, "params");
        if (!params.contains("dim")) bad("lattice generator needs params.dim");
        long long dim = expect_integer(params.at("dim"), "params.dim");
        if (dim < 1 || dim > 3) bad("params.dim must be 1, 2 or 3");
        LatticeGraph probe(static_cast<int>(dim));
        auto lat = std::make_shared<LatticeGraph>(
            static_cast<int>(dim),
            field_from_json(params.value("q", json()), 0.0, probe, "params.q"),
            field_from_json(params.value("m", json()), 1.0, probe, "params.m", true));
        spec.anchor = lat->encode({0, 0, 0});
        spec.shape = shape_from_json(params);
        spec.model = std::move(lat);
    } else if (gen == "tree") {
        reject_unknown_keys(params, {"arity", "q", "m"}, "params");
        if (!params.contains("arity")) bad("tree generator needs params.arity");
        long long arity = expect_integer(params.at("arity"), "params.arity");
        if (arity < 1 || arity > 64) bad("params.arity must be in [1, 64]");
        TreeGraph probe(static_cast<int>(arity));
        spec.model = std::make_shared<TreeGraph>(
            static_cast<int>(arity),
            field_from_json(params.value("q", json()), 0.0, probe, "params.q"),
            field_from_json(params.value("m", json()), 1.0, probe, "params.m", true));
        spec.anchor = 0;
    } else {
        bad("unknown generator '" + gen + "'");
    }
    return spec;
}

InputSpec from_explicit(const json& doc) {
    ExplicitGraph::Builder b;

    const json& verts = doc.at("vertices");
    if (!verts.is_array()) bad("vertices must be an array");
    if (verts.empty()) bad("graph lists no vertices");
    for (const auto& v : verts) b.vertices.push_back(vertex_from_json(v, "vertices"));

    if (doc.contains("edges")) {
        const json& edges = doc.at("edges");
        if (!edges.is_array()) bad("edges must be an array");
        for (const auto& e : edges) {
            if (!e.is_array() || e.size() < 2 || e.size() > 3)
                bad("each edge must be [u, v] or [u, v, b]");
            VertexId u = vertex_from_json(e[0], "edges");
            VertexId v = vertex_from_json(e[1], "edges");
            double w = e.size() == 3 ? expect_number(e[2], "edge weight") : 1.0;
            if (w <= 0.0) bad("edge weights must be positive");
            b.edges.emplace_back(u, v, w);
        }
    }

    for (const char* key : {"q", "m"}) {
        if (!doc.contains(key)) continue;
        expect_object(doc.at(key), key);
        auto& field = std::string(key) == "q" ? b.q : b.m;
        for (const auto& item : doc.at(key).items()) {
            VertexId v = parse_integer_vertex(item.key(), std::string(key) + " key");
            field[v] = expect_number(item.value(), std::string(key) + "['" + item.key() + "']");
        }
    }

    std::string name = doc.contains("name") ? expect_string(doc.at("name"), "name") : "explicit";

    InputSpec spec;
    spec.model = std::make_shared<ExplicitGraph>(std::move(b), std::move(name));
    const auto& list = static_cast<const ExplicitGraph&>(*spec.model).vertex_list();
    spec.anchor = *std::min_element(list.begin(), list.end());
    return spec;
}

} // namespace

json parse_document(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError("input is not valid JSON");
    return doc;
}

json load_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw ParseError("cannot read file: " + path);
    return parse_document(buf.str());
}

InputSpec parse_input(const json& doc) {
    expect_object(doc, "input");
    InputSpec spec;
    if (doc.contains("generator")) {
        reject_unknown_keys(doc, {"generator", "params", "anchor", "weight"}, "input");
        spec = from_generator(doc);
    } else if (doc.contains("vertices")) {
        reject_unknown_keys(doc, {"vertices", "edges", "q", "m", "name", "anchor", "weight"},
                            "input");
        spec = from_explicit(doc);
    } else {
        bad("expected either a generator spec or an explicit graph with vertices");
    }
    if (doc.contains("anchor"))
        spec.anchor = spec.model->parse_vertex(expect_string(doc.at("anchor"), "anchor"));
    if (doc.contains("weight")) spec.weight = parse_weight(doc.at("weight"), spec.model);
    return spec;
}

InputSpec load_input(const std::string& path) { return parse_input(load_document(path)); }

std::function<double(VertexId)> parse_weight(const json& spec, const ModelPtr& model) {
    if (spec.is_number()) {
        double c = expect_number(spec, "weight");
        return [c](VertexId) { return c; };
    }
    expect_object(spec, "weight");
    std::string kind = spec.contains("kind") ? expect_string(spec.at("kind"), "weight.kind") : "";
    if (kind == "constant") {
        reject_unknown_keys(spec, {"kind", "value"}, "weight");
        double c = expect_number(spec.at("value"), "weight.value");
        return [c](VertexId) { return c; };
    }
    if (kind == "geometric") {
        reject_unknown_keys(spec, {"kind", "ratio"}, "weight");
        double r = expect_number(spec.at("ratio"), "weight.ratio");
        if (r <= 0.0) bad("weight.ratio must be positive");
        return [r, model](VertexId x) { return std::pow(r, model->coord_norm(x)); };
    }
    if (kind == "inverse_square") {
        reject_unknown_keys(spec, {"kind", "scale"}, "weight");
        double s = expect_number(spec.at("scale"), "weight.scale");
        return [s, model](VertexId x) {
            double n = model->coord_norm(x);
            return n > 0.0 ? s / (n * n) : 0.0;
        };
    }
    if (kind == "cauchy") {
        reject_unknown_keys(spec, {"kind", "scale"}, "weight");
        double s = spec.contains("scale") ? expect_number(spec.at("scale"), "weight.scale") : 1.0;
        return [s, model](VertexId x) {
            double n = model->coord_norm(x);
            return s / (1.0 + n * n);
        };
    }
    if (kind == "indicator") {
        reject_unknown_keys(spec, {"kind", "vertex"}, "weight");
        VertexId v = model->parse_vertex(expect_string(spec.at("vertex"), "weight.vertex"));
        return [v](VertexId x) { return x == v ? 1.0 : 0.0; };
    }
    bad("weight.kind must be one of constant, geometric, inverse_square, cauchy, indicator");
}

json graph_to_json(const ExplicitGraph& g) {
    json j;
    if (g.name() != "explicit") j["name"] = g.name();
    j["vertices"] = json::array();
    for (VertexId v : g.vertex_list()) j["vertices"].push_back(v);
    j["edges"] = json::array();
    for (const auto& [u, v, b] : g.edge_list()) j["edges"].push_back(json::array({u, v, b}));

    std::vector<VertexId> sorted = g.vertex_list();
    std::sort(sorted.begin(), sorted.end());
    json q = json::object(), m = json::object();
    for (VertexId v : sorted) {
        if (double qv = g.potential(v); qv != 0.0) q[g.label(v)] = qv;
        if (double mv = g.measure(v); mv != 1.0) m[g.label(v)] = mv;
    }
    if (!q.empty()) j["q"] = std::move(q);
    if (!m.empty()) j["m"] = std::move(m);
    return j;
}

json series_to_json(const EvidenceSeries& s, bool include_values) {
    json j;
    j["name"] = s.name;
    j["expected"] = monotonicity_name(s.expected);
    j["monotone"] = s.is_monotone();
    if (!s.empty()) {
        j["first"] = s.front();
        j["final"] = s.back();
    }
    if (include_values && !s.empty()) {
        j["levels"] = s.levels;
        j["values"] = s.values;
    }
    return j;
}

json report_to_json(const ClassificationReport& r, bool include_values) {
    json j;
    j["schema_version"] = SCHEMA_VERSION;
    j["verdict"] = verdict_name(r.verdict);
    j["parameters"] = json::object();
    for (const auto& [k, v] : r.parameters) j["parameters"][k] = v;
    j["evidence"] = json::array();
    for (const auto& s : r.evidence) j["evidence"].push_back(series_to_json(s, include_values));
    j["caveat"] = r.caveat;
    return j;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string series_csv(const EvidenceSeries& s, const std::string& value_header) {
    std::string out = "level," + value_header + "\n";
    for (std::size_t i = 0; i < s.values.size(); ++i)
        out += std::to_string(s.levels[i]) + "," + format_double(s.values[i]) + "\n";
    return out;
}

std::string pair_csv(const std::string& ha, const std::string& hb,
                     const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DomainError("csv: column lengths differ");
    std::string out = ha + "," + hb + "\n";
    for (std::size_t i = 0; i < a.size(); ++i)
        out += format_double(a[i]) + "," + format_double(b[i]) + "\n";
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << text;
    out.flush();
    if (!out) throw ParseError("cannot write file: " + path);
}

} // namespace sgl::io
