#pragma once

#include <functional>
#include <string>

#include "json.hpp"

#include "sgl/criticality.hpp"
#include "sgl/region.hpp"

namespace sgl::io {

using json = nlohmann::ordered_json;

// Embedded in every structured report so downstream readers can detect
// layout changes.
inline constexpr const char* SCHEMA_VERSION = "1";

// Everything a pipeline needs from one input document: the model, the
// exhaustion anchor, the lattice ball shape, and an optional weight profile.
// The anchor defaults to the model's natural origin and a CLI flag may
// override it after parsing.
struct InputSpec {
    ModelPtr model;
    VertexId anchor = 0;
    BallShape shape = BallShape::Graph;
    std::function<double(VertexId)> weight; // null when the document has none
};

// JSON text/file entry points. Every malformed-input condition, including
// unreadable files, surfaces as ParseError.
json parse_document(const std::string& text);
json load_document(const std::string& path);

// Accepts either an explicit finite graph
//   {"vertices": [...], "edges": [[u, v, b], ...], "q": {...}, "m": {...}}
// or a generator spec
//   {"generator": "halfline" | "halfline_dirichlet" | "lattice" | "tree",
//    "params": {...}}
// with optional top-level "anchor" (vertex label) and "weight" entries.
InputSpec parse_input(const json& doc);
InputSpec load_input(const std::string& path);

// Weight profiles over coord_norm. A bare number is a constant; objects
// select a kind: {"kind": "constant", "value": c}, {"kind": "geometric",
// "ratio": r}, {"kind": "inverse_square", "scale": s}, {"kind": "cauchy",
// "scale": s}, {"kind": "indicator", "vertex": "<label>"}.
std::function<double(VertexId)> parse_weight(const json& spec, const ModelPtr& model);

// Serializer for finite graphs. The output parses back into a model that
// produces identical reports; q/m entries are emitted in ascending vertex
// order so equal graphs serialize identically.
json graph_to_json(const ExplicitGraph& g);

json series_to_json(const EvidenceSeries& s, bool include_values = true);
json report_to_json(const ClassificationReport& r, bool include_values = true);

// Shortest text that round-trips the double (printf %.17g).
std::string format_double(double v);

// Two-column CSV bodies with a header row and one row per entry.
std::string series_csv(const EvidenceSeries& s, const std::string& value_header);
std::string pair_csv(const std::string& ha, const std::string& hb,
                     const std::vector<double>& a, const std::vector<double>& b);

// Writes text to a file, or to stdout when path is "-" or empty.
void write_text(const std::string& path, const std::string& text);

} // namespace sgl::io
