// sgl: command-line surface over the graph/operator library. Subcommands
// load a graph or generator spec, run one pipeline, and emit JSON or CSV.
// Exit codes: 0 success (any verdict), 2 input error, 3 computation error.

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sgl/criticality.hpp"
#include "sgl/heat.hpp"
#include "sgl/io.hpp"
#include "sgl/spectral.hpp"

namespace {

using sgl::io::json;

struct CommonArgs {
    std::string input_path;
    int levels = 30;
    std::string anchor_label;
    double tol = 0.0;
    std::uint64_t seed = 1;
    std::string out = "-";
    std::string format = "json";
};

void add_common(CLI::App* sub, CommonArgs& a) {
    sub->add_option("input", a.input_path, "graph file or generator spec (JSON)")->required();
    sub->add_option("--levels", a.levels, "largest exhaustion level")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--anchor", a.anchor_label, "anchor vertex label (default: model origin)");
    sub->add_option("--tol", a.tol, "relative residual target for linear solves");
    sub->add_option("--seed", a.seed, "seed for sampled pipelines")->capture_default_str();
    sub->add_option("--out", a.out, "output path, - for stdout")->capture_default_str();
    sub->add_option("--format", a.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
}

void add_rule(CLI::App* sub, sgl::DecisionRule& rule) {
    sub->add_option("--plateau-eps", rule.plateau_eps,
                    "relative change over the last quarter that still counts as flat")
        ->capture_default_str();
    sub->add_option("--decay-factor", rule.decay_factor,
                    "required first/last capacity shrink for Critical")
        ->capture_default_str();
    sub->add_option("--growth-factor", rule.growth_factor,
                    "required last/first mass growth for Null-critical")
        ->capture_default_str();
    sub->add_option("--nonneg-slack", rule.nonneg_slack, "slack for the h >= 0 certificate")
        ->capture_default_str();
}

// Parsed input plus the derived exhaustion; built once per invocation.
struct Pipeline {
    sgl::io::InputSpec spec;
    sgl::FamilyPtr family;
    sgl::SolverOptions opts;
};

Pipeline open_pipeline(const CommonArgs& a) {
    Pipeline p;
    p.spec = sgl::io::load_input(a.input_path);
    if (!a.anchor_label.empty()) p.spec.anchor = p.spec.model->parse_vertex(a.anchor_label);
    p.family = sgl::make_ball_family(p.spec.model, p.spec.anchor, p.spec.shape);
    if (a.tol > 0.0) p.opts.solve_tol = a.tol;
    return p;
}

void emit(const CommonArgs& a, const json& doc) {
    sgl::io::write_text(a.out, doc.dump(2) + "\n");
}

void emit_series(const CommonArgs& a, const sgl::EvidenceSeries& s,
                 const std::string& value_header) {
    if (a.format == "csv")
        sgl::io::write_text(a.out, sgl::io::series_csv(s, value_header));
    else
        emit(a, sgl::io::series_to_json(s));
}

int cmd_classify(const CommonArgs& a, const sgl::DecisionRule& rule) {
    Pipeline p = open_pipeline(a);
    auto report = sgl::classify(*p.family, p.spec.anchor, a.levels, rule, p.opts);
    if (a.format == "csv") {
        for (const auto& s : report.evidence)
            if (s.name == "capacity") {
                sgl::io::write_text(a.out, sgl::io::series_csv(s, "capacity"));
                return 0;
            }
    }
    emit(a, sgl::io::report_to_json(report));
    return 0;
}

int cmd_green(const CommonArgs& a, const std::string& y_label) {
    Pipeline p = open_pipeline(a);
    sgl::VertexId y = y_label.empty() ? p.spec.anchor : p.spec.model->parse_vertex(y_label);
    emit_series(a, sgl::green_series(*p.family, p.spec.anchor, y, a.levels, p.opts), "value");
    return 0;
}

int cmd_capacity(const CommonArgs& a) {
    Pipeline p = open_pipeline(a);
    emit_series(a, sgl::capacity_series(*p.family, p.spec.anchor, a.levels, p.opts), "capacity");
    return 0;
}

int cmd_groundstate(const CommonArgs& a, const sgl::DecisionRule& rule) {
    Pipeline p = open_pipeline(a);
    auto gs = sgl::ground_state(*p.family, p.spec.anchor, a.levels, rule, p.opts);
    const auto& region = *gs.psi.region();
    if (a.format == "csv") {
        std::string out = "vertex,value\n";
        for (int i = 0; i < region.size(); ++i)
            out += region.label(i) + "," + sgl::io::format_double(gs.psi[i]) + "\n";
        sgl::io::write_text(a.out, out);
        return 0;
    }
    json j;
    j["schema_version"] = sgl::io::SCHEMA_VERSION;
    j["level"] = gs.level;
    j["critical"] = gs.critical;
    j["probe_delta"] = gs.probe_delta;
    json window = json::array(), values = json::array();
    for (sgl::VertexId v : gs.probe_window) {
        window.push_back(p.spec.model->label(v));
        values.push_back(gs.psi.value_at(v));
    }
    j["window"] = std::move(window);
    j["window_values"] = std::move(values);
    emit(a, j);
    return 0;
}

int cmd_lambda0(const CommonArgs& a) {
    Pipeline p = open_pipeline(a);
    emit_series(a, sgl::lambda0_series(*p.family, a.levels, p.opts), "lambda0");
    return 0;
}

int cmd_heat(const CommonArgs& a, const std::string& x_label, const std::string& y_label,
             const std::vector<double>& times) {
    Pipeline p = open_pipeline(a);
    auto region = p.family->region(a.levels);
    sgl::VertexId x = x_label.empty() ? p.spec.anchor : p.spec.model->parse_vertex(x_label);
    sgl::VertexId y = y_label.empty() ? p.spec.anchor : p.spec.model->parse_vertex(y_label);
    int ix = region->index_of(x), iy = region->index_of(y);
    if (ix < 0 || iy < 0) throw sgl::DomainError("heat: vertex not in the level-" +
                                                 std::to_string(a.levels) + " region");
    auto S = sgl::DirichletSystem::assemble(region);
    auto plan = sgl::HeatPlan::make(S, p.opts);
    std::vector<double> values;
    values.reserve(times.size());
    for (double t : times) values.push_back(plan.kernel(t, ix, iy));
    if (a.format == "csv") {
        sgl::io::write_text(a.out, sgl::io::pair_csv("t", "p_t", times, values));
    } else {
        json j;
        j["schema_version"] = sgl::io::SCHEMA_VERSION;
        j["x"] = p.spec.model->label(x);
        j["y"] = p.spec.model->label(y);
        j["times"] = times;
        j["values"] = values;
        emit(a, j);
    }
    return 0;
}

int cmd_harnack(const CommonArgs& a, const std::vector<std::string>& window_labels,
                double f_const, int size_cap) {
    Pipeline p = open_pipeline(a);
    sgl::HarnackInstance inst;
    inst.model = p.spec.model;
    if (window_labels.empty()) {
        inst.window = p.family->region(1)->vertices();
    } else {
        for (const auto& s : window_labels) inst.window.push_back(p.spec.model->parse_vertex(s));
    }
    inst.f = [f_const](sgl::VertexId) { return f_const; };
    inst.size_cap = size_cap;
    auto constant = sgl::harnack_constant(inst);
    if (a.format == "csv") {
        std::string out = "constant\n";
        out += (constant ? sgl::io::format_double(*constant) : std::string("nan")) + "\n";
        sgl::io::write_text(a.out, out);
        return 0;
    }
    json j;
    j["schema_version"] = sgl::io::SCHEMA_VERSION;
    json window = json::array();
    for (sgl::VertexId v : inst.window) window.push_back(p.spec.model->label(v));
    j["window"] = std::move(window);
    j["f"] = f_const;
    j["constant"] = constant ? json(*constant) : json(nullptr);
    emit(a, j);
    return 0;
}

std::function<double(sgl::VertexId)> resolve_weight(const Pipeline& p,
                                                    const std::string& weight_arg) {
    if (!weight_arg.empty())
        return sgl::io::parse_weight(sgl::io::parse_document(weight_arg), p.spec.model);
    return p.spec.weight;
}

int cmd_hardy(const CommonArgs& a, const std::string& weight_arg) {
    Pipeline p = open_pipeline(a);
    auto w = resolve_weight(p, weight_arg);
    if (!w) throw sgl::ParseError("hardy: no weight given (--weight or a \"weight\" spec entry)");
    emit_series(a, sgl::weight_nonneg_series(*p.family, w, a.levels, p.opts), "gen_lambda_min");
    return 0;
}

// Picks an evenly spaced sample of up to 20 vertices from a small region
// around the anchor, in canonical vertex order.
std::vector<sgl::VertexId> probe_sample(const Pipeline& p, int levels) {
    auto region = p.family->region(std::min(levels, 3));
    int n = region->size();
    int count = std::min(n, 20);
    std::vector<sgl::VertexId> sample;
    sample.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
        sample.push_back(region->vertex(count == 1 ? 0 : k * (n - 1) / (count - 1)));
    return sample;
}

int cmd_report(const CommonArgs& a, const sgl::DecisionRule& rule, const std::string& weight_arg,
               bool full) {
    Pipeline p = open_pipeline(a);
    json doc;
    doc["schema_version"] = sgl::io::SCHEMA_VERSION;
    doc["input"] = json{{"graph", p.spec.model->name()},
                        {"anchor", p.spec.model->label(p.spec.anchor)},
                        {"levels", a.levels}};
    json sections = json::object();
    int succeeded = 0;
    auto section = [&](const char* name, const std::function<json()>& body) {
        try {
            sections[name] = body();
            ++succeeded;
        } catch (const sgl::Error& e) {
            sections[name] = json{{"error", e.what()}};
        }
    };

    std::optional<sgl::Verdict> verdict;
    section("classification", [&] {
        auto report = sgl::classify(*p.family, p.spec.anchor, a.levels, rule, p.opts);
        verdict = report.verdict;
        return sgl::io::report_to_json(report, full);
    });
    section("lambda0", [&] {
        return sgl::io::series_to_json(sgl::lambda0_series(*p.family, a.levels, p.opts), full);
    });
    section("capacity", [&] {
        return sgl::io::series_to_json(
            sgl::capacity_series(*p.family, p.spec.anchor, a.levels, p.opts), full);
    });
    if (verdict && *verdict == sgl::Verdict::Subcritical) {
        section("minimal_green", [&] {
            auto mg = sgl::minimal_green(*p.family, p.spec.anchor, a.levels, rule, p.opts);
            json j;
            j["anchor_value"] = mg.g.value_at(p.spec.anchor);
            j["interior_defect"] = mg.interior_defect;
            j["checked_vertices"] = mg.checked_vertices;
            return j;
        });
    } else {
        section("ground_state", [&] {
            auto gs = sgl::ground_state(*p.family, p.spec.anchor, a.levels, rule, p.opts);
            json j;
            j["level"] = gs.level;
            j["critical"] = gs.critical;
            j["probe_delta"] = gs.probe_delta;
            if (full) {
                json window = json::array(), values = json::array();
                for (sgl::VertexId v : gs.probe_window) {
                    window.push_back(p.spec.model->label(v));
                    values.push_back(gs.psi.value_at(v));
                }
                j["window"] = std::move(window);
                j["window_values"] = std::move(values);
            }
            return j;
        });
    }
    section("uniform_probe", [&] {
        auto probe =
            sgl::uniform_subcriticality_probe(*p.family, probe_sample(p, a.levels), a.levels,
                                              p.opts);
        json j;
        j["max_green"] = probe.max_green;
        j["capacity_floor"] = probe.capacity_floor;
        j["spread"] = probe.spread;
        j["unbounded_trend"] = probe.unbounded_trend;
        if (full) {
            json sample = json::array();
            for (sgl::VertexId v : probe.sample) sample.push_back(p.spec.model->label(v));
            j["sample"] = std::move(sample);
            j["green_diagonal"] = probe.green_diagonal;
        }
        j["caveat"] = probe.caveat;
        return j;
    });
    if (auto w = resolve_weight(p, weight_arg)) {
        section("weight_criticality", [&] {
            auto gs = sgl::ground_state(*p.family, p.spec.anchor, a.levels, rule, p.opts);
            auto psi = [&gs](sgl::VertexId v) { return gs.psi.value_at(v); };
            return sgl::io::report_to_json(
                sgl::weight_criticality(*p.family, w, psi, a.levels, rule), full);
        });
    }

    doc["sections"] = std::move(sections);
    emit(a, doc);
    return succeeded > 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sgl: Schrodinger operators H = L + q on weighted graphs"};
    app.require_subcommand(1);

    CommonArgs args;
    sgl::DecisionRule rule;
    std::string y_label, x_label, weight_arg;
    std::vector<double> times;
    std::vector<std::string> window_labels;
    double f_const = 0.0;
    int size_cap = 16;
    bool full = false;

    auto* classify = app.add_subcommand("classify", "capacity dichotomy at the anchor");
    add_common(classify, args);
    add_rule(classify, rule);

    auto* green = app.add_subcommand("green", "Green function series G_n(anchor, y)");
    add_common(green, args);
    green->add_option("--y", y_label, "second vertex label (default: anchor)");

    auto* capacity = app.add_subcommand("capacity", "capacity series 1/G_n(anchor, anchor)");
    add_common(capacity, args);

    auto* groundstate =
        app.add_subcommand("groundstate", "normalized Green profile at the top level");
    add_common(groundstate, args);
    add_rule(groundstate, rule);

    auto* lambda0 = app.add_subcommand("lambda0", "spectral-bottom series along the exhaustion");
    add_common(lambda0, args);

    auto* heat = app.add_subcommand("heat", "heat-kernel values p_t(x, y) on the top level");
    add_common(heat, args);
    heat->add_option("--x", x_label, "first vertex label (default: anchor)");
    heat->add_option("--y", y_label, "second vertex label (default: anchor)");
    heat->add_option("--times", times, "comma-separated time grid")
        ->delimiter(',')
        ->required();

    auto* harnack = app.add_subcommand("harnack", "Harnack constant over a vertex window");
    add_common(harnack, args);
    harnack->add_option("--window", window_labels, "comma-separated vertex labels")
        ->delimiter(',');
    harnack->add_option("--f", f_const, "constant eigenvalue-side shift f")
        ->capture_default_str();
    harnack->add_option("--size-cap", size_cap, "window size cap")->capture_default_str();

    auto* hardy = app.add_subcommand("hardy", "generalized pencil bottoms against a weight");
    add_common(hardy, args);
    hardy->add_option("--weight", weight_arg, "weight spec (inline JSON)");

    auto* report = app.add_subcommand("report", "consolidated JSON over all pipelines");
    add_common(report, args);
    add_rule(report, rule);
    report->add_option("--weight", weight_arg, "weight spec (inline JSON)");
    report->add_flag("--full", full, "include per-level arrays and sample details");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(classify)) return cmd_classify(args, rule);
        if (app.got_subcommand(green)) return cmd_green(args, y_label);
        if (app.got_subcommand(capacity)) return cmd_capacity(args);
        if (app.got_subcommand(groundstate)) return cmd_groundstate(args, rule);
        if (app.got_subcommand(lambda0)) return cmd_lambda0(args);
        if (app.got_subcommand(heat)) return cmd_heat(args, x_label, y_label, times);
        if (app.got_subcommand(harnack)) return cmd_harnack(args, window_labels, f_const, size_cap);
        if (app.got_subcommand(hardy)) return cmd_hardy(args, weight_arg);
        if (app.got_subcommand(report)) return cmd_report(args, rule, weight_arg, full);
    } catch (const sgl::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const sgl::Error& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
    return 2;
}
