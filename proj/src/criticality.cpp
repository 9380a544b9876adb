#include "sgl/criticality.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "sgl/forms.hpp"
#include "sgl/parallel.hpp"

namespace sgl {

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Critical: return "Critical";
        case Verdict::Subcritical: return "Subcritical";
        case Verdict::PositiveCritical: return "Positive-critical";
        case Verdict::NullCritical: return "Null-critical";
        default: return "Inconclusive";
    }
}

std::string classification_caveat() {
    return "Finite exhaustion levels are necessary evidence only; no finite computation "
           "certifies the infinite-volume limit.";
}

std::string sample_caveat() {
    return "Bounded Green diagonals over a sample are evidence only: a finite sample cannot "
           "certify the sup over X.";
}

namespace {

void require_levels(int N) {
    if (N < 1) throw DomainError("series: need at least one level");
}

// One Green value per level, solved independently; the family cache makes
// concurrent region construction safe.
std::vector<double> green_values(const ExhaustionFamily& family, VertexId x, VertexId y, int N,
                                 const SolverOptions& opts) {
    require_levels(N);
    std::vector<double> out(static_cast<std::size_t>(N), 0.0);
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t i) {
        int level = static_cast<int>(i) + 1;
        RegionPtr K = family.region(level);
        if (K->index_of(x) < 0 || K->index_of(y) < 0)
            throw DomainError("green series: vertex missing from level " + std::to_string(level));
        auto S = DirichletSystem::assemble(K);
        out[i] = solve_green(S, x, opts).value_at(y);
    });
    return out;
}

// Position where the "last quarter" of a series starts (at least one step
// back, never past the front).
std::size_t last_quarter_index(std::size_t n) {
    std::size_t q = n - std::max<std::size_t>(1, n / 4);
    return std::min(q, n - 1);
}

} // namespace

EvidenceSeries green_series(const ExhaustionFamily& family, VertexId x, VertexId y, int N,
                            const SolverOptions& opts) {
    EvidenceSeries s;
    s.name = "green";
    s.expected = Monotonicity::Increasing;
    s.values = green_values(family, x, y, N, opts);
    for (int n = 1; n <= N; ++n) s.levels.push_back(n);
    return s;
}

EvidenceSeries capacity_series(const ExhaustionFamily& family, VertexId x, int N,
                               const SolverOptions& opts) {
    EvidenceSeries s;
    s.name = "capacity";
    s.expected = Monotonicity::Decreasing;
    s.values = green_values(family, x, x, N, opts);
    for (double& v : s.values) {
        if (!(v > 0.0)) throw DomainError("capacity: Green diagonal not positive");
        v = 1.0 / v;
    }
    for (int n = 1; n <= N; ++n) s.levels.push_back(n);
    return s;
}

ClassificationReport classify(const ExhaustionFamily& family, VertexId x, int N,
                              const DecisionRule& rule, const SolverOptions& opts) {
    require_levels(N);

    // h restricted to C_c(K_n) embeds into C_c(K_N), so one certificate at
    // the top level covers the whole stack.
    auto S_top = DirichletSystem::assemble(family.region(N));
    if (!certify_nonnegative(S_top, rule.nonneg_slack, opts))
        throw FormNotNonnegativeError(
            "classify: the form is not nonnegative on the largest level; the "
            "critical/subcritical dichotomy does not apply");

    ClassificationReport report;
    report.caveat = classification_caveat();

    EvidenceSeries cap = capacity_series(family, x, N, opts);
    EvidenceSeries green = cap;
    green.name = "green";
    green.expected = Monotonicity::Increasing;
    for (double& v : green.values) v = 1.0 / v;

    std::size_t q = last_quarter_index(cap.values.size());
    double tail_drop = (cap.values[q] - cap.values.back()) /
                       std::max(cap.values[q], std::numeric_limits<double>::min());
    double shrink = cap.values.front() / std::max(cap.values.back(),
                                                  std::numeric_limits<double>::min());

    bool plateau = tail_drop < rule.plateau_eps;
    bool decayed = shrink >= rule.decay_factor;
    if (plateau)
        report.verdict = Verdict::Subcritical;
    else if (decayed)
        report.verdict = Verdict::Critical;
    else
        report.verdict = Verdict::Inconclusive;

    report.evidence.push_back(std::move(cap));
    report.evidence.push_back(std::move(green));
    report.parameters["levels"] = N;
    report.parameters["plateau_eps"] = rule.plateau_eps;
    report.parameters["decay_factor"] = rule.decay_factor;
    report.parameters["nonneg_slack"] = rule.nonneg_slack;
    report.parameters["last_quarter_drop"] = tail_drop;
    report.parameters["first_last_shrink"] = shrink;
    report.parameters["capacity_last"] = report.evidence[0].values.back();
    return report;
}

GroundStateResult ground_state(const ExhaustionFamily& family, VertexId o, int N,
                               const DecisionRule& rule, const SolverOptions& opts) {
    if (N < 2) throw DomainError("ground state: need at least two levels for diagnostics");

    ClassificationReport verdict = classify(family, o, N, rule, opts);

    auto normalized_column = [&](int level) {
        auto S = DirichletSystem::assemble(family.region(level));
        RegionFunction g = solve_green(S, o, opts);
        double go = g.value_at(o);
        if (!(go > 0.0)) throw DomainError("ground state: Green diagonal not positive");
        g.values() /= go;
        return g;
    };
    RegionFunction psi = normalized_column(N);
    RegionFunction prev = normalized_column(N - 1);

    GroundStateResult out{std::move(psi), N, verdict.verdict == Verdict::Critical, 0.0, {}};
    out.probe_window = family.region(std::min(10, N - 1))->vertices();
    for (VertexId v : out.probe_window)
        out.probe_delta = std::max(out.probe_delta,
                                   std::abs(out.psi.value_at(v) - prev.value_at(v)));
    return out;
}

std::vector<NullSequenceEntry> null_sequence(const ExhaustionFamily& family, VertexId o, int N,
                                             const SolverOptions& opts) {
    require_levels(N);
    std::vector<std::optional<NullSequenceEntry>> slots(static_cast<std::size_t>(N));
    const GraphModel& model = *family.model();
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t i) {
        int level = static_cast<int>(i) + 1;
        auto S = DirichletSystem::assemble(family.region(level));
        RegionFunction g = solve_green(S, o, opts);
        double go = g.value_at(o);
        if (!(go > 0.0)) throw DomainError("null sequence: Green diagonal not positive");
        g.values() /= go;
        // Energy through the form itself; tests compare it with 1/G(o,o).
        double energy = quad_form(model, g);
        slots[i].emplace(NullSequenceEntry{level, std::move(g), energy});
    });
    std::vector<NullSequenceEntry> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

MinimalGreenResult minimal_green(const ExhaustionFamily& family, VertexId x, int N,
                                 const DecisionRule& rule, const SolverOptions& opts) {
    if (N < 2) throw DomainError("minimal green: need at least two levels for the residual check");
    ClassificationReport verdict = classify(family, x, N, rule, opts);
    if (verdict.verdict != Verdict::Subcritical)
        throw NoMinimalGreenError("minimal green: classifier verdict is " +
                                  verdict_name(verdict.verdict) +
                                  "; a minimal Green function needs Subcritical");

    auto S = DirichletSystem::assemble(family.region(N));
    RegionFunction g = solve_green(S, x, opts);

    // Re-derive H row by row from the model over the previous level's
    // interior; this checks the column against the operator, not against the
    // matrix it was solved with.
    const GraphModel& model = *family.model();
    RegionPtr inner = family.region(N - 1);
    MinimalGreenResult out{std::move(g), 0.0, 0};
    for (int i = 0; i < inner->size(); ++i) {
        if (!inner->is_interior(i)) continue;
        VertexId y = inner->vertex(i);
        double want = (y == x) ? 1.0 : 0.0;
        out.interior_defect = std::max(out.interior_defect,
                                       std::abs(apply_H(model, out.g, y) - want));
        ++out.checked_vertices;
    }
    return out;
}

EvidenceSeries weight_nonneg_series(const ExhaustionFamily& family,
                                    const std::function<double(VertexId)>& w, int N,
                                    const SolverOptions& opts) {
    require_levels(N);
    EvidenceSeries s;
    s.name = "pencil-bottom";
    s.expected = Monotonicity::Decreasing;
    s.values.assign(static_cast<std::size_t>(N), 0.0);
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t i) {
        int level = static_cast<int>(i) + 1;
        RegionPtr K = family.region(level);
        auto S = DirichletSystem::assemble(K);
        Eigen::VectorXd wv(K->size());
        for (int j = 0; j < K->size(); ++j) wv[j] = w(K->vertex(j));
        s.values[i] = generalized_lambda_min(S, wv, opts).value;
    });
    for (int n = 1; n <= N; ++n) s.levels.push_back(n);
    return s;
}

ClassificationReport weight_criticality(const ExhaustionFamily& family,
                                        const std::function<double(VertexId)>& w,
                                        const std::function<double(VertexId)>& psi, int N,
                                        const DecisionRule& rule) {
    require_levels(N);
    EvidenceSeries sums;
    sums.name = "weighted-mass";
    sums.expected = Monotonicity::Increasing;
    for (int n = 1; n <= N; ++n) {
        RegionPtr K = family.region(n);
        double s = 0.0;
        for (int i = 0; i < K->size(); ++i) {
            VertexId v = K->vertex(i);
            double wi = w(v);
            if (wi < 0.0) throw DomainError("weight criticality: weight must be nonnegative");
            double p = psi(v);
            s += p * p * wi;
        }
        sums.levels.push_back(n);
        sums.values.push_back(s);
    }

    double first_positive = 0.0;
    for (double v : sums.values)
        if (v > 0.0) {
            first_positive = v;
            break;
        }

    std::size_t q = last_quarter_index(sums.values.size());
    double tail_gain = (sums.values.back() - sums.values[q]) /
                       std::max(sums.values[q], std::numeric_limits<double>::min());
    bool plateau = tail_gain < rule.plateau_eps;
    bool grew = first_positive > 0.0 && sums.values.back() >= rule.growth_factor * first_positive;

    ClassificationReport report;
    report.caveat = classification_caveat();
    if (plateau)
        report.verdict = Verdict::PositiveCritical;
    else if (grew)
        report.verdict = Verdict::NullCritical;
    else
        report.verdict = Verdict::Inconclusive;
    report.parameters["levels"] = N;
    report.parameters["plateau_eps"] = rule.plateau_eps;
    report.parameters["growth_factor"] = rule.growth_factor;
    report.parameters["last_quarter_gain"] = tail_gain;
    report.parameters["mass_last"] = sums.values.back();
    report.evidence.push_back(std::move(sums));
    return report;
}

UniformProbeReport uniform_subcriticality_probe(const ExhaustionFamily& family,
                                                const std::vector<VertexId>& sample, int N,
                                                const SolverOptions& opts) {
    if (sample.empty()) throw DomainError("uniform probe: empty sample");
    RegionPtr K = family.region(N);
    auto S = DirichletSystem::assemble(K);

    UniformProbeReport report;
    report.sample = sample;
    report.green_diagonal.assign(sample.size(), 0.0);
    report.caveat = sample_caveat();
    parallel_for(sample.size(), [&](std::size_t i) {
        if (K->index_of(sample[i]) < 0)
            throw DomainError("uniform probe: sample vertex not in the level-" +
                              std::to_string(N) + " region");
        report.green_diagonal[i] = solve_green(S, sample[i], opts).value_at(sample[i]);
    });

    double lo = report.green_diagonal[0], hi = report.green_diagonal[0];
    for (double v : report.green_diagonal) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    report.max_green = hi;
    report.capacity_floor = 1.0 / hi;
    report.spread = (hi - lo) / lo;
    report.unbounded_trend = hi / lo >= 2.0;
    return report;
}

} // namespace sgl
