#pragma once

#include <functional>
#include <map>
#include <optional>

#include "sgl/evidence.hpp"
#include "sgl/solver.hpp"

namespace sgl {

// Thresholds for turning finite evidence into a verdict. The defaults favor
// honesty over sharpness: a plateau must really flatten out and a decay must
// shrink the capacity several-fold before anything but Inconclusive comes
// back. Every report embeds the values it was judged with.
struct DecisionRule {
    double plateau_eps = 0.05;  // relative change across the last quarter of levels
    double decay_factor = 5.0;  // required first/last capacity shrink for "Critical"
    double growth_factor = 5.0; // required last/first growth of partial sums for "Null-critical"
    double nonneg_slack = 1e-10;
};

enum class Verdict { Critical, Subcritical, PositiveCritical, NullCritical, Inconclusive };

std::string verdict_name(Verdict v);

// The fixed honesty sentences reports carry. Finite levels never certify a
// limit statement, and every serialized verdict says so.
std::string classification_caveat();
std::string sample_caveat(); // uniform-subcriticality probes

struct ClassificationReport {
    Verdict verdict = Verdict::Inconclusive;
    std::vector<EvidenceSeries> evidence;
    std::map<std::string, double> parameters;
    std::string caveat;
};

// G_n(x,y) along levels 1..N; monotone increasing by the exhaustion theorem.
EvidenceSeries green_series(const ExhaustionFamily& family, VertexId x, VertexId y, int N,
                            const SolverOptions& opts = {});

// cap_n(x) = 1/G_n(x,x), the constrained minimum of the form over functions
// pinned to 1 at x and supported in K_n; decreasing.
EvidenceSeries capacity_series(const ExhaustionFamily& family, VertexId x, int N,
                               const SolverOptions& opts = {});

// Capacity-based dichotomy at the anchor. Requires h >= 0, certified on the
// largest level (restriction makes that cover every smaller one); a failed
// certificate throws FormNotNonnegativeError because the classification
// theory assumes the form is nonnegative.
ClassificationReport classify(const ExhaustionFamily& family, VertexId x, int N,
                              const DecisionRule& rule = {}, const SolverOptions& opts = {});

struct GroundStateResult {
    RegionFunction psi;     // normalized Green column, psi(o) = 1
    int level = 0;
    bool critical = false;  // classifier verdict on this family
    // max |psi_N - psi_{N-1}| over the probe window (level-10 region or the
    // whole region when smaller).
    double probe_delta = 0.0;
    std::vector<VertexId> probe_window;
};

// Normalized Green column G_N(o,.)/G_N(o,o). In the critical case this is
// the ground-state approximant; otherwise it is still returned, labeled by
// the critical flag, as the normalized Green profile.
GroundStateResult ground_state(const ExhaustionFamily& family, VertexId o, int N,
                               const DecisionRule& rule = {}, const SolverOptions& opts = {});

struct NullSequenceEntry {
    int level = 0;
    RegionFunction e;  // capacity minimizer with e(o) = 1
    double energy = 0.0; // h(e), evaluated through the form, not through 1/G
};

// The capacity minimizers along levels; their energies are the capacity
// series and tend to 0 exactly in the critical case.
std::vector<NullSequenceEntry> null_sequence(const ExhaustionFamily& family, VertexId o, int N,
                                             const SolverOptions& opts = {});

struct MinimalGreenResult {
    RegionFunction g;           // level-N approximant of the minimal Green function
    double interior_defect = 0.0; // max |(Hg)(y) - 1_x(y)| over the interior of K_{N-1}
    int checked_vertices = 0;
};

// Level-N Green column as the minimal-Green approximant. Only defined when
// the classifier says Subcritical; a critical family has no minimal Green
// function and NoMinimalGreenError says so.
MinimalGreenResult minimal_green(const ExhaustionFamily& family, VertexId x, int N,
                                 const DecisionRule& rule = {}, const SolverOptions& opts = {});

// Bottom of the pencil (H_{K_n}, diag w) along levels; decreasing. A limit
// >= 1 is evidence for h - w >= 0; any single value < 1 disproves it.
EvidenceSeries weight_nonneg_series(const ExhaustionFamily& family,
                                    const std::function<double(VertexId)>& w, int N,
                                    const SolverOptions& opts = {});

// Partial sums S_n = sum over K_n of psi^2 w, and the plateau/growth verdict
// distinguishing Positive-critical from Null-critical. psi is the caller's
// ground state (closed form or a ground_state output read through value_at).
ClassificationReport weight_criticality(const ExhaustionFamily& family,
                                        const std::function<double(VertexId)>& w,
                                        const std::function<double(VertexId)>& psi, int N,
                                        const DecisionRule& rule = {});

struct UniformProbeReport {
    std::vector<VertexId> sample;
    std::vector<double> green_diagonal; // G_N(x,x) per sample vertex
    double max_green = 0.0;
    double capacity_floor = 0.0; // min over sample of 1/G_N(x,x)
    double spread = 0.0;         // (max - min)/min of the diagonal values
    bool unbounded_trend = false; // max/min >= 2: evidence against uniformity
    std::string caveat;
};

// Green diagonal over a sample of vertices at level N. Evidence only.
UniformProbeReport uniform_subcriticality_probe(const ExhaustionFamily& family,
                                                const std::vector<VertexId>& sample, int N,
                                                const SolverOptions& opts = {});

} // namespace sgl
