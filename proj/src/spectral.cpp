#include "sgl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "sgl/forms.hpp"
#include "sgl/parallel.hpp"

namespace sgl {

EvidenceSeries lambda0_series(const ExhaustionFamily& family, int N,
                              const SolverOptions& opts) {
    if (N < 1) throw DomainError("lambda0 series: need at least one level");
    EvidenceSeries s;
    s.name = "lambda0";
    s.expected = Monotonicity::Decreasing;
    s.values.assign(static_cast<std::size_t>(N), 0.0);
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t i) {
        auto S = DirichletSystem::assemble(family.region(static_cast<int>(i) + 1));
        s.values[i] = lambda_min(S, opts).value;
    });
    for (int n = 1; n <= N; ++n) s.levels.push_back(n);
    return s;
}

EssentialProbeReport lambda0_ess_probe(const FamilyPtr& family,
                                       const std::vector<int>& hole_levels, int N,
                                       const SolverOptions& opts) {
    if (!family) throw DomainError("essential probe: null family");
    if (hole_levels.empty()) throw DomainError("essential probe: no hole levels");

    EssentialProbeReport report;
    report.base = lambda0_series(*family, N, opts);
    report.hole_levels = hole_levels;
    report.caveat =
        "Punctured bottoms at finite levels only gesture at the essential "
        "spectrum; they are upper bounds for the punctured-graph bottoms, not "
        "certified bounds for the limit.";

    for (int h : hole_levels) {
        if (h < 1 || h >= N)
            throw DomainError("essential probe: hole level must lie in [1, N)");
        HoleFamily punctured(family, h);
        EvidenceSeries s;
        s.name = "lambda0-hole-" + std::to_string(h);
        s.expected = Monotonicity::Decreasing;
        s.values.assign(static_cast<std::size_t>(N - h), 0.0);
        parallel_for(s.values.size(), [&](std::size_t i) {
            auto S = DirichletSystem::assemble(punctured.region(h + 1 + static_cast<int>(i)));
            s.values[i] = lambda_min(S, opts).value;
        });
        for (int n = h + 1; n <= N; ++n) s.levels.push_back(n);
        report.probes.push_back(std::move(s));
    }

    report.best_estimate = report.probes.front().values.back();
    for (const auto& p : report.probes)
        report.best_estimate = std::max(report.best_estimate, p.values.back());
    return report;
}

WitnessReport ap_witness(const DirichletSystem& S, double lambda, double tol,
                         const SolverOptions& opts) {
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(S.n());
    RegionFunction u(S.region(), resolvent_apply(S, lambda, ones, opts));

    WitnessReport report{u, lambda, u.values().minCoeff(), 0.0, false};
    const GraphModel& model = *S.region()->model();
    // Row check straight from the model; the solve itself never enters.
    for (int i = 0; i < S.n(); ++i) {
        VertexId x = S.region()->vertex(i);
        double m = model.measure(x);
        double defect = std::abs(apply_H(model, u, x) - lambda * m * u[i] - m);
        report.row_defect = std::max(report.row_defect, defect);
    }
    report.verified = report.min_value > 0.0 && report.row_defect <= tol;
    return report;
}

namespace {

struct HarnackScratch {
    // Window adjacency with step costs d(x)/b(x,y), x the row.
    std::vector<std::vector<std::pair<int, double>>> steps;
    std::vector<std::vector<double>> best; // best[s][t]: cheapest simple path s→t
    std::vector<char> on_path;
    long long budget = 50'000'000;

    void dfs(int start, int v, double cost) {
        if (--budget < 0)
            throw SizeError("harnack: simple-path enumeration budget exhausted");
        on_path[static_cast<std::size_t>(v)] = 1;
        for (auto [w, factor] : steps[static_cast<std::size_t>(v)]) {
            if (on_path[static_cast<std::size_t>(w)]) continue;
            double c = cost * factor;
            auto& slot = best[static_cast<std::size_t>(start)][static_cast<std::size_t>(w)];
            if (c < slot) slot = c;
            dfs(start, w, c);
        }
        on_path[static_cast<std::size_t>(v)] = 0;
    }
};

} // namespace

std::optional<double> harnack_constant(const HarnackInstance& instance) {
    if (!instance.model) throw DomainError("harnack: null model");
    const auto& W = instance.window;
    const int n = static_cast<int>(W.size());
    if (n == 0) throw DomainError("harnack: empty window");
    if (n > instance.size_cap)
        throw SizeError("harnack: window exceeds the size cap (" +
                        std::to_string(instance.size_cap) + ")");

    std::unordered_map<VertexId, int> index;
    for (int i = 0; i < n; ++i) {
        if (!instance.model->contains(W[static_cast<std::size_t>(i)]))
            throw DomainError("harnack: window vertex not in graph");
        if (!index.emplace(W[static_cast<std::size_t>(i)], i).second)
            throw DomainError("harnack: duplicate window vertex");
    }

    // d(x) ≤ 0 breaks the step bound: report "nothing certified" rather than
    // a number.
    std::vector<double> d(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        VertexId x = W[static_cast<std::size_t>(i)];
        d[static_cast<std::size_t>(i)] = instance.model->weighted_degree(x) +
                                         instance.model->potential(x) -
                                         (instance.f ? instance.f(x) : 0.0);
        if (!(d[static_cast<std::size_t>(i)] > 0.0)) return std::nullopt;
    }

    HarnackScratch scratch;
    scratch.steps.resize(static_cast<std::size_t>(n));
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        instance.model->neighbors(W[static_cast<std::size_t>(i)], edges);
        for (const Edge& e : edges) {
            auto it = index.find(e.to);
            if (it == index.end()) continue;
            scratch.steps[static_cast<std::size_t>(i)].emplace_back(
                it->second, d[static_cast<std::size_t>(i)] / e.weight);
        }
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    scratch.best.assign(static_cast<std::size_t>(n),
                        std::vector<double>(static_cast<std::size_t>(n), kInf));
    scratch.on_path.assign(static_cast<std::size_t>(n), 0);
    for (int s = 0; s < n; ++s) {
        scratch.best[static_cast<std::size_t>(s)][static_cast<std::size_t>(s)] = 1.0;
        scratch.dfs(s, s, 1.0);
    }

    double constant = 1.0;
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
            double c = scratch.best[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
            if (c == kInf) throw DomainError("harnack: window is not connected");
            constant = std::max(constant, c);
        }
    return constant;
}

} // namespace sgl
