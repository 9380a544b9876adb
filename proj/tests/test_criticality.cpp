#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "sgl/criticality.hpp"
#include "sgl/forms.hpp"

using namespace sgl;

namespace {

FamilyPtr halfline_family(FieldSpec q = {}) {
    auto model = std::make_shared<HalfLineGraph>(std::move(q));
    return make_ball_family(model, 0);
}

FamilyPtr killed_halfline_family(FieldSpec q = {}) {
    auto model = std::make_shared<DirichletHalfLineGraph>(std::move(q));
    return make_ball_family(model, 1);
}

} // namespace

TEST_CASE("green and capacity series follow the closed forms") {
    auto fam = halfline_family();

    // Level n keeps {0..n}; the Green diagonal at the origin is n+1.
    EvidenceSeries g = green_series(*fam, 0, 0, 12);
    EvidenceSeries cap = capacity_series(*fam, 0, 12);
    REQUIRE(g.values.size() == 12);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        double n = static_cast<double>(g.levels[i]);
        CHECK(g.values[i] == doctest::Approx(n + 1.0).epsilon(1e-12));
        CHECK(cap.values[i] * g.values[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(g.is_monotone());
    CHECK(cap.is_monotone());
    CHECK_NOTHROW(g.require_monotone());

    // Two arms of resistance n+1 in parallel on the full line.
    auto z = std::make_shared<LatticeGraph>(1);
    auto zfam = make_ball_family(z, z->parse_vertex("0"));
    EvidenceSeries zg = green_series(*zfam, zfam->anchor(), zfam->anchor(), 8);
    for (std::size_t i = 0; i < zg.values.size(); ++i) {
        double n = static_cast<double>(zg.levels[i]);
        CHECK(zg.values[i] == doctest::Approx((n + 1.0) / 2.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(green_series(*fam, 0, 5, 2), DomainError);
}

TEST_CASE("classifier separates capacity decay from a plateau") {
    auto fam = halfline_family();
    ClassificationReport free_line = classify(*fam, 0, 40);
    CHECK(free_line.verdict == Verdict::Critical);
    CHECK(free_line.parameters.at("first_last_shrink") >= 5.0);
    CHECK(free_line.caveat == classification_caveat());
    REQUIRE(free_line.evidence.size() == 2);
    CHECK(free_line.evidence[0].name == "capacity");
    CHECK(free_line.evidence[1].name == "green");
    CHECK(free_line.evidence[0].is_monotone());
    CHECK(free_line.evidence[1].is_monotone());

    // Killing at the origin pins the diagonal at n/(n+1): a plateau.
    ClassificationReport killed = classify(*killed_halfline_family(), 1, 40);
    CHECK(killed.verdict == Verdict::Subcritical);
    CHECK(killed.parameters.at("last_quarter_drop") < 0.05);

    // An indefinite potential voids the dichotomy outright.
    auto sunk = halfline_family(FieldSpec{-0.5, {}, nullptr});
    CHECK_THROWS_AS(classify(*sunk, 0, 8), FormNotNonnegativeError);
}

TEST_CASE("normalized green columns approach the constant profile") {
    auto fam = halfline_family();
    const int N = 40;
    GroundStateResult gs = ground_state(*fam, 0, N);
    CHECK(gs.critical);
    CHECK(gs.level == N);
    CHECK(gs.psi.value_at(0) == doctest::Approx(1.0).epsilon(1e-12));
    for (VertexId k : gs.probe_window)
        CHECK(gs.psi.value_at(k) ==
              doctest::Approx((N + 1.0 - static_cast<double>(k)) / (N + 1.0)).epsilon(1e-10));
    // Successive levels move the window values by at most 10/(N(N+1)).
    CHECK(gs.probe_delta > 0.0);
    CHECK(gs.probe_delta <= 10.0 / (N * (N + 1.0)) + 1e-12);
}

TEST_CASE("potential manufactured from an exponential profile returns it") {
    // q is chosen so that (L+q) v = 0 for v(k) = 2^{-|k|}; the normalized
    // columns must then reproduce v itself.
    auto probe = std::make_shared<LatticeGraph>(1);
    VertexId id0 = probe->parse_vertex("0");
    FieldSpec q{0.5, {{id0, -1.5}}, nullptr};
    auto z = std::make_shared<LatticeGraph>(1, q);

    const int N = 16;
    auto fam = make_ball_family(z, z->parse_vertex("0"));
    GroundStateResult gs = ground_state(*fam, fam->anchor(), N);
    CHECK(gs.critical);
    CHECK(gs.probe_delta < 1e-5);
    for (int k = -6; k <= 6; ++k) {
        double want = std::pow(2.0, -std::abs(k));
        CHECK(gs.psi.value_at(z->parse_vertex(std::to_string(k))) ==
              doctest::Approx(want).epsilon(1e-6));
    }

    // The profile does not depend on the anchor: ratios normalized at the
    // origin agree across anchors.
    auto fam1 = make_ball_family(z, z->parse_vertex("1"));
    GroundStateResult gs1 = ground_state(*fam1, fam1->anchor(), N);
    double s = gs1.psi.value_at(id0);
    REQUIRE(s > 0.0);
    for (int k = -3; k <= 3; ++k) {
        VertexId v = z->parse_vertex(std::to_string(k));
        CHECK(gs1.psi.value_at(v) / s ==
              doctest::Approx(gs.psi.value_at(v)).epsilon(1e-5));
    }
}

TEST_CASE("null sequence carries vanishing energy equal to the capacity") {
    auto fam = halfline_family();
    auto seq = null_sequence(*fam, 0, 30);
    REQUIRE(seq.size() == 30);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& entry : seq) {
        double cap = 1.0 / (entry.level + 1.0);
        CHECK(entry.energy == doctest::Approx(cap).epsilon(1e-10));
        CHECK(entry.e.value_at(0) == doctest::Approx(1.0).epsilon(1e-12));
        // Minimum principle: the normalized column stays inside [0, 1].
        for (int i = 0; i < entry.e.region()->size(); ++i) {
            CHECK(entry.e[i] >= -1e-12);
            CHECK(entry.e[i] <= 1.0 + 1e-12);
        }
        CHECK(entry.energy < prev);
        prev = entry.energy;
    }
}

TEST_CASE("minimal green column solves the equation on the interior") {
    auto fam = killed_halfline_family();
    MinimalGreenResult mg = minimal_green(*fam, 1, 30);
    CHECK(mg.checked_vertices == 28);
    CHECK(mg.interior_defect <= 1e-10);
    CHECK(mg.g.value_at(1) == doctest::Approx(30.0 / 31.0).epsilon(1e-10));

    // No minimal positive Green function without a subcritical verdict.
    auto free_fam = halfline_family();
    CHECK_THROWS_AS(minimal_green(*free_fam, 0, 30), NoMinimalGreenError);
}

TEST_CASE("optimal hardy weight keeps the pencil bottom above one") {
    auto fam = killed_halfline_family();
    auto hardy = [](VertexId n) { return 1.0 / (4.0 * static_cast<double>(n) * n); };

    EvidenceSeries bottoms = weight_nonneg_series(*fam, hardy, 40);
    CHECK_NOTHROW(bottoms.require_monotone(1e-8));
    for (double v : bottoms.values) CHECK(v >= 1.0 - 1e-9);

    // A pencil bottom >= 1 forces w(x) G(x,x) <= 1 pointwise.
    auto S = DirichletSystem::assemble(fam->region(40));
    for (VertexId x = 1; x <= 40; ++x) {
        double gxx = solve_green(S, x).value_at(x);
        CHECK(hardy(x) * gxx <= 1.0 + 1e-10);
    }

    // Doubling the weight loses the inequality at level 52 exactly.
    auto doubled = [](VertexId n) { return 1.0 / (2.0 * static_cast<double>(n) * n); };
    EvidenceSeries crossed = weight_nonneg_series(*fam, doubled, 55);
    CHECK(crossed.values[50] >= 1.0); // level 51
    CHECK(crossed.values[51] < 1.0);  // level 52
}

TEST_CASE("weighted mass of the ground state separates the critical kinds") {
    auto fam = halfline_family();
    auto one = [](VertexId) { return 1.0; };

    ClassificationReport null_kind =
        weight_criticality(*fam, one, [](VertexId) { return 1.0; }, 100);
    CHECK(null_kind.verdict == Verdict::NullCritical);
    CHECK(null_kind.parameters.at("mass_last") == doctest::Approx(101.0));

    auto geometric = [](VertexId n) { return std::pow(2.0, -static_cast<double>(n)); };
    ClassificationReport positive_kind =
        weight_criticality(*fam, geometric, [](VertexId) { return 1.0; }, 100);
    CHECK(positive_kind.verdict == Verdict::PositiveCritical);

    auto z = std::make_shared<LatticeGraph>(1);
    auto zfam = make_ball_family(z, z->parse_vertex("0"));
    auto cauchy = [&](VertexId v) {
        double k = z->coord_norm(v);
        return 1.0 / (1.0 + k * k);
    };
    ClassificationReport lattice_kind =
        weight_criticality(*zfam, cauchy, [](VertexId) { return 1.0; }, 40);
    CHECK(lattice_kind.verdict == Verdict::PositiveCritical);
    CHECK(lattice_kind.parameters.at("last_quarter_gain") < 0.05);

    auto negative = [](VertexId n) { return n == 3 ? -1.0 : 1.0; };
    CHECK_THROWS_AS(weight_criticality(*fam, negative, one, 10), DomainError);
}

TEST_CASE("sampled green diagonals flag growth but never certify bounds") {
    auto killed = killed_halfline_family();
    UniformProbeReport grows =
        uniform_subcriticality_probe(*killed, {1, 2, 5, 10}, 60);
    CHECK(grows.unbounded_trend);
    CHECK(grows.spread > 1.0);
    CHECK(grows.max_green == doctest::Approx(10.0 * 51.0 / 61.0).epsilon(1e-10));
    CHECK(grows.capacity_floor == doctest::Approx(1.0 / grows.max_green).epsilon(1e-12));
    CHECK(grows.caveat == sample_caveat());
    CHECK(grows.caveat.find("a finite sample cannot certify the sup over X") !=
          std::string::npos);

    // A uniformly positive potential flattens the sample.
    auto flat = halfline_family(FieldSpec{1.0, {}, nullptr});
    UniformProbeReport bounded =
        uniform_subcriticality_probe(*flat, {0, 3, 7, 15}, 60);
    CHECK_FALSE(bounded.unbounded_trend);
    CHECK(bounded.spread < 1.0);

    CHECK_THROWS_AS(uniform_subcriticality_probe(*flat, {}, 10), DomainError);
    CHECK_THROWS_AS(uniform_subcriticality_probe(*flat, {99}, 10), DomainError);
}

TEST_CASE("binary tree is subcritical with a clean minimal green column") {
    auto tree = std::make_shared<TreeGraph>(2);
    auto fam = make_ball_family(tree, 0);

    auto report = classify(*fam, 0, 6);
    CHECK(report.verdict == Verdict::Subcritical);

    MinimalGreenResult mg = minimal_green(*fam, 0, 6);
    CHECK(mg.interior_defect <= 1e-8);
    CHECK(mg.g.value_at(0) > 0.0);
    // Transience shows as a capacity plateau well above zero.
    for (const auto& s : report.evidence)
        if (s.name == "capacity") CHECK(s.back() > 0.5);
}

TEST_CASE("a single vertex with positive potential probes as bounded") {
    ExplicitGraph::Builder b;
    b.vertices = {0};
    b.q = {{0, 2.0}};
    auto model = std::make_shared<ExplicitGraph>(std::move(b));
    auto fam = make_ball_family(model, 0);

    UniformProbeReport probe = uniform_subcriticality_probe(*fam, {0}, 5);
    CHECK(probe.max_green == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probe.capacity_floor == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(probe.unbounded_trend);
    CHECK(probe.spread == 0.0);

    CHECK(classify(*fam, 0, 5).verdict == Verdict::Subcritical);
}

TEST_CASE("indicator weight turns the pencil bottom into the capacity") {
    auto fam = halfline_family();
    auto w = [](VertexId n) { return n == 0 ? 1.0 : 0.0; };
    EvidenceSeries s = weight_nonneg_series(*fam, w, 12);
    REQUIRE(s.values.size() == 12);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        double n = static_cast<double>(s.levels[i]);
        CHECK(s.values[i] == doctest::Approx(1.0 / (n + 1.0)).epsilon(1e-10));
    }
    CHECK(s.is_monotone());
}

TEST_CASE("green columns are the smallest nonnegative solutions") {
    // u = H^{-1}(1_x + r) with r >= 0 dominates the Green column pointwise.
    auto fam = killed_halfline_family();
    auto region = fam->region(25);
    auto S = DirichletSystem::assemble(region);
    int ix = region->index_of(3);
    REQUIRE(ix >= 0);
    Eigen::VectorXd g = solve_green_vec(S, ix);

    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S.n());
        rhs[ix] = 1.0;
        for (int i = 0; i < S.n(); ++i) rhs[i] += unif(rng);
        Eigen::VectorXd u =
            solve_spd(S, Eigen::VectorXd::Zero(S.n()), rhs, SolverOptions{}, "minimality");
        for (int i = 0; i < S.n(); ++i) CHECK(u[i] >= g[i] - 1e-12);
    }
}
