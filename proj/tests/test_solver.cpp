#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "sgl/forms.hpp"
#include "sgl/oracle.hpp"
#include "sgl/solver.hpp"

using namespace sgl;

namespace {

std::shared_ptr<ExplicitGraph> two_vertex(double q0 = 0.0, double q1 = 0.0) {
    ExplicitGraph::Builder b;
    b.vertices = {0, 1};
    b.edges = {{0, 1, 1.0}};
    if (q0 != 0.0) b.q[0] = q0;
    if (q1 != 0.0) b.q[1] = q1;
    return std::make_shared<ExplicitGraph>(std::move(b));
}

std::shared_ptr<ExplicitGraph> single_vertex(double q) {
    ExplicitGraph::Builder b;
    b.vertices = {0};
    b.q[0] = q;
    return std::make_shared<ExplicitGraph>(std::move(b));
}

DirichletSystem whole(const std::shared_ptr<ExplicitGraph>& g) {
    return DirichletSystem::assemble(FiniteRegion::over(g, g->vertex_list(), 1));
}

// Dirichlet path with n interior vertices: {1..n} inside the half-line with
// a killed edge on each end would be {1..n} of Z; use the lattice ball trick.
DirichletSystem dirichlet_path(int n) {
    auto z = std::make_shared<LatticeGraph>(1);
    std::vector<VertexId> verts;
    for (int k = 1; k <= n; ++k) verts.push_back(z->encode({k, 0, 0}));
    return DirichletSystem::assemble(FiniteRegion::over(z, std::move(verts), 1));
}

double path_lambda(int n, int k = 1) {
    double s = std::sin(k * M_PI / (2.0 * (n + 1)));
    return 4.0 * s * s;
}

} // namespace

TEST_CASE("assembly matches hand matrices") {
    auto S2 = whole(two_vertex());
    Eigen::MatrixXd D2 = S2.dense();
    CHECK(D2(0, 0) == doctest::Approx(1.0));
    CHECK(D2(0, 1) == doctest::Approx(-1.0));
    CHECK(D2(1, 1) == doctest::Approx(1.0));

    auto z = std::make_shared<LatticeGraph>(1);
    auto S3 = DirichletSystem::assemble(FiniteRegion::ball(z, z->parse_vertex("0"), 1));
    Eigen::MatrixXd D3 = S3.dense();
    for (int i = 0; i < 3; ++i) CHECK(D3(i, i) == doctest::Approx(2.0));
    CHECK(D3(0, 1) == doctest::Approx(-1.0));
    CHECK(D3(1, 2) == doctest::Approx(-1.0));
    CHECK(D3(0, 2) == doctest::Approx(0.0));

    auto dh = std::make_shared<DirichletHalfLineGraph>();
    auto Sd = DirichletSystem::assemble(FiniteRegion::over(dh, {1, 2}, 1));
    Eigen::MatrixXd Dd = Sd.dense();
    CHECK(Dd(0, 0) == doctest::Approx(2.0));
    CHECK(Dd(1, 1) == doctest::Approx(2.0));
    CHECK(Dd(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("assembled quadratic matches the form") {
    oracle::RandomGraphSpec spec;
    spec.min_vertices = 30;
    spec.max_vertices = 80;
    spec.q_mode = oracle::RandomGraphSpec::QMode::NonNegative;
    auto g = oracle::random_graph(spec, 7);
    auto K = FiniteRegion::over(g, g->vertex_list(), 1);
    auto S = DirichletSystem::assemble(K);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    for (int rep = 0; rep < 100; ++rep) {
        Eigen::VectorXd a(K->size());
        for (int i = 0; i < K->size(); ++i) a[i] = gauss(rng);
        double viaMatrix = S.quad(a);
        double viaForm = quad_form(*g, RegionFunction(K, a));
        CHECK(std::abs(viaMatrix - viaForm) <= 1e-12 * std::max(1.0, std::abs(viaForm)));
    }
}

TEST_CASE("green columns on the closed-form families") {
    auto z = std::make_shared<LatticeGraph>(1);
    for (int n : {1, 4, 9}) {
        auto S = DirichletSystem::assemble(FiniteRegion::ball(z, z->parse_vertex("0"), n));
        auto g = solve_green(S, z->parse_vertex("0"));
        CHECK(g.value_at(z->parse_vertex("0")) ==
              doctest::Approx((n + 1) / 2.0).epsilon(1e-12));
    }

    auto h = std::make_shared<HalfLineGraph>();
    for (int n : {1, 5, 20}) {
        auto S = DirichletSystem::assemble(FiniteRegion::ball(h, 0, n));
        CHECK(solve_green(S, 0).value_at(0) == doctest::Approx(n + 1.0).epsilon(1e-12));
    }

    auto dh = std::make_shared<DirichletHalfLineGraph>();
    for (int N : {1, 7, 30}) {
        std::vector<VertexId> verts;
        for (int k = 1; k <= N; ++k) verts.push_back(k);
        auto S = DirichletSystem::assemble(FiniteRegion::over(dh, std::move(verts), N));
        CHECK(solve_green(S, 1).value_at(1) ==
              doctest::Approx(N / (N + 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("iterative path reproduces the closed form above the dense cutoff") {
    auto h = std::make_shared<HalfLineGraph>();
    const int n = 600; // 601 vertices: forces the conjugate-gradient route
    auto S = DirichletSystem::assemble(FiniteRegion::ball(h, 0, n));
    auto g = solve_green(S, 0);
    CHECK(g.value_at(0) == doctest::Approx(n + 1.0).epsilon(1e-9));
    // Interior profile is linear: u(k) = n+1-k.
    CHECK(g.value_at(300) == doctest::Approx(n + 1.0 - 300).epsilon(1e-9));
}

TEST_CASE("singular restriction surfaces a curvature direction") {
    auto S = whole(two_vertex());
    try {
        solve_green(S, 0);
        FAIL("expected a definiteness error");
    } catch (const DefinitenessError& e) {
        REQUIRE(e.direction().size() == 2);
        Eigen::VectorXd d(2);
        d << e.direction()[0], e.direction()[1];
        CHECK(d.norm() > 0.5);
        CHECK(d.dot(S.matrix() * d) <= 1e-8);
    }
}

TEST_CASE("smallest eigenpair") {
    auto S2 = whole(two_vertex());
    auto ep = lambda_min(S2);
    CHECK(ep.value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ep.vector[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-7));
    CHECK(ep.vector[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-7));

    for (int n : {3, 9, 25}) {
        auto ep2 = lambda_min(dirichlet_path(n));
        CHECK(ep2.value == doctest::Approx(path_lambda(n)).epsilon(1e-9));
        for (int i = 0; i < n; ++i) CHECK(ep2.vector[i] > 0.0);
    }

    auto S1 = whole(single_vertex(3.0));
    CHECK(lambda_min(S1).value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("smallest eigenpair through the iterative route") {
    auto ep = lambda_min(dirichlet_path(520));
    CHECK(ep.value == doctest::Approx(path_lambda(520)).epsilon(1e-6));
    CHECK(ep.vector.minCoeff() > 0.0);
}

TEST_CASE("bottom two eigenvalues") {
    auto [e0, e1] = lambda_pair(dirichlet_path(9));
    CHECK(e0.value == doctest::Approx(path_lambda(9, 1)).epsilon(1e-9));
    REQUIRE(e1.has_value());
    CHECK(e1->value == doctest::Approx(path_lambda(9, 2)).epsilon(1e-8));

    auto [s0, s1] = lambda_pair(whole(single_vertex(2.0)));
    CHECK(s0.value == doctest::Approx(2.0));
    CHECK_FALSE(s1.has_value());
}

TEST_CASE("pencil bottom with full and partial supports") {
    auto S2 = whole(two_vertex());
    CHECK(generalized_lambda_min(S2, Eigen::VectorXd::Ones(2)).value ==
          doctest::Approx(0.0).epsilon(1e-9));

    auto S1 = whole(single_vertex(2.0));
    Eigen::VectorXd w1(1);
    w1 << 2.0;
    CHECK(generalized_lambda_min(S1, w1).value == doctest::Approx(1.0).epsilon(1e-12));

    // q = (1,1), w charges only vertex 0: eliminate vertex 1 and minimize
    // ((phi0-phi1)^2 + phi0^2 + phi1^2)/phi0^2 by hand: 3/2.
    auto Sq = whole(two_vertex(1.0, 1.0));
    Eigen::VectorXd wp(2);
    wp << 1.0, 0.0;
    auto gb = generalized_lambda_min(Sq, wp);
    CHECK(gb.value == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(gb.support == 1);
    // Reported vector carries the eliminated coordinate's minimizer.
    CHECK(gb.vector[1] / gb.vector[0] == doctest::Approx(0.5).epsilon(1e-10));

    CHECK_THROWS_AS(generalized_lambda_min(S2, Eigen::VectorXd::Zero(2)),
                    DegenerateWeightError);

    // Hardy weight on the killed half-line: bottom stays above 1.
    auto dh = std::make_shared<DirichletHalfLineGraph>();
    std::vector<VertexId> verts;
    for (int k = 1; k <= 60; ++k) verts.push_back(k);
    auto K = FiniteRegion::over(dh, std::move(verts), 60);
    auto Sd = DirichletSystem::assemble(K);
    Eigen::VectorXd wh(K->size());
    for (int i = 0; i < K->size(); ++i) {
        double nn = static_cast<double>(K->vertex(i));
        wh[i] = 1.0 / (4.0 * nn * nn);
    }
    auto hb = generalized_lambda_min(Sd, wh);
    CHECK(hb.value >= 1.0 - 1e-9);
    CHECK(hb.value < 2.5); // decays toward 1 only logarithmically in N
}

TEST_CASE("resolvent values and guards") {
    auto S2 = whole(two_vertex());
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2);
    f[0] = 1.0;
    auto u = resolvent_apply(S2, -1.0, f);
    CHECK(u[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(u[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    auto S1 = whole(single_vertex(2.0));
    Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    CHECK(resolvent_apply(S1, -2.0, one)[0] == doctest::Approx(0.25).epsilon(1e-12));

    CHECK(resolvent_apply(S2, -0.5, Eigen::VectorXd::Zero(2)).norm() == 0.0);

    CHECK_THROWS_AS(resolvent_apply(S2, 0.0, f), SpectralParameterError);
    CHECK_THROWS_AS(resolvent_apply(S2, 0.5, f), SpectralParameterError);
}

TEST_CASE("resolvent is monotone in the spectral parameter") {
    auto S = dirichlet_path(12);
    Eigen::VectorXd f = Eigen::VectorXd::Ones(12);
    auto ulow = resolvent_apply(S, -2.0, f);
    auto uhigh = resolvent_apply(S, -0.5, f);
    for (int i = 0; i < 12; ++i) {
        CHECK(ulow[i] >= -1e-12);
        CHECK(ulow[i] <= uhigh[i] + 1e-12);
    }
}

TEST_CASE("semigroup action on elementary systems") {
    auto S1 = whole(single_vertex(2.0));
    Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    CHECK(heat_apply(S1, 1.0, one)[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(heat_apply(S1, 0.0, one)[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(heat_apply(S1, -1.0, one), DomainError);

    auto S2 = whole(two_vertex());
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2);
    f[0] = 1.0;
    auto u = heat_apply(S2, 1.0, f);
    CHECK(u[0] == doctest::Approx((1.0 + std::exp(-2.0)) / 2.0).epsilon(1e-12));
    CHECK(u[1] == doctest::Approx((1.0 - std::exp(-2.0)) / 2.0).epsilon(1e-12));
}

TEST_CASE("dense and substepped semigroup routes agree") {
    auto S = dirichlet_path(40);
    SolverOptions dense_opts;
    SolverOptions krylov_opts;
    krylov_opts.dense_threshold = 1; // force the Lanczos route
    auto planD = HeatPlan::make(S, dense_opts);
    auto planK = HeatPlan::make(S, krylov_opts);
    CHECK(planD.dense());
    CHECK_FALSE(planK.dense());
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd f(40);
    for (int i = 0; i < 40; ++i) f[i] = gauss(rng);
    for (double t : {0.1, 1.0, 10.0}) {
        Eigen::VectorXd a = planD.apply(t, f);
        Eigen::VectorXd b = planK.apply(t, f);
        CHECK((a - b).norm() <= 1e-8 * std::max(1.0, f.norm()));
    }
    CHECK_THROWS_AS(planK.eigenvalues(), DomainError);
}

TEST_CASE("heat flow preserves positivity and contracts") {
    auto S = dirichlet_path(15);
    auto plan = HeatPlan::make(S);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(15);
    f[7] = 1.0;
    double prev = f.norm();
    for (double t : {0.5, 1.0, 2.0, 4.0}) {
        Eigen::VectorXd u = plan.apply(t, f);
        CHECK(u.minCoeff() >= -1e-12);
        CHECK(u.norm() <= prev + 1e-12);
        prev = u.norm();
    }
}

TEST_CASE("laplace transform ties the semigroup to the resolvent") {
    // For lambda below the spectrum, integrating e^{t lambda} e^{-tH} f
    // recovers the resolvent. Composite Simpson; the tail beyond T is
    // bounded by e^{(lambda - lambda_min) T}.
    auto check_system = [](const DirichletSystem& S, int n) {
        auto plan = HeatPlan::make(S);
        double l0 = lambda_min(S).value;
        double lambda = l0 - 1.0;
        const double T = 40.0;
        const int steps = 8000; // Simpson over [0, T]
        Eigen::VectorXd f = Eigen::VectorXd::Ones(n);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        double hstep = T / steps;
        for (int k = 0; k <= steps; ++k) {
            double t = k * hstep;
            double wgt = (k == 0 || k == steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            acc += wgt * std::exp(t * lambda) * plan.apply(t, f);
        }
        acc *= hstep / 3.0;
        Eigen::VectorXd ref = resolvent_apply(S, lambda, f);
        CHECK((acc - ref).norm() <= 1e-6 * std::max(1.0, ref.norm()));
    };
    check_system(whole(two_vertex()), 2);
    check_system(dirichlet_path(9), 9);
}

TEST_CASE("direct exponential action against the dense spectrum") {
    oracle::RandomGraphSpec spec;
    spec.min_vertices = 25;
    spec.max_vertices = 50;
    spec.q_mode = oracle::RandomGraphSpec::QMode::NonNegative;
    auto g = oracle::random_graph(spec, 31);
    auto K = FiniteRegion::over(g, g->vertex_list(), 1);
    auto S = DirichletSystem::assemble(K);
    auto spectrum = oracle::dense_spectrum(K);

    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd f(K->size());
    for (int i = 0; i < K->size(); ++i) f[i] = gauss(rng);

    auto apply = [&](const Eigen::VectorXd& u) { return Eigen::VectorXd(S.matrix() * u); };
    for (double t : {0.25, 2.0}) {
        Eigen::VectorXd viaKrylov = krylov_expm_apply(apply, f, t, 1e-10);
        Eigen::VectorXd viaSpectrum = Eigen::VectorXd::Zero(K->size());
        for (int j = 0; j < K->size(); ++j) {
            double c = spectrum.vectors.col(j).dot(f);
            viaSpectrum += std::exp(-t * spectrum.values[j]) * c * spectrum.vectors.col(j);
        }
        CHECK((viaKrylov - viaSpectrum).norm() <= 1e-8 * std::max(1.0, f.norm()));
    }
}

TEST_CASE("nonnegativity certificates") {
    CHECK(certify_nonnegative(whole(two_vertex(1.0, 1.0))));
    CHECK(certify_nonnegative(dirichlet_path(20)));
    CHECK_FALSE(certify_nonnegative(whole(two_vertex(-5.0, -5.0))));

    // Marginally nonnegative: the free 2-vertex graph has bottom exactly 0.
    CHECK(certify_nonnegative(whole(two_vertex()), 1e-8));
}
