#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "sgl/forms.hpp"
#include "sgl/oracle.hpp"

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

RegionPtr window(const ModelPtr& model, VertexId lo, VertexId hi) {
    std::vector<VertexId> verts;
    for (VertexId k = lo; k <= hi; ++k) verts.push_back(k);
    return FiniteRegion::over(model, std::move(verts), 1);
}

RegionPtr lattice_window(const std::shared_ptr<LatticeGraph>& z, std::int64_t lo,
                         std::int64_t hi) {
    std::vector<VertexId> verts;
    for (std::int64_t k = lo; k <= hi; ++k) verts.push_back(z->encode({k, 0, 0}));
    return FiniteRegion::over(z, std::move(verts), 1);
}

} // namespace

TEST_CASE("pointwise operator on elementary inputs") {
    // One vertex, q = 2: H reduces to multiplication by q.
    ExplicitGraph::Builder lone;
    lone.vertices = {7};
    lone.q[7] = 2.0;
    auto single = std::make_shared<ExplicitGraph>(std::move(lone));
    auto K1 = FiniteRegion::over(single, {7}, 1);
    CHECK(apply_H(*single, RegionFunction::constant(K1, 1.0), 7) == doctest::Approx(2.0));

    // Geometric profile on the integer line: L2^k = -2^{k-1}.
    auto z = std::make_shared<LatticeGraph>(1);
    auto W = lattice_window(z, -5, 5);
    auto u = RegionFunction::tabulate(W, [&](VertexId x) {
        return std::pow(2.0, static_cast<double>(z->decode(x)[0]));
    });
    CHECK(apply_H(*z, u, z->parse_vertex("0")) == doctest::Approx(-0.5).epsilon(1e-14));

    auto g2 = two_vertex();
    auto K2 = FiniteRegion::over(g2, g2->vertex_list(), 1);
    Eigen::VectorXd vals(2);
    vals << 1.0, 0.0;
    RegionFunction step(K2, vals);
    CHECK(apply_H(*g2, step, 0) == doctest::Approx(1.0));
    CHECK(apply_H(*g2, step, 1) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(apply_H(*g2, step, 5), DomainError);
}

TEST_CASE("quadratic form on small graphs") {
    auto g2 = two_vertex();
    auto K = FiniteRegion::over(g2, g2->vertex_list(), 1);
    Eigen::VectorXd vals(2);
    vals << 1.0, 0.0;
    CHECK(quad_form(*g2, RegionFunction(K, vals)) == doctest::Approx(1.0));
    CHECK(quad_form(*g2, RegionFunction::constant(K, 1.0)) == doctest::Approx(0.0));

    // Path 0-1-2 with q = (0,1,0) and phi = (1,2,0): edge terms 1 + 4, plus 1*2^2.
    ExplicitGraph::Builder pb;
    pb.vertices = {0, 1, 2};
    pb.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
    pb.q[1] = 1.0;
    auto path = std::make_shared<ExplicitGraph>(std::move(pb));
    auto KP = FiniteRegion::over(path, path->vertex_list(), 1);
    Eigen::VectorXd pv(3);
    pv << 1.0, 2.0, 0.0;
    CHECK(quad_form(*path, RegionFunction(KP, pv)) == doctest::Approx(9.0));
}

TEST_CASE("form handles functions on different regions") {
    auto z = std::make_shared<LatticeGraph>(1);
    auto inner = lattice_window(z, -1, 1);
    auto outer = lattice_window(z, -3, 3);
    auto phi = RegionFunction::delta(inner, z->parse_vertex("0"));
    auto psi = RegionFunction::delta(outer, z->parse_vertex("1"));
    // h(delta_0, delta_1) has the single shared edge: b * (1-0)(0-1) = -1.
    CHECK(quad_form(*z, phi, psi) == doctest::Approx(-1.0));
    CHECK(quad_form(*z, psi, phi) == doctest::Approx(-1.0));
}

TEST_CASE("transformed energy") {
    auto g2 = two_vertex();
    auto K = FiniteRegion::over(g2, g2->vertex_list(), 1);

    Eigen::VectorXd vv(2), pv(2);
    vv << 2.0, 3.0;
    pv << 1.0, 0.0;
    RegionFunction v(K, vv), phi(K, pv);
    CHECK(gst_form(*g2, v, RegionFunction::constant(K, 4.0)) == doctest::Approx(0.0));
    CHECK(gst_form(*g2, v, phi) == doctest::Approx(6.0));

    // v = 1 reduces to the plain form with q = 0.
    CHECK(gst_form(*g2, RegionFunction::constant(K, 1.0), phi) ==
          doctest::Approx(quad_form(*g2, phi)));

    Eigen::VectorXd bad(2);
    bad << 1.0, -1.0;
    CHECK_THROWS_AS(gst_form(*g2, RegionFunction(K, bad), phi), DomainError);
}

TEST_CASE("transform identity residual vanishes for harmonic pairs") {
    auto g2 = two_vertex();
    auto K2 = FiniteRegion::over(g2, g2->vertex_list(), 1);
    Eigen::VectorXd pv(2);
    pv << 0.3, -0.7;
    CHECK(gst_identity_residual(*g2, RegionFunction::constant(K2, 1.0),
                                [](VertexId) { return 0.0; },
                                RegionFunction(K2, pv)) == doctest::Approx(0.0));

    // v(k) = 2^k satisfies Hv = -v/2 on the integer line.
    auto z = std::make_shared<LatticeGraph>(1);
    auto W = lattice_window(z, -5, 5);
    auto v = RegionFunction::tabulate(W, [&](VertexId x) {
        return std::pow(2.0, static_cast<double>(z->decode(x)[0]));
    });
    auto phi = RegionFunction::delta(W, z->parse_vertex("0"));
    CHECK(gst_identity_residual(*z, v, [](VertexId) { return -0.5; }, phi) <= 1e-12);

    // v(n) = n is harmonic for the half-line with the killed edge at 1.
    auto dh = std::make_shared<DirichletHalfLineGraph>();
    auto Wd = window(dh, 1, 5);
    auto vn = RegionFunction::tabulate(Wd, [](VertexId n) { return static_cast<double>(n); });
    Eigen::VectorXd ind = Eigen::VectorXd::Zero(5);
    ind[0] = ind[1] = 1.0;
    CHECK(gst_identity_residual(*dh, vn, [](VertexId) { return 0.0; },
                                RegionFunction(Wd, ind)) <= 1e-12);

    // A wrong f is rejected rather than averaged into the residual.
    CHECK_THROWS_AS(gst_identity_residual(*z, v, [](VertexId) { return 0.25; }, phi),
                    DomainError);
}

TEST_CASE("extended energy partial sums") {
    auto z = std::make_shared<LatticeGraph>(1);
    auto big = lattice_window(z, -6, 6);
    auto v = RegionFunction::tabulate(big, [&](VertexId x) {
        return std::pow(2.0, static_cast<double>(z->decode(x)[0]));
    });

    // g = v: the ratio is constant, so the interior partial sum vanishes.
    // The window's edge terms would need v one step out, which is exactly
    // what the truncation flag reports.
    auto same = extended_form(*z, v, v);
    CHECK(same.interior_sum == doctest::Approx(0.0));
    CHECK(same.truncated);

    // g = v inside a smaller window, 0 outside: only the cut edges
    // contribute, with energy b*v(x)*v(y) per boundary edge.
    auto K = lattice_window(z, -2, 2);
    auto g = RegionFunction::tabulate(K, [&](VertexId x) {
        return std::pow(2.0, static_cast<double>(z->decode(x)[0]));
    });
    auto cut = extended_form(*z, v, g);
    double expected = 0.25 * 0.125 + 4.0 * 8.0; // v(-2)v(-3) + v(2)v(3)
    CHECK(cut.interior_sum == doctest::Approx(0.0));
    CHECK(cut.boundary_sum == doctest::Approx(expected).epsilon(1e-14));
    // Same value through the transformed energy of the indicator g/v = 1_K.
    CHECK(gst_form(*z, v, RegionFunction::constant(K, 1.0)) ==
          doctest::Approx(cut.value()).epsilon(1e-14));

    // v available only on K itself: the boundary terms cannot be formed.
    auto vk = RegionFunction::tabulate(K, [&](VertexId x) {
        return std::pow(2.0, static_cast<double>(z->decode(x)[0]));
    });
    CHECK(extended_form(*z, vk, g).truncated);

    // Linear ramp down over N steps on the half-line: energy 1/N.
    auto h = std::make_shared<HalfLineGraph>();
    const int N = 25;
    auto Wh = window(h, 0, N);
    auto ones = RegionFunction::constant(window(h, 0, N + 1), 1.0);
    auto tent = RegionFunction::tabulate(Wh, [&](VertexId n) {
        return std::max(0.0, 1.0 - static_cast<double>(n) / N);
    });
    CHECK(extended_form(*h, ones, tent).value() == doctest::Approx(1.0 / N).epsilon(1e-12));
}

TEST_CASE("summation-by-parts identity on random data") {
    auto graphs = std::vector<std::shared_ptr<const ExplicitGraph>>{};
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        oracle::RandomGraphSpec spec;
        spec.min_vertices = 20;
        spec.max_vertices = 60;
        spec.q_mode = oracle::RandomGraphSpec::QMode::NonNegative;
        graphs.push_back(oracle::random_graph(spec, seed));
    }
    std::mt19937_64 rng(2026);
    std::normal_distribution<double> gauss;
    for (const auto& g : graphs) {
        auto K = FiniteRegion::over(g, g->vertex_list(), 1);
        for (int rep = 0; rep < 20; ++rep) {
            Eigen::VectorXd a(K->size()), b(K->size());
            for (int i = 0; i < K->size(); ++i) {
                a[i] = gauss(rng);
                b[i] = gauss(rng);
            }
            RegionFunction phi(K, a), psi(K, b);
            double lhs = quad_form(*g, phi, psi);
            CHECK(quad_form(*g, psi, phi) == doctest::Approx(lhs).epsilon(1e-12));
            double rhs = 0.0, scale = 0.0;
            for (int i = 0; i < K->size(); ++i) {
                double hphi = apply_H(*g, phi, K->vertex(i));
                rhs += hphi * psi[i];
                scale += std::abs(hphi * psi[i]);
            }
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("energy bound from a negative-eigenvalue profile") {
    // With Hv = fv and f <= 0, the transform splits h(phi) into a
    // nonnegative part plus the f-term, so h(phi) >= sum f phi^2.
    auto z = std::make_shared<LatticeGraph>(1);
    auto W = lattice_window(z, -5, 5);
    auto inner = lattice_window(z, -3, 3);
    auto v = RegionFunction::tabulate(W, [&](VertexId x) {
        return std::pow(2.0, static_cast<double>(z->decode(x)[0]));
    });
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        Eigen::VectorXd a(inner->size());
        for (int i = 0; i < inner->size(); ++i) a[i] = unif(rng);
        RegionFunction phi(inner, a);
        double res = gst_identity_residual(*z, v, [](VertexId) { return -0.5; }, phi);
        CHECK(res <= 1e-10 * std::max(1.0, std::abs(quad_form(*z, phi))));
        CHECK(quad_form(*z, phi) >= -0.5 * a.squaredNorm() - 1e-10);
    }
}
