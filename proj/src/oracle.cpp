#include "sgl/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "sgl/parallel.hpp"

namespace sgl {
namespace oracle {
namespace {

Eigen::MatrixXd dense_assemble(const FiniteRegion& K) {
    const int n = K.size();
    if (n > 2000) throw SizeError("oracle: dense route capped at 2000 vertices");
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) H(i, i) = K.full_degree(i) + K.potential(i);
    for (const InducedEdge& e : K.induced_edges()) {
        H(e.i, e.j) = -e.b;
        H(e.j, e.i) = -e.b;
    }
    return H;
}

} // namespace

RegionFunction dense_green(const RegionPtr& region, VertexId x) {
    if (!region) throw DomainError("oracle: null region");
    int ix = region->index_of(x);
    if (ix < 0) throw DomainError("oracle: vertex not in region");

    Eigen::MatrixXd H = dense_assemble(*region);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    const Eigen::VectorXd& D = ldlt.vectorD();
    double dmax = D.cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || D.minCoeff() <= 1e-12 * dmax)
        throw DefinitenessError(
            "oracle: H_K is singular or indefinite, no Green function on this region");

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(region->size());
    rhs[ix] = 1.0;
    Eigen::VectorXd g = ldlt.solve(rhs);
    g += ldlt.solve(rhs - H * g);
    return RegionFunction(region, std::move(g));
}

DenseSpectrum dense_spectrum(const RegionPtr& region) {
    if (!region) throw DomainError("oracle: null region");
    Eigen::MatrixXd H = dense_assemble(*region);
    const int n = region->size();
    Eigen::VectorXd msq(n), msqi(n);
    for (int i = 0; i < n; ++i) {
        msq[i] = std::sqrt(region->measure(i));
        msqi[i] = 1.0 / msq[i];
    }
    Eigen::MatrixXd B = msqi.asDiagonal() * H * msqi.asDiagonal();
    B = 0.5 * (B + B.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("oracle: dense eigendecomposition failed");
    DenseSpectrum out;
    out.values = es.eigenvalues();
    out.vectors = msqi.asDiagonal() * es.eigenvectors();
    return out;
}

// ---------------------------------------------------------------------------
// Lattice Green function by adaptive tensor Gauss-Kronrod quadrature.

namespace {

// 15-point Kronrod extension of 7-point Gauss on [-1,1]; the Gauss nodes are
// the odd-index entries.
constexpr int GK_N = 15;
const double gk_nodes[GK_N] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
const double gk_kronrod_w[GK_N] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
const double gk_gauss_w[7] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                              0.417959183673469, 0.381830050505119, 0.279705391489277,
                              0.129484966168870};

struct Box {
    double lo[5];
    double hi[5];
    double integral = 0.0;
    double error = 0.0;
};

struct BoxEval {
    int d;
    long evals = 0;

    // Per-axis node positions and scaled weights for the current box.
    double cosv[5][GK_N];
    double wk[5][GK_N];

    void prepare(const Box& box) {
        for (int ax = 0; ax < d; ++ax) {
            double c = 0.5 * (box.lo[ax] + box.hi[ax]);
            double h = 0.5 * (box.hi[ax] - box.lo[ax]);
            for (int i = 0; i < GK_N; ++i) {
                cosv[ax][i] = std::cos(c + h * gk_nodes[i]);
                wk[ax][i] = h * gk_kronrod_w[i];
            }
        }
    }

    // Accumulates Kronrod and embedded-Gauss sums in one sweep. gw carries
    // the Gauss weight product while all chosen indices are odd; even picks
    // kill it.
    void recurse(const Box& box, int ax, double cos_sum, double kw, double gw, double& ik,
                 double& ig) {
        if (ax == d) {
            double denom = 2.0 * (static_cast<double>(d) - cos_sum);
            double f = 1.0 / denom;
            ik += kw * f;
            ig += gw * f;
            ++evals;
            return;
        }
        double h = 0.5 * (box.hi[ax] - box.lo[ax]);
        for (int i = 0; i < GK_N; ++i) {
            double g = (i % 2 == 1) ? gw * h * gk_gauss_w[(i - 1) / 2] : 0.0;
            recurse(box, ax + 1, cos_sum + cosv[ax][i], kw * wk[ax][i], g, ik, ig);
        }
    }

    void evaluate(Box& box) {
        prepare(box);
        double ik = 0.0, ig = 0.0;
        recurse(box, 0, 0.0, 1.0, 1.0, ik, ig);
        box.integral = ik;
        box.error = std::abs(ik - ig);
    }
};

} // namespace

QuadratureResult lattice_green_quadrature(int d, double tol, int initial_splits) {
    if (d < 3)
        throw DivergentIntegralError(
            "lattice green: the integral diverges for d < 3 (recurrent lattice)");
    if (d > 5) throw UnsupportedError("lattice green: dimensions above 5 not supported");
    if (!(tol > 0.0)) throw DomainError("lattice green: tolerance must be positive");
    if (initial_splits < 0 || initial_splits > 4)
        throw DomainError("lattice green: initial splits out of range");
    if (std::pow(2.0, initial_splits * d) > 4096.0)
        throw DomainError("lattice green: initial grid too fine for this dimension");

    const double pi = std::acos(-1.0);
    const double scale = std::pow(1.0 / pi, d); // [0,π]^d covers the symmetric cube

    BoxEval eval;
    eval.d = d;

    // Seed grid: uniform 2^initial_splits pieces per axis.
    std::vector<Box> heap; // max-heap by error via std::push_heap
    auto box_less = [](const Box& a, const Box& b) { return a.error < b.error; };
    {
        int parts = 1 << initial_splits;
        std::vector<int> idx(static_cast<std::size_t>(d), 0);
        for (;;) {
            Box box;
            for (int ax = 0; ax < d; ++ax) {
                box.lo[ax] = pi * idx[static_cast<std::size_t>(ax)] / parts;
                box.hi[ax] = pi * (idx[static_cast<std::size_t>(ax)] + 1) / parts;
            }
            eval.evaluate(box);
            heap.push_back(box);
            int ax = 0;
            while (ax < d && ++idx[static_cast<std::size_t>(ax)] == parts) {
                idx[static_cast<std::size_t>(ax)] = 0;
                ++ax;
            }
            if (ax == d) break;
        }
        std::make_heap(heap.begin(), heap.end(), box_less);
    }

    const long box_cap = 200000;
    double total_err = 0.0;
    for (const Box& b : heap) total_err += b.error;

    long since_resync = 0;
    while (scale * total_err > 0.5 * tol) {
        if (static_cast<long>(heap.size()) >= box_cap)
            throw ConvergenceError("lattice green: refinement budget exhausted");
        std::pop_heap(heap.begin(), heap.end(), box_less);
        Box worst = heap.back();
        heap.pop_back();

        int ax = 0;
        double best = worst.hi[0] - worst.lo[0];
        for (int a = 1; a < d; ++a)
            if (worst.hi[a] - worst.lo[a] > best) {
                best = worst.hi[a] - worst.lo[a];
                ax = a;
            }
        double mid = 0.5 * (worst.lo[ax] + worst.hi[ax]);
        Box left = worst, right = worst;
        left.hi[ax] = mid;
        right.lo[ax] = mid;
        eval.evaluate(left);
        eval.evaluate(right);
        total_err += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), box_less);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), box_less);
        if (++since_resync >= 256) { // shed accumulation drift
            since_resync = 0;
            total_err = 0.0;
            for (const Box& b : heap) total_err += b.error;
        }
    }

    double total_val = 0.0;
    total_err = 0.0;
    for (const Box& b : heap) {
        total_val += b.integral;
        total_err += b.error;
    }

    QuadratureResult out;
    out.value = scale * total_val;
    out.error_estimate = scale * total_err;
    out.boxes = static_cast<long>(heap.size());
    out.evaluations = eval.evals;
    return out;
}

// ---------------------------------------------------------------------------
// Random-walk return mass

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

// Return-visit counts for one trial at every requested horizon. Everything
// is trial-local, so trials parallelize without shared state.
void walk_trial(const ModelPtr& model, VertexId x0, const std::vector<long>& horizons,
                std::uint64_t stream, std::vector<long>& counts) {
    std::mt19937_64 rng(stream);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const long tmax = horizons.back();
    counts.assign(horizons.size(), 0);
    VertexId pos = x0;
    std::size_t hi = 0;
    long visits = 0;

    std::vector<Edge> nb;
    for (long n = 0;; ++n) {
        if (pos == x0) ++visits;
        while (hi < horizons.size() && horizons[hi] == n) counts[hi++] = visits;
        if (n == tmax) break;

        if (model->potential(pos) != 0.0)
            throw UnsupportedError(
                "return mass: the walk is only defined for q ≡ 0 (nonzero potential at " +
                model->label(pos) + ")");
        model->neighbors(pos, nb);
        if (nb.empty()) throw DomainError("return mass: isolated vertex " + model->label(pos));
        double total = 0.0;
        for (const Edge& e : nb) total += e.weight;
        double u = unif(rng) * total;
        double acc = 0.0;
        VertexId next = nb.back().to;
        for (const Edge& e : nb) {
            acc += e.weight;
            if (u < acc) {
                next = e.to;
                break;
            }
        }
        pos = next;
    }
}

ReturnMassSeries rw_series_impl(const ModelPtr& model, VertexId x,
                                const std::vector<long>& horizons, long trials,
                                std::uint64_t seed) {
    if (!model) throw DomainError("return mass: null model");
    if (!model->contains(x)) throw DomainError("return mass: start vertex not in graph");
    if (horizons.empty()) throw DomainError("return mass: no horizons given");
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (horizons[i] < 0) throw DomainError("return mass: negative horizon");
        if (i + 1 < horizons.size() && horizons[i] >= horizons[i + 1])
            throw DomainError("return mass: horizons must be strictly increasing");
    }
    if (trials < 2) throw DomainError("return mass: need at least 2 trials");

    std::vector<std::vector<long>> counts(static_cast<std::size_t>(trials));
    const std::uint64_t base = splitmix64(seed);
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
        std::uint64_t stream = splitmix64(base ^ (0x9e3779b97f4a7c15ULL * (trial + 1)));
        walk_trial(model, x, horizons, stream, counts[trial]);
    });

    ReturnMassSeries out;
    out.horizons = horizons;
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        double mean = 0.0;
        for (long t = 0; t < trials; ++t) mean += static_cast<double>(counts[static_cast<std::size_t>(t)][h]);
        mean /= static_cast<double>(trials);
        double var = 0.0;
        for (long t = 0; t < trials; ++t) {
            double dev = static_cast<double>(counts[static_cast<std::size_t>(t)][h]) - mean;
            var += dev * dev;
        }
        var /= static_cast<double>(trials - 1);
        out.estimates.push_back(mean);
        out.half_widths.push_back(1.96 * std::sqrt(var / static_cast<double>(trials)));
    }
    return out;
}

} // namespace

ReturnMassEstimate rw_return_estimate(const ModelPtr& model, VertexId x, long horizon,
                                      long trials, std::uint64_t seed) {
    ReturnMassSeries series = rw_series_impl(model, x, {horizon}, trials, seed);
    ReturnMassEstimate out;
    out.estimate = series.estimates[0];
    out.half_width = series.half_widths[0];
    out.trials = trials;
    out.horizon = horizon;
    return out;
}

ReturnMassSeries rw_return_series(const ModelPtr& model, VertexId x,
                                  const std::vector<long>& horizons, long trials,
                                  std::uint64_t seed) {
    return rw_series_impl(model, x, horizons, trials, seed);
}

// ---------------------------------------------------------------------------
// Random instances

std::shared_ptr<const ExplicitGraph> random_graph(const RandomGraphSpec& spec,
                                                  std::uint64_t seed) {
    if (spec.min_vertices < 2 || spec.max_vertices < spec.min_vertices ||
        spec.max_vertices > 2000)
        throw DomainError("random graph: vertex bounds out of range");

    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const int n = spec.min_vertices +
                  static_cast<int>(rng() % static_cast<std::uint64_t>(
                                       spec.max_vertices - spec.min_vertices + 1));

    ExplicitGraph::Builder b;
    for (int i = 0; i < n; ++i) b.vertices.push_back(i);

    std::set<std::pair<int, int>> used;
    auto weight = [&] { return 1.0 - unif(rng); }; // (0, 1]
    for (int i = 1; i < n; ++i) {
        int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i));
        used.emplace(j, i);
        b.edges.emplace_back(j, i, weight());
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (used.count({i, j})) continue;
            if (unif(rng) < spec.edge_prob) b.edges.emplace_back(i, j, weight());
        }

    if (spec.random_measure)
        for (int i = 0; i < n; ++i) b.m[i] = 0.5 + 1.5 * unif(rng);

    switch (spec.q_mode) {
        case RandomGraphSpec::QMode::Zero:
            break;
        case RandomGraphSpec::QMode::NonNegative:
            for (int i = 0; i < n; ++i) b.q[i] = unif(rng);
            break;
        case RandomGraphSpec::QMode::ShiftedCertified: {
            for (int i = 0; i < n; ++i) b.q[i] = unif(rng) - 0.5;
            auto draft = std::make_shared<ExplicitGraph>(b, "random-draft");
            auto region = FiniteRegion::over(draft, draft->vertex_list(), 0);
            double bottom = dense_spectrum(region).values(0);
            if (bottom < spec.certify_margin) {
                double c = spec.certify_margin - bottom;
                for (int i = 0; i < n; ++i)
                    b.q[i] += c * region->measure(region->index_of(i));
            }
            break;
        }
    }
    return std::make_shared<ExplicitGraph>(std::move(b), "random");
}

} // namespace oracle
} // namespace sgl
