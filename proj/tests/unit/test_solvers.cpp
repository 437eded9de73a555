#include "gfad/error.hpp"
#include "gfad/rng.hpp"
#include "gfad/solvers.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace gfad;

namespace {

Eigen::MatrixXcd random_complex(int r, int c, std::uint64_t seed) {
    auto rng = make_engine(seed, "solver_test");
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXcd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = {n(rng), n(rng)};
    return m;
}

struct Instance {
    Eigen::MatrixXcd S, X, Y;
};

Instance sparse_instance(int L, int K, int N, int active, double noise, std::uint64_t seed) {
    Instance in;
    in.S = random_complex(L, K, seed);
    in.X = Eigen::MatrixXcd::Zero(K, N);
    in.X.topRows(active) = random_complex(active, N, seed + 1);
    in.Y = in.S * in.X + noise * random_complex(L, N, seed + 2);
    return in;
}

SolverConfig config(Algorithm a, int iters, double lambda) {
    auto c = SolverConfig::defaults(a);
    c.max_iters = iters;
    c.lambda = lambda;
    return c;
}

} // namespace

TEST_CASE("spectral step against closed form and a dense eigensolver") {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    CHECK(spectral_step(d) == doctest::Approx(9.0).epsilon(1e-8));

    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_complex(8, 8, 3));
    const Eigen::MatrixXcd Q = qr.householderQ();
    CHECK(spectral_step(std::sqrt(8.0) * Q) == doctest::Approx(8.0).epsilon(1e-8));

    for (std::uint64_t seed = 10; seed < 20; ++seed) {
        const auto S = random_complex(12, 30, seed);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S.adjoint() * S);
        const double expect = es.eigenvalues().maxCoeff();
        CHECK(std::abs(spectral_step(S) - expect) / expect < 1e-6);
    }
}

TEST_CASE("ISTA on the scalar example") {
    Eigen::MatrixXcd S(1, 1), Y(1, 1);
    S(0, 0) = 1.0;
    Y(0, 0) = 2.0;
    const auto r = ista(Y, S, config(Algorithm::ista, 1, 0.5));
    CHECK(std::abs(r.X(0, 0) - std::complex<double>(1.5, 0.0)) < 1e-12);
    CHECK(r.objective.size() == 2);
    CHECK(r.objective[0] == doctest::Approx(2.0));
}

TEST_CASE("property: group soft threshold keeps direction and shrinks norm exactly") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto U = random_complex(6, 4, seed);
        const double thr = 0.5 * (seed % 7);
        const auto V = group_soft_threshold(U, thr);
        for (int k = 0; k < 6; ++k) {
            const double nu = U.row(k).norm(), nv = V.row(k).norm();
            CHECK(std::abs(nv - std::max(0.0, nu - thr)) < 1e-12);
            if (nv > 0.0) {
                const auto inner = (U.row(k).conjugate().cwiseProduct(V.row(k))).sum();
                CHECK(std::abs(std::abs(inner) - nu * nv) < 1e-10 * nu * nv);
                CHECK(inner.real() > 0.0);
            }
        }
    }
}

TEST_CASE("property: ISTA objective never increases") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto in = sparse_instance(10, 20, 2, 3, 0.1, seed * 11);
        const auto r = ista(in.Y, in.S, config(Algorithm::ista, 60, -1.0));
        REQUIRE(r.objective.size() == 61);
        for (std::size_t t = 1; t < r.objective.size(); ++t)
            CHECK(r.objective[t] <= r.objective[t - 1] * (1.0 + 1e-10));
    }
}

TEST_CASE("FISTA first iterate equals ISTA first iterate") {
    const auto in = sparse_instance(8, 16, 2, 2, 0.05, 5);
    const auto a = ista(in.Y, in.S, config(Algorithm::ista, 1, 0.3));
    const auto b = fista(in.Y, in.S, config(Algorithm::fista, 1, 0.3));
    CHECK((a.X - b.X).norm() < 1e-12);
}

TEST_CASE("FISTA reaches an objective no worse than ISTA at equal iterations") {
    int not_worse = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto in = sparse_instance(10, 24, 2, 3, 0.05, 100 + seed);
        const auto a = ista(in.Y, in.S, config(Algorithm::ista, 100, -1.0));
        const auto b = fista(in.Y, in.S, config(Algorithm::fista, 100, -1.0));
        not_worse += b.objective.back() <= a.objective.back() + 1e-9;
    }
    CHECK(not_worse == 50);
}

TEST_CASE("zero penalty on orthogonal pilots recovers X exactly") {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_complex(8, 8, 7));
    const Eigen::MatrixXcd S = std::sqrt(8.0) * Eigen::MatrixXcd(qr.householderQ());
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(8, 2);
    X.row(1) = random_complex(1, 2, 1);
    X.row(6) = random_complex(1, 2, 2);
    const Eigen::MatrixXcd Y = S * X;
    for (auto a : {Algorithm::ista, Algorithm::fista}) {
        const auto r = solve(Y, S, config(a, 50, 0.0));
        CHECK((r.X - X).norm() / X.norm() < 1e-6);
    }
}

TEST_CASE("AMP separates active from inactive devices without noise") {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_complex(8, 8, 17));
    const Eigen::MatrixXcd S = std::sqrt(8.0) * Eigen::MatrixXcd(qr.householderQ());
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(8, 4);
    X.row(0) = random_complex(1, 4, 3);
    X.row(5) = random_complex(1, 4, 4);
    const auto r = amp(S * X, S, config(Algorithm::amp, 18, -1.0));
    double min_on = std::min(r.scores(0), r.scores(5)), max_off = 0.0;
    for (int k = 0; k < 8; ++k)
        if (k != 0 && k != 5) max_off = std::max(max_off, r.scores(k));
    CHECK(min_on > max_off);

    const auto zero = amp(Eigen::MatrixXcd::Zero(8, 4), S, config(Algorithm::amp, 18, -1.0));
    CHECK(zero.scores.isZero());
}

TEST_CASE("AMP at operating scale stays finite") {
    const auto in = sparse_instance(40, 100, 2, 10, 0.1, 77);
    const auto r = amp(in.Y, in.S, config(Algorithm::amp, 18, -1.0));
    CHECK(r.scores.allFinite());
    CHECK(r.X.allFinite());
}

TEST_CASE("property: solvers are equivariant to device permutations") {
    const auto in = sparse_instance(10, 12, 2, 3, 0.05, 300);
    Eigen::PermutationMatrix<Eigen::Dynamic> P(12);
    P.setIdentity();
    auto rng = make_engine(1, "perm");
    std::shuffle(P.indices().data(), P.indices().data() + 12, rng);
    const Eigen::MatrixXcd Sp = in.S * P;
    for (auto a : {Algorithm::ista, Algorithm::fista, Algorithm::amp}) {
        const auto base = solve(in.Y, in.S, config(a, default_iterations(a), -1.0));
        const auto perm = solve(in.Y, Sp, config(a, default_iterations(a), -1.0));
        const Eigen::VectorXd expect = P.transpose() * base.scores;
        CHECK((perm.scores - expect).norm() <= 1e-9 * (1.0 + base.scores.norm()));
    }
}

TEST_CASE("default penalty and validation") {
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(2, 2), Y(2, 1);
    Y << 3.0, 4.0;
    CHECK(default_lambda(Y, S) == doctest::Approx(0.4));
    auto c = SolverConfig::defaults(Algorithm::fista);
    CHECK(c.max_iters == 100);
    c.max_iters = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK(parse_algorithm("amp") == Algorithm::amp);
    CHECK_THROWS_AS(parse_algorithm("omp"), ConfigError);
    CHECK_THROWS_AS(ista(Y, Eigen::MatrixXcd::Identity(3, 3), SolverConfig::defaults(Algorithm::ista)), MismatchError);
}

TEST_CASE("baseline aggregation against a hand-computed combination") {
    ScenarioConfig sc;
    sc.geometry.num_aps = 3;
    sc.geometry.num_devices = 4;
    sc.pilot_len = 6;
    sc.num_antennas = 2;
    const auto inst = make_scenario(sc, 5);
    const auto slots = generate_slots(sc, inst, 5, Partition::eval, 0, 1);
    const auto clusters = select_clusters(inst.lsf, 2);
    const auto cfg = config(Algorithm::ista, 40, -1.0);
    const auto scores = baseline_scores(slots[0], inst.codebook, clusters, inst.lsf, cfg);
    for (int k = 0; k < 4; ++k) {
        const auto& c = clusters.members[static_cast<std::size_t>(k)];
        const double b0 = inst.lsf.beta_linear(c[0], k), b1 = inst.lsf.beta_linear(c[1], k);
        const double e0 = ista(slots[0].block_d(c[0]), inst.codebook.S, cfg).scores(k);
        const double e1 = ista(slots[0].block_d(c[1]), inst.codebook.S, cfg).scores(k);
        CHECK(scores(k) == doctest::Approx((b0 * e0 + b1 * e1) / (b0 + b1)).epsilon(1e-12));
    }
    const auto dom = baseline_scores(slots[0], inst.codebook, clusters, inst.lsf, cfg, BaselineAggregation::dominant_ap);
    for (int k = 0; k < 4; ++k)
        CHECK(dom(k) == doctest::Approx(ista(slots[0].block_d(clusters.members[static_cast<std::size_t>(k)][0]),
                                             inst.codebook.S, cfg).scores(k)).epsilon(1e-12));
}

TEST_CASE("single AP baseline equals the row energies of one solve") {
    ScenarioConfig sc;
    sc.geometry.topology_mode = TopologyMode::cellular;
    sc.geometry.num_devices = 5;
    sc.pilot_len = 6;
    const auto inst = make_scenario(sc, 8);
    const auto slots = generate_slots(sc, inst, 8, Partition::eval, 0, 1);
    const auto clusters = select_clusters(inst.lsf, 1);
    const auto cfg = config(Algorithm::fista, 30, -1.0);
    const auto scores = baseline_scores(slots[0], inst.codebook, clusters, inst.lsf, cfg);
    const auto r = fista(slots[0].block_d(0), inst.codebook.S, cfg);
    CHECK((scores - r.X.rowwise().squaredNorm()).norm() < 1e-12);
}
