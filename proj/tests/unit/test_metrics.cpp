#include "gfad/error.hpp"
#include "gfad/metrics.hpp"
#include "gfad/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace gfad;

namespace {

ScorePool random_pool(std::size_t n, std::uint64_t seed, int levels = 0) {
    auto rng = make_engine(seed, "metrics_test");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::bernoulli_distribution b(0.3);
    ScorePool p;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t t = b(rng);
        double s = 0.7 * u(rng) + 0.3 * t;
        if (levels > 0) s = std::floor(s * levels) / levels;
        p.scores.push_back(s);
        p.truth.push_back(t);
    }
    p.truth[0] = 1;
    p.truth[1] = 0;
    return p;
}

} // namespace

TEST_CASE("confusion counts") {
    const std::vector<std::uint8_t> truth{1, 0, 1, 1, 0, 0};
    auto same = confusion(truth, truth);
    CHECK(same.tp == 3);
    CHECK(same.tn == 3);
    CHECK(same.accuracy() == 1.0);
    CHECK(*same.p_md() == 0.0);
    std::vector<std::uint8_t> neg(truth.size());
    std::transform(truth.begin(), truth.end(), neg.begin(), [](auto v) { return static_cast<std::uint8_t>(!v); });
    const auto flip = confusion(neg, truth);
    CHECK(flip.fp == 3);
    CHECK(flip.fn == 3);
    CHECK(*flip.p_fa() == 1.0);
    CHECK(*flip.p_md() == 1.0);
    const std::vector<std::uint8_t> zeros(3, 0);
    CHECK_FALSE(confusion(zeros, zeros).p_d().has_value());
    CHECK_THROWS_AS(confusion(zeros, truth), MismatchError);

    auto rng = make_engine(4, "confusion");
    std::bernoulli_distribution b(0.5);
    std::vector<std::uint8_t> d(500), t(500);
    for (std::size_t i = 0; i < 500; ++i) {
        d[i] = b(rng);
        t[i] = b(rng);
    }
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < 500; ++i) {
        if (d[i] && t[i]) ++tp;
        else if (d[i]) ++fp;
        else if (t[i]) ++fn;
        else ++tn;
    }
    const auto c = confusion(d, t);
    CHECK(c.tp == tp);
    CHECK(c.fp == fp);
    CHECK(c.tn == tn);
    CHECK(c.fn == fn);
    CHECK(c.accuracy() == doctest::Approx(double(tp + tn) / 500.0));
    CHECK(*c.p_md() + *c.p_d() == doctest::Approx(1.0));
}

TEST_CASE("property: ROC points are monotone and span the corners") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto pool = random_pool(400, seed, seed % 3 == 0 ? 10 : 0);
        const auto roc = roc_sweep(pool, 101);
        CHECK(roc.points.front().p_fa == 1.0);
        CHECK(roc.points.front().p_d == 1.0);
        CHECK(roc.points.back().p_fa == 0.0);
        CHECK(roc.points.back().p_d == 0.0);
        for (std::size_t i = 1; i < roc.points.size(); ++i) {
            CHECK(roc.points[i].tau > roc.points[i - 1].tau);
            CHECK(roc.points[i].p_fa <= roc.points[i - 1].p_fa);
            CHECK(roc.points[i].p_d <= roc.points[i - 1].p_d);
        }
        CHECK(roc.auc >= 0.0);
        CHECK(roc.auc <= 1.0);
    }
}

TEST_CASE("AUC of separable and uninformative scores") {
    ScorePool sep;
    sep.scores = {0.1, 0.2, 0.3, 0.7, 0.8, 0.9};
    sep.truth = {0, 0, 0, 1, 1, 1};
    CHECK(roc_sweep(sep, 1001).auc == doctest::Approx(1.0));
    CHECK(roc_exact(sep).auc == 1.0);
    ScorePool flat;
    flat.scores.assign(10, 0.4);
    flat.truth = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    CHECK(roc_sweep(flat, 1001).auc == doctest::Approx(0.5));
    CHECK(roc_exact(flat).auc == doctest::Approx(0.5));
    ScorePool one_class;
    one_class.scores = {0.1, 0.2};
    one_class.truth = {1, 1};
    CHECK_THROWS_AS(roc_sweep(one_class, 11), DomainError);
}

TEST_CASE("exact ROC equals the pairwise Mann-Whitney statistic") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto pool = random_pool(300, 50 + seed, seed % 2 == 0 ? 8 : 0);
        double wins = 0.0, pos = 0.0, neg = 0.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (pool.truth[i]) pos += 1.0;
            else neg += 1.0;
            if (!pool.truth[i]) continue;
            for (std::size_t j = 0; j < pool.size(); ++j) {
                if (pool.truth[j]) continue;
                wins += pool.scores[i] > pool.scores[j] ? 1.0 : pool.scores[i] == pool.scores[j] ? 0.5 : 0.0;
            }
        }
        CHECK(roc_exact(pool).auc == doctest::Approx(wins / (pos * neg)).epsilon(1e-12));
    }
}

TEST_CASE("exact ROC points match brute-force thresholding at each distinct score") {
    const auto pool = random_pool(200, 9, 12);
    const auto roc = roc_exact(pool);
    const std::set<double> distinct(pool.scores.begin(), pool.scores.end());
    for (double tau : distinct) {
        double tp = 0, fp = 0, pos = 0, neg = 0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const bool d = pool.scores[i] >= tau;
            if (pool.truth[i]) {
                pos += 1;
                tp += d;
            } else {
                neg += 1;
                fp += d;
            }
        }
        const auto it = std::find_if(roc.points.begin(), roc.points.end(), [&](const RocPoint& p) { return p.tau == tau; });
        REQUIRE(it != roc.points.end());
        CHECK(it->p_d == doctest::Approx(tp / pos));
        CHECK(it->p_fa == doctest::Approx(fp / neg));
    }
}

TEST_CASE("best accuracy over the swept thresholds") {
    ScorePool p;
    p.scores = {0.1, 0.4, 0.35, 0.8};
    p.truth = {0, 0, 1, 1};
    const auto roc = roc_exact(p);
    CHECK(roc.best_accuracy() == doctest::Approx(0.75));
}

TEST_CASE("trapezoid AUC") {
    std::vector<RocPoint> pts{{0, 0, 0}, {0, 0.5, 1.0}, {0, 1, 1}, {0, 0.5, 0.5}};
    CHECK(trapezoid_auc(pts) == doctest::Approx(0.625));
}

TEST_CASE("rank normalization averages ties") {
    const std::vector<double> v{5.0, 1.0, 3.0, 3.0, 9.0};
    const auto r = rank_normalize(v);
    CHECK(r[1] == 0.0);
    CHECK(r[4] == 1.0);
    CHECK(r[2] == doctest::Approx(0.375));
    CHECK(r[3] == doctest::Approx(0.375));
    CHECK(r[0] == doctest::Approx(0.75));
}

TEST_CASE("SNR CDF: sorted values, order statistic and single-device step") {
    Eigen::MatrixXd db(2, 20);
    for (int k = 0; k < 20; ++k) {
        db(0, k) = 100.0 + k;
        db(1, k) = 130.0;
    }
    const auto lsf = LargeScaleMap::from_db(db, Eigen::MatrixXd::Zero(2, 20), 0.0);
    const std::vector<double> tx(20, 1.0);
    const auto cdf = snr_cdf(lsf, tx, 1e-12, 0.95);
    CHECK(std::is_sorted(cdf.snr_db.begin(), cdf.snr_db.end()));
    CHECK(cdf.snr_db.front() == doctest::Approx(120.0 - 119.0));
    CHECK(cdf.cdf.back() == doctest::Approx(1.0));
    CHECK(cdf.target_db == doctest::Approx(cdf.snr_db.front()));
    CHECK(cdf.at(cdf.snr_db[9]) == doctest::Approx(0.5));

    Eigen::MatrixXd one(1, 1);
    one << 80.0;
    const auto step = snr_cdf(LargeScaleMap::from_db(one, Eigen::MatrixXd::Zero(1, 1), 0.0), {1.0}, 1e-10, 0.95);
    CHECK(step.at(step.snr_db[0] - 1e-9) == 0.0);
    CHECK(step.at(step.snr_db[0]) == 1.0);
}

TEST_CASE("cell-free SNR dominates the single-cell SNR distribution") {
    ScenarioConfig cf;
    cf.geometry.num_devices = 400;
    ScenarioConfig cell = cf;
    cell.geometry.topology_mode = TopologyMode::cellular;
    const auto a = make_scenario(cf, 3), b = make_scenario(cell, 3);
    const auto ca = snr_cdf(a.lsf, a.tx_power_w, cf.noise_var_w());
    const auto cb = snr_cdf(b.lsf, b.tx_power_w, cell.noise_var_w());
    CHECK(ca.target_db > cb.target_db);
    CHECK(ca.snr_db[200] > cb.snr_db[200]);
}
