#include "gfad/channel_model.hpp"
#include "gfad/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace gfad;

TEST_CASE("breakpoint distance at the reference heights and carrier") {
    GeometryConfig g;
    CHECK(breakpoint_distance(g) == doctest::Approx(66.0).epsilon(1e-12));
    GeometryConfig g2 = g;
    g2.carrier_freq_hz *= 2.0;
    CHECK(breakpoint_distance(g2) == doctest::Approx(2.0 * breakpoint_distance(g)));
    g2 = g;
    g2.device_height_m = 1.0 + 1e-12;
    CHECK(breakpoint_distance(g2) < 1e-9);
}

TEST_CASE("path loss matches hand evaluation on both sides of the breakpoint") {
    GeometryConfig g;
    const double d3 = std::hypot(50.0, 10.5);
    const double pl1 = 28.0 + 22.0 * std::log10(d3) + 20.0 * std::log10(0.9);
    CHECK(path_loss_db(50.0, g) == doctest::Approx(pl1).epsilon(1e-12));
    CHECK(path_loss_db(50.0, g) == doctest::Approx(64.67).epsilon(1e-4));
    CHECK(path_loss_db(100.0, g) == doctest::Approx(74.33).epsilon(1e-4));
    CHECK(path_loss_db(200.0, g) > path_loss_db(100.0, g));
}

TEST_CASE("path loss domain: clamp below 10 m, error above 5 km") {
    GeometryConfig g;
    CHECK(path_loss_db(1.0, g) == path_loss_db(10.0, g));
    CHECK_NOTHROW(path_loss_db(5000.0, g));
    CHECK_THROWS_AS(path_loss_db(5000.1, g), DomainError);
}

TEST_CASE("property: path loss is non-decreasing and nearly continuous at the breakpoint") {
    GeometryConfig g;
    double prev = path_loss_db(0.5, g);
    for (double d = 0.5; d <= 5000.0; d += 0.5) {
        const double pl = path_loss_db(d, g);
        REQUIRE(pl >= prev);
        prev = pl;
    }
    const double bp = breakpoint_distance(g);
    CHECK(std::abs(path_loss_db(bp, g) - path_loss_db(std::nextafter(bp, 1e9), g)) <= 0.5);
}

TEST_CASE("cell-free placement satisfies every geometric constraint") {
    GeometryConfig g;
    const auto topo = place_network(g, 42);
    REQUIRE(topo.num_aps() == 20);
    REQUIRE(topo.num_devices() == 100);
    for (int i = 0; i < topo.num_aps(); ++i) {
        const auto& a = topo.ap_positions[static_cast<std::size_t>(i)];
        CHECK(a.x >= g.edge_margin_m);
        CHECK(a.y >= g.edge_margin_m);
        CHECK(a.x <= g.area_side_m - g.edge_margin_m);
        CHECK(a.y <= g.area_side_m - g.edge_margin_m);
        for (int j = i + 1; j < topo.num_aps(); ++j)
            CHECK(distance(a, topo.ap_positions[static_cast<std::size_t>(j)]) >= g.min_ap_spacing_m);
    }
    for (const auto& d : topo.device_positions) {
        CHECK(d.x >= 0.0);
        CHECK(d.y >= 0.0);
        CHECK(d.x <= g.area_side_m);
        CHECK(d.y <= g.area_side_m);
        for (const auto& a : topo.ap_positions) CHECK(distance(a, d) >= g.min_device_ap_dist_m);
    }
}

TEST_CASE("cellular placement puts the AP at the center") {
    GeometryConfig g;
    g.topology_mode = TopologyMode::cellular;
    const auto topo = place_network(g, 3);
    REQUIRE(topo.num_aps() == 1);
    CHECK(topo.ap_positions[0] == Point2{500.0, 500.0});
}

TEST_CASE("property: placement is a pure function of (config, seed)") {
    GeometryConfig g;
    const auto a = place_network(g, 9);
    const auto b = place_network(g, 9);
    CHECK(a.ap_positions == b.ap_positions);
    CHECK(a.device_positions == b.device_positions);
    CHECK_FALSE(place_network(g, 10).ap_positions == a.ap_positions);
}

TEST_CASE("infeasible placement fails loudly") {
    GeometryConfig g;
    g.area_side_m = 120.0;
    g.edge_margin_m = 50.0;
    g.min_ap_spacing_m = 15.0;
    g.num_aps = 20;
    CHECK_THROWS_AS(place_network(g, 1), PlacementError);
}

TEST_CASE("geometry validation") {
    GeometryConfig g;
    g.area_side_m = 100.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = GeometryConfig{};
    g.num_aps = 0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("large-scale map: zero shadowing is pure path loss and the linear view matches") {
    GeometryConfig g;
    const auto topo = place_network(g, 5);
    const auto lsf = large_scale_map(topo, 0.0, 11);
    const Eigen::MatrixXd d = topo.distances();
    for (int m = 0; m < lsf.num_aps(); ++m)
        for (int k = 0; k < lsf.num_devices(); ++k) {
            CHECK(lsf.beta_db(m, k) == doctest::Approx(path_loss_db(d(m, k), g)).epsilon(1e-14));
            CHECK(lsf.beta_linear(m, k) == doctest::Approx(std::pow(10.0, -lsf.beta_db(m, k) / 10.0)).epsilon(1e-14));
        }
}

TEST_CASE("property: beta is finite and within (0, 1) at the reference configuration") {
    GeometryConfig g;
    const auto lsf = large_scale_map(place_network(g, 6), 1.0, 7);
    CHECK(lsf.beta_db.allFinite());
    CHECK((lsf.beta_linear.array() > 0.0).all());
    CHECK((lsf.beta_linear.array() < 1.0).all());
}

TEST_CASE("small-scale fading modes") {
    const auto per = draw_small_scale(3, 2, 4, FadingMode::per_slot, 1);
    const auto blk = draw_small_scale(3, 2, 4, FadingMode::static_block, 1, 10);
    CHECK(blk.at_slot(3)[0] == blk.at_slot(0)[0]);
    CHECK(blk.at_slot(9)[2] == blk.at_slot(0)[2]);
    CHECK_FALSE(blk.at_slot(10)[0] == blk.at_slot(0)[0]);
    CHECK_FALSE(per.at_slot(1)[0] == per.at_slot(0)[0]);
    CHECK(per.at_slot(1)[0] == per.at_slot(1)[0]);
}

TEST_CASE("channel gains scale fading by the square root of beta") {
    const auto h = draw_small_scale(2, 3, 4, FadingMode::per_slot, 2).at_slot(0);
    LargeScaleMap ones = LargeScaleMap::from_db(Eigen::MatrixXd::Zero(2, 4), Eigen::MatrixXd::Zero(2, 4), 0.0);
    const auto g = channel_gains(ones, h);
    for (int m = 0; m < 2; ++m) CHECK(g[static_cast<std::size_t>(m)].isApprox(h[static_cast<std::size_t>(m)], 1e-15));

    Eigen::MatrixXd quarter = Eigen::MatrixXd::Constant(2, 4, 10.0 * std::log10(4.0));
    const auto g2 = channel_gains(LargeScaleMap::from_db(quarter, Eigen::MatrixXd::Zero(2, 4), 0.0), h);
    CHECK((g2[1] - 0.5 * h[1]).norm() < 1e-12);

    Eigen::MatrixXd half = Eigen::MatrixXd::Constant(2, 4, 10.0 * std::log10(2.0));
    const auto g3 = channel_gains(LargeScaleMap::from_db(half, Eigen::MatrixXd::Zero(2, 4), 0.0), h);
    const auto g4 = channel_gains(LargeScaleMap::from_db(quarter, Eigen::MatrixXd::Zero(2, 4), 0.0), h);
    CHECK(g3[0].squaredNorm() == doctest::Approx(2.0 * g4[0].squaredNorm()));
}
