#include "gfad/channel_model.hpp"

#include "gfad/error.hpp"
#include "gfad/rng.hpp"

#include <cmath>
#include <string>

namespace gfad {

namespace {

constexpr long kMaxPlacementRetries = 1'000'000;
constexpr double kMinModelDistance = 10.0;
constexpr double kMaxModelDistance = 5000.0;

} // namespace

void GeometryConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError("geometry: " + msg);
    };
    require(area_side_m > 0, "area_side_m must be > 0");
    require(edge_margin_m > 0, "edge_margin_m must be > 0");
    require(min_device_ap_dist_m > 0, "min_device_ap_dist_m must be > 0");
    require(min_ap_spacing_m > 0, "min_ap_spacing_m must be > 0");
    require(ap_height_m > 1.0 && device_height_m > 1.0, "antenna heights must exceed 1 m");
    require(carrier_freq_hz > 0, "carrier_freq_hz must be > 0");
    require(area_side_m > 2.0 * edge_margin_m, "area_side_m must exceed twice the edge margin");
    require(num_aps >= 1, "num_aps must be >= 1");
    require(num_devices >= 1, "num_devices must be >= 1");
}

Eigen::MatrixXd NetworkTopology::distances() const {
    Eigen::MatrixXd d(num_aps(), num_devices());
    for (int m = 0; m < num_aps(); ++m)
        for (int k = 0; k < num_devices(); ++k)
            d(m, k) = distance(ap_positions[m], device_positions[k]);
    return d;
}

LargeScaleMap LargeScaleMap::from_db(Eigen::MatrixXd beta_db, Eigen::MatrixXd shadowing_db,
                                     double shadow_sigma_db) {
    LargeScaleMap map;
    map.beta_linear = beta_db.unaryExpr([](double db) { return std::pow(10.0, -db / 10.0); });
    map.beta_db = std::move(beta_db);
    map.shadowing_db = std::move(shadowing_db);
    map.shadow_sigma_db = shadow_sigma_db;
    return map;
}

SmallScaleBlock::SmallScaleBlock(int num_aps, int num_antennas, int num_devices, FadingMode mode,
                                 std::uint64_t seed, int block_len)
    : num_aps_(num_aps), num_antennas_(num_antennas), num_devices_(num_devices), mode_(mode),
      seed_(seed), block_len_(block_len) {
    if (num_aps < 1 || num_antennas < 1 || num_devices < 1)
        throw ConfigError("small-scale fading: dimensions must be >= 1");
    if (block_len < 1) throw ConfigError("small-scale fading: block length must be >= 1");
}

FadingTensor SmallScaleBlock::at_slot(std::uint64_t slot) const {
    const std::uint64_t block =
        mode_ == FadingMode::per_slot ? slot : slot / static_cast<std::uint64_t>(block_len_);
    auto rng = make_engine(seed_, "ssf", block);
    FadingTensor h(num_aps_, Eigen::MatrixXcd(num_devices_, num_antennas_));
    for (auto& hm : h)
        for (int k = 0; k < num_devices_; ++k)
            for (int n = 0; n < num_antennas_; ++n) hm(k, n) = complex_normal(rng);
    return h;
}

NetworkTopology place_network(const GeometryConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    NetworkTopology topo;
    topo.geometry = cfg;
    const double side = cfg.area_side_m;

    if (cfg.topology_mode == TopologyMode::cellular) {
        topo.ap_positions.push_back({side / 2.0, side / 2.0});
    } else {
        auto rng = make_engine(seed, "ap_placement");
        std::uniform_real_distribution<double> coord(cfg.edge_margin_m, side - cfg.edge_margin_m);
        for (int m = 0; m < cfg.num_aps; ++m) {
            long tries = 0;
            for (;;) {
                if (++tries > kMaxPlacementRetries)
                    throw PlacementError("cannot place AP " + std::to_string(m) + " with spacing " +
                                         std::to_string(cfg.min_ap_spacing_m) + " m");
                const Point2 p{coord(rng), coord(rng)};
                bool ok = true;
                for (const auto& q : topo.ap_positions)
                    if (distance(p, q) < cfg.min_ap_spacing_m) {
                        ok = false;
                        break;
                    }
                if (ok) {
                    topo.ap_positions.push_back(p);
                    break;
                }
            }
        }
    }

    auto rng = make_engine(seed, "device_placement");
    std::uniform_real_distribution<double> coord(0.0, side);
    for (int k = 0; k < cfg.num_devices; ++k) {
        long tries = 0;
        for (;;) {
            if (++tries > kMaxPlacementRetries)
                throw PlacementError("cannot place device " + std::to_string(k) +
                                     " at least " + std::to_string(cfg.min_device_ap_dist_m) +
                                     " m from every AP");
            const Point2 p{coord(rng), coord(rng)};
            bool ok = true;
            for (const auto& q : topo.ap_positions)
                if (distance(p, q) < cfg.min_device_ap_dist_m) {
                    ok = false;
                    break;
                }
            if (ok) {
                topo.device_positions.push_back(p);
                break;
            }
        }
    }
    return topo;
}

double breakpoint_distance(const GeometryConfig& cfg) {
    return 4.0 * (cfg.ap_height_m - 1.0) * (cfg.device_height_m - 1.0) * cfg.carrier_freq_hz /
           kSpeedOfLight;
}

double path_loss_db(double d_2d, const GeometryConfig& cfg) {
    if (!(d_2d > 0.0)) throw DomainError("path loss: distance must be positive");
    if (d_2d > kMaxModelDistance) throw DomainError("path loss: distance beyond 5 km");
    const double d = std::max(d_2d, kMinModelDistance);
    const double dh = cfg.ap_height_m - cfg.device_height_m;
    const double d_3d = std::sqrt(d * d + dh * dh);
    const double d_bp = breakpoint_distance(cfg);
    const double fc_ghz = cfg.carrier_freq_hz / 1e9;
    if (d <= d_bp) return 28.0 + 22.0 * std::log10(d_3d) + 20.0 * std::log10(fc_ghz);
    return 28.0 + 40.0 * std::log10(d_3d) + 20.0 * std::log10(fc_ghz) -
           9.0 * std::log10(d_bp * d_bp + dh * dh);
}

LargeScaleMap large_scale_map(const NetworkTopology& topology, double shadow_sigma_db,
                              std::uint64_t seed) {
    if (shadow_sigma_db < 0) throw ConfigError("shadowing sigma must be >= 0");
    const int M = topology.num_aps();
    const int K = topology.num_devices();
    auto rng = make_engine(seed, "shadowing");
    std::normal_distribution<double> shadow(0.0, 1.0);
    Eigen::MatrixXd beta_db(M, K);
    Eigen::MatrixXd shadowing(M, K);
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
            const double d = distance(topology.ap_positions[m], topology.device_positions[k]);
            shadowing(m, k) = shadow_sigma_db * shadow(rng);
            beta_db(m, k) = path_loss_db(d, topology.geometry) + shadowing(m, k);
        }
    }
    return LargeScaleMap::from_db(std::move(beta_db), std::move(shadowing), shadow_sigma_db);
}

SmallScaleBlock draw_small_scale(int num_aps, int num_antennas, int num_devices, FadingMode mode,
                                 std::uint64_t seed, int block_len) {
    return SmallScaleBlock(num_aps, num_antennas, num_devices, mode, seed, block_len);
}

FadingTensor channel_gains(const LargeScaleMap& lsf, const FadingTensor& h) {
    if (static_cast<int>(h.size()) != lsf.num_aps())
        throw MismatchError("channel gains: AP count mismatch");
    FadingTensor g(h.size());
    for (std::size_t m = 0; m < h.size(); ++m) {
        if (h[m].rows() != lsf.num_devices())
            throw MismatchError("channel gains: device count mismatch");
        const Eigen::VectorXd amp = lsf.beta_linear.row(static_cast<Eigen::Index>(m)).transpose().cwiseSqrt();
        g[m] = amp.asDiagonal() * h[m];
    }
    return g;
}

} // namespace gfad
