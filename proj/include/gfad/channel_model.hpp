#pragma once

// Network geometry and 3GPP UMa-LOS large/small-scale fading.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

namespace gfad {

inline constexpr double kSpeedOfLight = 3.0e8;

enum class TopologyMode : std::uint32_t { cell_free = 0, cellular = 1 };
enum class FadingMode : std::uint32_t { per_slot = 0, static_block = 1 };

struct GeometryConfig {
    double area_side_m = 1000.0;
    double edge_margin_m = 50.0;
    double min_device_ap_dist_m = 10.0;
    double min_ap_spacing_m = 15.0;
    double ap_height_m = 12.0;
    double device_height_m = 1.5;
    double carrier_freq_hz = 900e6;
    int num_aps = 20;
    int num_devices = 100;
    TopologyMode topology_mode = TopologyMode::cell_free;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
    /// Number of APs actually deployed (cellular forces one).
    int effective_num_aps() const { return topology_mode == TopologyMode::cellular ? 1 : num_aps; }
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct NetworkTopology {
    std::vector<Point2> ap_positions;
    std::vector<Point2> device_positions;
    GeometryConfig geometry;

    int num_aps() const { return static_cast<int>(ap_positions.size()); }
    int num_devices() const { return static_cast<int>(device_positions.size()); }
    /// Horizontal AP-device distances, M x K.
    Eigen::MatrixXd distances() const;
};

/// Large-scale fading per (AP, device). beta_db holds attenuation (positive dB).
struct LargeScaleMap {
    Eigen::MatrixXd beta_db;
    Eigen::MatrixXd beta_linear;
    Eigen::MatrixXd shadowing_db;
    double shadow_sigma_db = 1.0;

    int num_aps() const { return static_cast<int>(beta_db.rows()); }
    int num_devices() const { return static_cast<int>(beta_db.cols()); }

    /// Builds a map from attenuations, deriving the linear view.
    static LargeScaleMap from_db(Eigen::MatrixXd beta_db, Eigen::MatrixXd shadowing_db,
                                 double shadow_sigma_db);
};

/// One realization of small-scale fading: per AP a K x N matrix (G_m layout).
using FadingTensor = std::vector<Eigen::MatrixXcd>;

/// Rayleigh fading source. In per_slot mode every slot gets an independent
/// tensor; in static_block mode slots [b*B, (b+1)*B) share one tensor.
class SmallScaleBlock {
public:
    SmallScaleBlock(int num_aps, int num_antennas, int num_devices, FadingMode mode,
                    std::uint64_t seed, int block_len = 10);

    FadingTensor at_slot(std::uint64_t slot) const;

    int num_aps() const { return num_aps_; }
    int num_antennas() const { return num_antennas_; }
    int num_devices() const { return num_devices_; }
    FadingMode mode() const { return mode_; }
    int block_len() const { return block_len_; }

private:
    int num_aps_;
    int num_antennas_;
    int num_devices_;
    FadingMode mode_;
    std::uint64_t seed_;
    int block_len_;
};

/// Rejection-sampled AP/device placement. Cellular mode puts the single AP
/// at the area center. Throws PlacementError when constraints cannot be met.
NetworkTopology place_network(const GeometryConfig& cfg, std::uint64_t seed);

/// d'_BP = 4 (h_BS - 1)(h_UT - 1) f_c / c, in meters.
double breakpoint_distance(const GeometryConfig& cfg);

/// UMa-LOS path loss in dB. Distances below 10 m use the 10 m value;
/// distances above 5 km throw DomainError.
double path_loss_db(double d_2d, const GeometryConfig& cfg);

LargeScaleMap large_scale_map(const NetworkTopology& topology, double shadow_sigma_db,
                              std::uint64_t seed);

SmallScaleBlock draw_small_scale(int num_aps, int num_antennas, int num_devices, FadingMode mode,
                                 std::uint64_t seed, int block_len = 10);

/// g[m](k, n) = sqrt(beta_linear(m, k)) * h[m](k, n).
FadingTensor channel_gains(const LargeScaleMap& lsf, const FadingTensor& h);

} // namespace gfad
