#pragma once

// Pilot codebooks, device activity, received-signal synthesis and datasets.

#include "gfad/channel_model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace gfad {

using RowMajorXcf = Eigen::Matrix<std::complex<float>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ScenarioConfig {
    GeometryConfig geometry;
    int num_antennas = 2;
    int pilot_len = 40;
    double sparsity = 0.1;
    double tx_power_w = 0.2;
    double noise_power_dbm = -109.0;
    /// Noiseless synthesis, used by oracle scenarios.
    bool noiseless = false;
    double shadow_sigma_db = 1.0;
    FadingMode fading_mode = FadingMode::per_slot;
    int fading_block_len = 10;
    bool orthonormal_pilots = false;
    /// Scale each device's power so its dominant-AP received power meets the
    /// coverage target (capped at tx_power_w).
    bool power_control = false;
    double coverage_fraction = 0.95;
    /// Processing gain applied on top of the per-symbol SNR, in dB.
    double snr_gain_db = 0.0;

    void validate() const;
    double noise_var_w() const;
};

struct PilotCodebook {
    Eigen::MatrixXcd S;

    int pilot_len() const { return static_cast<int>(S.rows()); }
    int num_devices() const { return static_cast<int>(S.cols()); }
};

struct ActivityVector {
    std::vector<std::uint8_t> a;
    double epsilon = 0.0;

    int num_devices() const { return static_cast<int>(a.size()); }
    int num_active() const;
    friend bool operator==(const ActivityVector&, const ActivityVector&) = default;
};

/// One random-access slot. Received signals are stored row-major as
/// [ap][symbol][antenna] in single precision.
struct AccessSlot {
    ActivityVector activity;
    std::vector<std::complex<float>> received;
    std::vector<double> tx_power_w;
    double noise_var_w = 0.0;
    int num_aps = 0;
    int pilot_len = 0;
    int num_antennas = 0;

    /// Y_m as an L x N view.
    Eigen::Map<const RowMajorXcf> block(int m) const;
    Eigen::MatrixXcd block_d(int m) const { return block(m).cast<std::complex<double>>(); }
    friend bool operator==(const AccessSlot&, const AccessSlot&) = default;
};

enum class Partition : std::uint32_t { train = 0, eval = 1 };

struct AccessSlotDataset {
    static constexpr std::uint32_t kFormatVersion = 1;

    PilotCodebook codebook;
    NetworkTopology topology;
    LargeScaleMap lsf;
    std::vector<AccessSlot> slots;
    FadingMode fading_mode = FadingMode::per_slot;
    int fading_block_len = 10;
    double sparsity = 0.1;
    std::uint64_t master_seed = 0;
    std::uint64_t config_hash = 0;
    Partition partition = Partition::train;
    std::uint32_t format_version = kFormatVersion;

    int num_aps() const { return topology.num_aps(); }
    int num_devices() const { return codebook.num_devices(); }
    int pilot_len() const { return codebook.pilot_len(); }
    int num_antennas() const { return slots.empty() ? 0 : slots.front().num_antennas; }
    int num_slots() const { return static_cast<int>(slots.size()); }
};

/// i.i.d. CN(0,1) pilots, each column rescaled to squared norm L. With
/// orthonormal set (requires K <= L) the columns are orthogonalized first.
PilotCodebook generate_pilots(int pilot_len, int num_devices, std::uint64_t seed,
                              bool orthonormal = false);

ActivityVector draw_activity(int num_devices, double epsilon, std::uint64_t seed);

/// Y_m = S D_a D_rho^{1/2} G_m + W_m for every AP.
AccessSlot synthesize_slot(const PilotCodebook& codebook, const ActivityVector& activity,
                           const LargeScaleMap& lsf, const FadingTensor& ssf,
                           const std::vector<double>& tx_power_w, double noise_var_w,
                           std::uint64_t seed);

struct SnrReport {
    std::vector<double> snr_db;
    /// SNR met by the configured fraction of devices (CDF = 1 - coverage).
    double target_db = 0.0;
};

/// Per-device SNR at the dominant AP: rho_k max_m beta_mk / sigma^2.
SnrReport dominant_ap_snr(const LargeScaleMap& lsf, const std::vector<double>& tx_power_w,
                          double noise_var_w, double coverage_fraction = 0.95,
                          double snr_gain_db = 0.0);

/// Per-device transmit powers: fixed, or power-controlled to the coverage target.
std::vector<double> transmit_powers(const LargeScaleMap& lsf, const ScenarioConfig& cfg);

/// Shared part of a dataset: topology, large-scale fading and pilots.
struct ScenarioInstance {
    NetworkTopology topology;
    LargeScaleMap lsf;
    PilotCodebook codebook;
    std::vector<double> tx_power_w;
};

ScenarioInstance make_scenario(const ScenarioConfig& cfg, std::uint64_t master_seed);

/// Slots [first, first + count) of a partition's stream.
std::vector<AccessSlot> generate_slots(const ScenarioConfig& cfg, const ScenarioInstance& inst,
                                       std::uint64_t master_seed, Partition part,
                                       std::uint64_t first, int count);

/// Deterministic in (cfg, master_seed, partition). Train and eval partitions
/// of one master seed share topology, fading map and pilots.
AccessSlotDataset generate_dataset(const ScenarioConfig& cfg, int num_slots,
                                   std::uint64_t master_seed, Partition part = Partition::train,
                                   std::uint64_t config_hash = 0);

} // namespace gfad
