#pragma once

// Confusion counts, ROC sweeps, AUC and SNR CDFs.

#include "gfad/scenario.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gfad {

struct ConfusionCounts {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    /// Undefined (nullopt) when there is no active / inactive device.
    std::optional<double> p_md() const;
    std::optional<double> p_fa() const;
    std::optional<double> p_d() const;
    double accuracy() const;
    ConfusionCounts& operator+=(const ConfusionCounts& o);
};

ConfusionCounts confusion(std::span<const std::uint8_t> decisions, std::span<const std::uint8_t> truth);

/// Pooled (score, truth) pairs over slots and devices.
struct ScorePool {
    std::vector<double> scores;
    std::vector<std::uint8_t> truth;

    void add(std::span<const double> s, std::span<const std::uint8_t> t);
    std::size_t size() const { return scores.size(); }
    std::uint64_t positives() const;
};

struct RocPoint {
    double tau = 0.0;
    double p_fa = 0.0;
    double p_d = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
    std::uint64_t positives = 0;
    std::uint64_t negatives = 0;

    /// Best per-device decision accuracy over the swept thresholds.
    double best_accuracy() const;
    double best_accuracy_tau() const;
};

inline constexpr double kTauOvershoot = 1e-6;

/// Thresholds tau_i = i (1 + delta) / (n - 1), i = 0..n-1; confusion pooled
/// over the whole pool at each tau; AUC by the trapezoid rule over P_FA.
/// Requires both classes to be present.
RocCurve roc_sweep(const ScorePool& pool, int num_taus, double delta = kTauOvershoot);

/// Same curve evaluated at every distinct score (and the two end points).
RocCurve roc_exact(const ScorePool& pool);

/// Trapezoidal area under (P_FA, P_D) points sorted by P_FA (ties by P_D).
double trapezoid_auc(std::vector<RocPoint> points);

/// Maps values to [0, 1] by average rank: (rank - 1) / (n - 1).
std::vector<double> rank_normalize(std::span<const double> values);

struct SnrCdf {
    /// Sorted per-device SNR and CDF value i/n at each.
    std::vector<double> snr_db;
    std::vector<double> cdf;
    /// CDF = 1 - coverage crossing (5th percentile by default).
    double target_db = 0.0;

    /// Fraction of devices with SNR <= x.
    double at(double x) const;
};

SnrCdf snr_cdf(const LargeScaleMap& lsf, const std::vector<double>& tx_power_w, double noise_var_w,
               double coverage_fraction = 0.95);

} // namespace gfad
