#pragma once

// AP clustering, decentralized and centralized detection, post-processing.

#include "gfad/slp.hpp"
#include "gfad/training.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gfad {

struct ClusterAssignment {
    /// members[k] lists the T strongest APs of device k, strongest first.
    std::vector<std::vector<int>> members;
    int cluster_size = 0;

    int num_devices() const { return static_cast<int>(members.size()); }
};

/// Top-T APs per device by linear beta; ties go to the lower AP index.
ClusterAssignment select_clusters(const LargeScaleMap& lsf, int cluster_size);

/// 1 iff score >= tau.
std::vector<std::uint8_t> hard_decision(std::span<const double> scores, double tau);

enum class MajorityRule { at_least_half, strict };
enum class PostMode { fusion, pond };

/// Active iff the number of ones reaches T/2 (inclusive) or exceeds it (strict).
bool fuse_majority(std::span<const std::uint8_t> votes, MajorityRule rule = MajorityRule::at_least_half);

/// Minimum number of positive votes that makes a majority of T.
int majority_count(int T, MajorityRule rule);

/// sum_t beta_t a_t / sum_t beta_t over linear-scale beta.
double ponderate(std::span<const double> predictions, std::span<const double> beta);

struct DetectionResult {
    Eigen::VectorXd scores;
    std::vector<std::uint8_t> decisions;
    double tau = 0.0;
    std::string strategy;
};

/// Per-AP predictions of a T=1 model for one slot, K x M.
Eigen::MatrixXd per_ap_predictions(const SlpModel& model, const AccessSlot& slot);

/// Per-AP predictions with one model per AP (model m serves AP m); a single
/// model is shared by every AP.
Eigen::MatrixXd per_ap_predictions(std::span<const SlpModel> models, const AccessSlot& slot);

/// Scaled inputs of every AP of a slot as columns (input_dim x M).
Eigen::MatrixXd slot_inputs(const AccessSlot& slot, InputScaling scaling);

/// Soft scores from per-AP predictions. Pond: ponderated prediction. Fusion:
/// the prediction whose threshold crossing flips the majority decision, so that
/// thresholding it at tau reproduces the fused decision for every tau.
Eigen::VectorXd decentralized_scores(const Eigen::MatrixXd& per_ap, const ClusterAssignment& clusters,
                                     const LargeScaleMap& lsf, PostMode mode,
                                     MajorityRule rule = MajorityRule::at_least_half);

/// Strategy I. In fusion mode the reported score is the fraction of positive
/// cluster votes at tau.
DetectionResult detect_decentralized(const SlpModel& model, const AccessSlot& slot,
                                     const ClusterAssignment& clusters, const LargeScaleMap& lsf,
                                     PostMode mode, double tau,
                                     MajorityRule rule = MajorityRule::at_least_half);

/// Strategy I post-processing of precomputed K x M per-AP predictions.
DetectionResult detect_decentralized(const Eigen::MatrixXd& per_ap, const ClusterAssignment& clusters,
                                     const LargeScaleMap& lsf, PostMode mode, double tau,
                                     MajorityRule rule = MajorityRule::at_least_half);

/// Strategy II soft scores: for each device, entry k of the forward pass on its
/// cluster signals. Hidden features are computed once per AP.
Eigen::VectorXd centralized_scores(const SlpModel& model, const AccessSlot& slot,
                                   const ClusterAssignment& clusters);

DetectionResult detect_centralized(const SlpModel& model, const AccessSlot& slot,
                                   const ClusterAssignment& clusters, double tau);

/// Samples (one AP signal, full activity). aps_per_slot = 0 uses every AP;
/// otherwise APs are taken round-robin across slots, the first slot starting
/// at AP (first_slot * aps_per_slot) mod M.
TrainingSet decentralized_training_set(std::span<const AccessSlot> slots, InputScaling scaling,
                                       int aps_per_slot = 0, std::uint64_t first_slot = 0);

/// Samples of one AP, one per slot.
TrainingSet single_ap_training_set(std::span<const AccessSlot> slots, InputScaling scaling, int ap);

/// Samples (cluster signals of a random device, full activity), devices_per_slot
/// distinct devices per slot. Device draws depend on (seed, first_slot + index).
TrainingSet centralized_training_set(std::span<const AccessSlot> slots, const ClusterAssignment& clusters,
                                     InputScaling scaling, int devices_per_slot, std::uint64_t seed,
                                     std::uint64_t first_slot = 0);

/// Appends the samples of b to a.
void append_samples(TrainingSet& a, const TrainingSet& b);

/// Fronthaul payload per slot with 32-bit reals.
std::uint64_t fronthaul_bytes_decentralized(int num_aps, int num_devices);
std::uint64_t fronthaul_bytes_centralized(int num_aps, int pilot_len, int num_antennas);

} // namespace gfad
