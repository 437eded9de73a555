#pragma once

// End-to-end experiment drivers shared by the CLI and the acceptance suite.

#include "gfad/config.hpp"
#include "gfad/metrics.hpp"
#include "gfad/pareto.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gfad {

enum class Method { slp_pond, slp_fusion, slp_central, ista, fista, amp };

Method parse_method(std::string_view name);
std::string_view to_string(Method m);
bool is_learned(Method m);
std::vector<Method> parse_methods(std::string_view csv);

/// Calls fn on consecutive generated chunks of a partition.
void for_each_chunk(const RunConfig& cfg, const ScenarioInstance& inst, Partition part, int num_slots,
                    const std::function<void(std::span<const AccessSlot>, std::uint64_t first)>& fn,
                    int chunk = 2000);

/// Scenario shared part of a loaded dataset.
ScenarioInstance instance_of(const AccessSlotDataset& ds);

TrainingSet build_training_set(const RunConfig& cfg, const ClusterAssignment& clusters, Strategy strategy,
                               std::span<const AccessSlot> slots, std::uint64_t first_slot,
                               std::optional<int> aps_per_slot = std::nullopt);

/// Validation split plus Adam training of a fresh model. ap selects the seed
/// stream of a per-AP model.
TrainResult fit_detector(const RunConfig& cfg, const ModelConfig& model_cfg, const TrainingSet& all,
                         const TrainConfig& train_cfg, std::optional<int> ap = std::nullopt);

/// Generates cfg.train_slots (or num_slots) training slots and trains.
TrainResult train_detector(const RunConfig& cfg, const ScenarioInstance& inst, Strategy strategy,
                           std::optional<int> num_slots = std::nullopt);

/// One model per AP, each trained on its own AP's samples only.
std::vector<TrainResult> train_per_ap_detectors(const RunConfig& cfg, const ScenarioInstance& inst,
                                                std::optional<int> num_slots = std::nullopt);

struct Detectors {
    std::optional<SlpModel> decentralized;
    std::optional<SlpModel> centralized;
    /// Used instead of decentralized when not empty; entry m serves AP m.
    std::vector<SlpModel> per_ap;
};

/// Per-device scores of one method on a batch of slots, appended to pool.
void score_slots(const RunConfig& cfg, const ScenarioInstance& inst, const ClusterAssignment& clusters,
                 Method method, const Detectors& detectors, std::span<const AccessSlot> slots, ScorePool& pool);

/// ROC of a pooled score set; baseline energies are rank-normalized first.
RocCurve method_roc(Method method, const ScorePool& pool, int num_taus, BaselineRoc baseline = BaselineRoc::rank);

struct MethodResult {
    std::string method;
    RocCurve roc;
    std::optional<TrainReport> report;
    /// AUC over every distinct score, free of threshold-grid resolution.
    double exact_auc = 0.0;
    /// Best per-device accuracy over every distinct threshold.
    double exact_best_accuracy = 0.0;
    /// Lowest active score minus highest inactive score; positive means P_D = 1 at P_FA = 0.
    double margin = 0.0;
};

/// Trains the learned detectors required by methods and evaluates every method
/// on the eval partition.
std::vector<MethodResult> run_methods(const RunConfig& cfg, std::span<const Method> methods);

enum class SweepAxis { pilot_len, num_devices, sparsity };
SweepAxis parse_axis(std::string_view name);
std::string_view to_string(SweepAxis a);

struct SweepPoint {
    std::string axis;
    std::string value;
    std::string method;
    RocCurve roc;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

std::vector<SweepPoint> run_sweep(SweepAxis axis, std::span<const std::string> values, const RunConfig& base,
                                  std::span<const Method> methods);

struct ParetoRow {
    int width = 0;
    int depth = 0;
    std::size_t params = 0;
    double train_loss = 0.0;
    bool on_front = false;
};

/// Decentralized V x Z grid at the reduced budget (one AP sample per slot).
std::vector<ParetoRow> run_pareto(const RunConfig& cfg);

struct TimingRow {
    std::string method;
    double median_s = 0.0;
    double mean_s = 0.0;
    int reps = 0;
};

/// Median and mean per-slot wall-clock time of fn over slots.
TimingRow time_method(const std::string& label, std::span<const AccessSlot> slots, int warmup, int reps,
                      const std::function<void(const AccessSlot&)>& fn);

std::vector<TimingRow> bench_timing(const RunConfig& cfg, const ScenarioInstance& inst,
                                    std::span<const Method> methods, const Detectors& detectors,
                                    std::span<const AccessSlot> slots);

// CSV outputs. Column orders are fixed.
void write_roc_csv(const std::filesystem::path& path, const std::vector<std::pair<std::string, RocCurve>>& curves);
void write_auc_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points);
void write_cdf_csv(const std::filesystem::path& path, const SnrCdf& cdf);
void write_pareto_csv(const std::filesystem::path& path, const std::vector<ParetoRow>& rows);
void write_timing_csv(const std::filesystem::path& path, const std::vector<TimingRow>& rows);

/// `<path>.meta` sidecar holding the config hash, seed and producing command.
void write_sidecar(const std::filesystem::path& path, const RunConfig& cfg, const std::string& command);

} // namespace gfad
