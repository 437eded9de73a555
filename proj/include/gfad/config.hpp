#pragma once

// Run configuration: flat `key = value` text, `#` comments, case-sensitive keys.

#include "gfad/detection.hpp"
#include "gfad/scenario.hpp"
#include "gfad/solvers.hpp"
#include "gfad/training.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gfad {

enum class Strategy { decentralized, centralized };
/// Decentralized detectors: one model copied to every AP, or one model per AP.
enum class ModelSharing { shared, per_ap };
/// Baseline ROC: rank-normalized scores on the tau grid, or exact ROC of raw energies.
enum class BaselineRoc { rank, raw };

struct RunConfig {
    ScenarioConfig scenario;

    double coherence_time_s = 1e-3;
    double coherence_bandwidth_hz = 200e3;
    double reserved_fraction = 0.2;

    int cluster_size = 4;
    Strategy strategy = Strategy::decentralized;
    PostMode post_mode = PostMode::pond;
    MajorityRule majority_rule = MajorityRule::at_least_half;
    int num_taus = 1001;

    int hidden_width = 512;
    int hidden_layers = 1;
    InputScaling input_scaling = InputScaling::frobenius;

    int train_slots = 50000;
    int eval_slots = 20000;
    TrainConfig train;
    /// Decentralized samples per slot; 0 takes every AP.
    int train_aps_per_slot = 0;
    int central_devices_per_slot = 1;
    ModelSharing decentralized_models = ModelSharing::shared;

    double solver_lambda = -1.0;
    double amp_alpha = 1.4;
    int ista_iters = 235;
    int fista_iters = 100;
    int amp_iters = 18;
    BaselineAggregation baseline_aggregation = BaselineAggregation::cluster_weighted;
    BaselineRoc baseline_roc = BaselineRoc::rank;
    /// Evaluation slots for baselines; 0 uses eval_slots.
    int baseline_eval_slots = 0;

    std::vector<int> pareto_widths{128, 160, 256, 320, 512, 640};
    std::vector<int> pareto_depths{1, 2, 3, 4};
    int pareto_train_slots = 10000;
    int pareto_epochs = 30;

    int bench_slots = 20;
    int bench_reps = 7;
    int bench_warmup = 2;

    std::uint64_t seed = 1;

    /// Cross-module checks; throws ConfigError.
    void validate() const;
    /// Non-fatal observations (pilot budget versus coherence block).
    std::vector<std::string> warnings() const;
    /// Effective cluster size (T clipped to the number of deployed APs).
    int effective_cluster_size() const;
    SolverConfig solver(Algorithm a) const;
    ModelConfig model_config(int cluster_inputs) const;

    friend bool operator==(const RunConfig& a, const RunConfig& b);
};

RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::filesystem::path& path);

/// Applies one `key = value` assignment (used for command-line overrides).
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Every key in a fixed order; parse_config_text(emit_config(c)) == c.
std::string emit_config(const RunConfig& cfg);

/// FNV-1a over the emitted configuration without the seed line.
std::uint64_t config_hash(const RunConfig& cfg);

std::string_view to_string(Strategy s);
std::string_view to_string(PostMode p);

} // namespace gfad
