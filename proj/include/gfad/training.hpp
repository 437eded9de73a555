#pragma once

#include "gfad/slp.hpp"

#include <cstdint>
#include <vector>

namespace gfad {

struct TrainConfig {
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int batch_size = 256;
    int max_epochs = 50;
    int early_stop_patience = 10;
    double validation_fraction = 0.1;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Samples are columns. inputs holds one matrix per model input slot (T).
struct TrainingSet {
    std::vector<Eigen::MatrixXd> inputs;
    Eigen::MatrixXd labels;

    int size() const { return static_cast<int>(labels.cols()); }
    TrainingSet subset(const std::vector<int>& columns) const;
};

/// Losses are mean per-sample BCE (summed over devices). The training loss of
/// an epoch is the running mean over its mini-batches.
struct TrainReport {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    int stopped_epoch = 0;
    int best_epoch = 0;
    std::size_t param_count = 0;

    double min_train_loss() const;
    double best_val_loss() const;
};

struct TrainResult {
    SlpModel model;
    TrainReport report;
};

/// Deterministic random split; returns {train, validation}.
std::pair<TrainingSet, TrainingSet> split_validation(const TrainingSet& all, double fraction,
                                                     std::uint64_t seed);

/// Mini-batch Adam on the BCE loss with early stopping on the validation
/// loss; returns the best-validation weights. An empty validation set makes
/// the training loss drive early stopping.
TrainResult train(SlpModel model, const TrainingSet& train_set, const TrainingSet& val_set,
                  const TrainConfig& cfg);

/// Mean per-sample BCE of a model over a set.
double mean_loss(const SlpModel& model, const TrainingSet& set, int batch_size = 1024);

} // namespace gfad
