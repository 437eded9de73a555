#include "gfad/training.hpp"

#include "gfad/error.hpp"
#include "gfad/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gfad {

void TrainConfig::validate() const {
    if (learning_rate < 0.0) throw ConfigError("train: learning_rate must be >= 0");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
        throw ConfigError("train: Adam betas must lie in [0, 1)");
    if (adam_epsilon <= 0.0) throw ConfigError("train: adam_epsilon must be > 0");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
    if (early_stop_patience < 1) throw ConfigError("train: early_stop_patience must be >= 1");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
        throw ConfigError("train: validation_fraction must lie in [0, 1)");
}

TrainingSet TrainingSet::subset(const std::vector<int>& columns) const {
    TrainingSet out;
    for (const auto& X : inputs) out.inputs.emplace_back(X(Eigen::all, columns));
    out.labels = labels(Eigen::all, columns);
    return out;
}

double TrainReport::min_train_loss() const {
    return train_loss.empty() ? std::numeric_limits<double>::quiet_NaN()
                              : *std::min_element(train_loss.begin(), train_loss.end());
}

double TrainReport::best_val_loss() const {
    return val_loss.empty() ? std::numeric_limits<double>::quiet_NaN()
                            : *std::min_element(val_loss.begin(), val_loss.end());
}

std::pair<TrainingSet, TrainingSet> split_validation(const TrainingSet& all, double fraction,
                                                     std::uint64_t seed) {
    std::vector<int> idx(static_cast<std::size_t>(all.size()));
    std::iota(idx.begin(), idx.end(), 0);
    auto rng = make_engine(seed, "validation_split");
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_val = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(idx.size())));
    std::vector<int> val(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<int> tr(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
    std::sort(val.begin(), val.end());
    std::sort(tr.begin(), tr.end());
    return {all.subset(tr), all.subset(val)};
}

double mean_loss(const SlpModel& model, const TrainingSet& set, int batch_size) {
    if (set.size() == 0) return std::numeric_limits<double>::quiet_NaN();
    double total = 0.0;
    std::vector<Eigen::MatrixXd> batch(set.inputs.size());
    for (int start = 0; start < set.size(); start += batch_size) {
        const int n = std::min(batch_size, set.size() - start);
        for (std::size_t t = 0; t < set.inputs.size(); ++t) batch[t] = set.inputs[t].middleCols(start, n);
        total += bce_loss(forward_batch(model, batch), set.labels.middleCols(start, n));
    }
    return total / set.size();
}

TrainResult train(SlpModel model, const TrainingSet& train_set, const TrainingSet& val_set,
                  const TrainConfig& cfg) {
    cfg.validate();
    const auto& mc = model.config();
    if (train_set.size() == 0) throw ConfigError("train: empty training set");
    if (static_cast<int>(train_set.inputs.size()) != mc.cluster_inputs ||
        train_set.labels.rows() != mc.num_devices)
        throw MismatchError("train: training set does not match the model configuration");

    Eigen::VectorXd& theta = model.parameters();
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(theta.size());
    long step = 0;

    TrainReport report;
    report.param_count = static_cast<std::size_t>(theta.size());
    Eigen::VectorXd best_theta = theta;
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;

    std::vector<int> order(static_cast<std::size_t>(train_set.size()));
    std::iota(order.begin(), order.end(), 0);
    std::vector<Eigen::MatrixXd> batch(train_set.inputs.size());

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        auto rng = make_engine(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch));
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const std::vector<int> cols(order.begin() + static_cast<std::ptrdiff_t>(start),
                                        order.begin() + static_cast<std::ptrdiff_t>(end));
            for (std::size_t t = 0; t < batch.size(); ++t) batch[t] = train_set.inputs[t](Eigen::all, cols);
            const Eigen::MatrixXd labels = train_set.labels(Eigen::all, cols);
            const auto n = static_cast<double>(cols.size());

            auto lg = loss_and_gradient(model, batch, labels);
            if (!std::isfinite(lg.loss)) throw NumericError("train: loss became non-finite");
            epoch_loss += lg.loss;
            lg.gradient /= n;

            ++step;
            m1 = cfg.adam_beta1 * m1 + (1.0 - cfg.adam_beta1) * lg.gradient;
            m2 = cfg.adam_beta2 * m2 + (1.0 - cfg.adam_beta2) * lg.gradient.cwiseAbs2();
            const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
            theta.array() -= cfg.learning_rate * (m1.array() / c1) /
                             ((m2.array() / c2).sqrt() + cfg.adam_epsilon);
        }
        report.train_loss.push_back(epoch_loss / train_set.size());

        const double monitored = val_set.size() > 0 ? mean_loss(model, val_set) : report.train_loss.back();
        if (!std::isfinite(monitored)) throw NumericError("train: validation loss became non-finite");
        if (val_set.size() > 0) report.val_loss.push_back(monitored);
        report.stopped_epoch = epoch + 1;
        if (monitored < best) {
            best = monitored;
            best_theta = theta;
            report.best_epoch = epoch + 1;
            since_best = 0;
        } else if (++since_best >= cfg.early_stop_patience) {
            break;
        }
    }
    theta = best_theta;
    return {std::move(model), std::move(report)};
}

} // namespace gfad
