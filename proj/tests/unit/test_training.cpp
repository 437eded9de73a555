#include "gfad/error.hpp"
#include "gfad/rng.hpp"
#include "gfad/training.hpp"

#include <doctest.h>

using namespace gfad;

namespace {

TrainingSet random_set(int dim, int K, int n, std::uint64_t seed) {
    auto rng = make_engine(seed, "train_test");
    std::normal_distribution<double> nd;
    std::bernoulli_distribution coin(0.3);
    TrainingSet s;
    s.inputs.emplace_back(dim, n);
    for (Eigen::Index i = 0; i < s.inputs[0].size(); ++i) s.inputs[0](i) = nd(rng);
    s.labels.resize(K, n);
    for (Eigen::Index i = 0; i < s.labels.size(); ++i) s.labels(i) = coin(rng) ? 1.0 : 0.0;
    return s;
}

} // namespace

TEST_CASE("single-sample overfit drives the loss below 1e-3") {
    const auto set = random_set(6, 4, 1, 1);
    TrainConfig cfg;
    cfg.max_epochs = 500;
    cfg.early_stop_patience = 500;
    cfg.learning_rate = 1e-2;
    const auto r = train(SlpModel::initialized(ModelConfig{6, 1, 16, 4, 1, InputScaling::none}, 2), set, {}, cfg);
    CHECK(r.report.min_train_loss() < 1e-3);
    CHECK(mean_loss(r.model, set) < 1e-3);
}

TEST_CASE("zero learning rate leaves weights unchanged") {
    const auto set = random_set(6, 4, 50, 3);
    const auto m = SlpModel::initialized(ModelConfig{6, 2, 8, 4, 1, InputScaling::none}, 4);
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.max_epochs = 5;
    cfg.batch_size = 7;
    const auto r = train(m, set, {}, cfg);
    CHECK(r.model.parameters() == m.parameters());
}

TEST_CASE("property: training is deterministic") {
    const auto all = random_set(6, 3, 120, 5);
    auto [tr, val] = split_validation(all, 0.2, 9);
    CHECK(val.size() == 24);
    CHECK(tr.size() == 96);
    TrainConfig cfg;
    cfg.max_epochs = 6;
    cfg.batch_size = 16;
    const auto m = SlpModel::initialized(ModelConfig{6, 1, 10, 3, 1, InputScaling::none}, 6);
    const auto a = train(m, tr, val, cfg);
    const auto b = train(m, tr, val, cfg);
    CHECK(a.model.parameters() == b.model.parameters());
    CHECK(a.report.train_loss == b.report.train_loss);
    CHECK(a.report.val_loss == b.report.val_loss);
    for (double l : a.report.train_loss) CHECK(l >= 0.0);
}

TEST_CASE("early stopping returns the best validation weights") {
    const auto all = random_set(6, 3, 100, 7);
    auto [tr, val] = split_validation(all, 0.3, 1);
    TrainConfig cfg;
    cfg.max_epochs = 200;
    cfg.early_stop_patience = 3;
    cfg.learning_rate = 3e-2;
    const auto r = train(SlpModel::initialized(ModelConfig{6, 1, 32, 3, 1, InputScaling::none}, 2), tr, val, cfg);
    CHECK(r.report.stopped_epoch < 200);
    CHECK(r.report.stopped_epoch - r.report.best_epoch == 3);
    CHECK(mean_loss(r.model, val) == doctest::Approx(r.report.best_val_loss()).epsilon(1e-12));
}

TEST_CASE("divergence is reported") {
    auto set = random_set(4, 2, 10, 8);
    set.inputs[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
    TrainConfig cfg;
    cfg.max_epochs = 2;
    CHECK_THROWS_AS(train(SlpModel::initialized(ModelConfig{4, 1, 4, 2, 1, InputScaling::none}, 1), set, {}, cfg),
                    NumericError);
}

TEST_CASE("training configuration validation") {
    TrainConfig cfg;
    cfg.adam_beta1 = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = TrainConfig{};
    cfg.validation_fraction = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(train(SlpModel::zeros(ModelConfig{4, 1, 4, 2, 1, InputScaling::none}), TrainingSet{}, {}, TrainConfig{}),
                    ConfigError);
}
