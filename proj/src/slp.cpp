#include "gfad/slp.hpp"

#include "gfad/error.hpp"
#include "gfad/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gfad {

ModelConfig ModelConfig::for_signal(int pilot_len, int num_antennas, int hidden_layers,
                                    int hidden_width, int num_devices, int cluster_inputs) {
    ModelConfig cfg;
    cfg.input_dim = 2 * pilot_len * num_antennas;
    cfg.hidden_layers = hidden_layers;
    cfg.hidden_width = hidden_width;
    cfg.num_devices = num_devices;
    cfg.cluster_inputs = cluster_inputs;
    return cfg;
}

void ModelConfig::validate() const {
    if (input_dim < 1 || hidden_layers < 1 || hidden_width < 1 || num_devices < 1 || cluster_inputs < 1)
        throw ConfigError("model: all dimensions must be >= 1");
}

std::size_t param_count(const ModelConfig& cfg) {
    const auto in = static_cast<std::size_t>(cfg.input_dim);
    const auto V = static_cast<std::size_t>(cfg.hidden_width);
    const auto Z = static_cast<std::size_t>(cfg.hidden_layers);
    const auto K = static_cast<std::size_t>(cfg.num_devices);
    const auto T = static_cast<std::size_t>(cfg.cluster_inputs);
    return (in + 1) * V + (Z - 1) * (V + 1) * V + (T * V + 1) * K;
}

SlpModel::SlpModel(ModelConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    theta_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(param_count(cfg_)));
}

SlpModel SlpModel::initialized(const ModelConfig& cfg, std::uint64_t seed) {
    SlpModel model(cfg);
    model.seed = seed;
    auto rng = make_engine(seed, "slp_init");
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int z = 0; z < cfg.hidden_layers; ++z) {
        auto U = model.hidden_weight(z);
        const double scale = std::sqrt(2.0 / static_cast<double>(U.cols()));
        for (Eigen::Index j = 0; j < U.cols(); ++j)
            for (Eigen::Index i = 0; i < U.rows(); ++i) U(i, j) = scale * nd(rng);
    }
    auto W = model.output_weight();
    const double scale = std::sqrt(1.0 / static_cast<double>(W.cols()));
    for (Eigen::Index j = 0; j < W.cols(); ++j)
        for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = scale * nd(rng);
    return model;
}

std::size_t SlpModel::offset_of_layer(int z) const {
    std::size_t off = 0;
    const auto V = static_cast<std::size_t>(cfg_.hidden_width);
    for (int i = 0; i < z; ++i) off += (static_cast<std::size_t>(layer_input_dim(i)) + 1) * V;
    return off;
}

SlpModel::MatMap SlpModel::hidden_weight(int z) {
    return {theta_.data() + offset_of_layer(z), cfg_.hidden_width, layer_input_dim(z)};
}
SlpModel::ConstMatMap SlpModel::hidden_weight(int z) const {
    return {theta_.data() + offset_of_layer(z), cfg_.hidden_width, layer_input_dim(z)};
}
SlpModel::VecMap SlpModel::hidden_bias(int z) {
    return {theta_.data() + offset_of_layer(z) +
                static_cast<std::size_t>(cfg_.hidden_width) * layer_input_dim(z),
            cfg_.hidden_width};
}
SlpModel::ConstVecMap SlpModel::hidden_bias(int z) const {
    return {theta_.data() + offset_of_layer(z) +
                static_cast<std::size_t>(cfg_.hidden_width) * layer_input_dim(z),
            cfg_.hidden_width};
}
SlpModel::MatMap SlpModel::output_weight() {
    return {theta_.data() + offset_of_layer(cfg_.hidden_layers), cfg_.num_devices,
            cfg_.cluster_inputs * cfg_.hidden_width};
}
SlpModel::ConstMatMap SlpModel::output_weight() const {
    return {theta_.data() + offset_of_layer(cfg_.hidden_layers), cfg_.num_devices,
            cfg_.cluster_inputs * cfg_.hidden_width};
}
SlpModel::VecMap SlpModel::output_bias() {
    return {theta_.data() + offset_of_layer(cfg_.hidden_layers) +
                static_cast<std::size_t>(cfg_.num_devices) * cfg_.cluster_inputs * cfg_.hidden_width,
            cfg_.num_devices};
}
SlpModel::ConstVecMap SlpModel::output_bias() const {
    return {theta_.data() + offset_of_layer(cfg_.hidden_layers) +
                static_cast<std::size_t>(cfg_.num_devices) * cfg_.cluster_inputs * cfg_.hidden_width,
            cfg_.num_devices};
}

Eigen::VectorXd flatten_signal(const Eigen::Ref<const Eigen::MatrixXcd>& Y) {
    Eigen::VectorXd v(2 * Y.rows() * Y.cols());
    Eigen::Index i = 0;
    for (Eigen::Index l = 0; l < Y.rows(); ++l)
        for (Eigen::Index n = 0; n < Y.cols(); ++n) {
            v(i++) = Y(l, n).real();
            v(i++) = Y(l, n).imag();
        }
    return v;
}

Eigen::VectorXd flatten_signal(const Eigen::Map<const RowMajorXcf>& Y) {
    Eigen::VectorXd v(2 * Y.rows() * Y.cols());
    Eigen::Index i = 0;
    for (Eigen::Index l = 0; l < Y.rows(); ++l)
        for (Eigen::Index n = 0; n < Y.cols(); ++n) {
            v(i++) = Y(l, n).real();
            v(i++) = Y(l, n).imag();
        }
    return v;
}

Eigen::MatrixXcd unflatten_signal(const Eigen::Ref<const Eigen::VectorXd>& v, int pilot_len,
                                  int num_antennas) {
    if (v.size() != 2 * static_cast<Eigen::Index>(pilot_len) * num_antennas)
        throw MismatchError("unflatten_signal: length does not match 2*L*N");
    Eigen::MatrixXcd Y(pilot_len, num_antennas);
    Eigen::Index i = 0;
    for (int l = 0; l < pilot_len; ++l)
        for (int n = 0; n < num_antennas; ++n, i += 2) Y(l, n) = {v(i), v(i + 1)};
    return Y;
}

void scale_inputs(Eigen::Ref<Eigen::MatrixXd> X, InputScaling scaling) {
    if (scaling == InputScaling::none) return;
    const double rms_target = std::sqrt(static_cast<double>(X.rows()));
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double nrm = X.col(j).norm();
        if (nrm > 0.0) X.col(j) *= rms_target / nrm;
    }
}

Eigen::VectorXd model_input(const AccessSlot& slot, int m, InputScaling scaling) {
    Eigen::VectorXd x = flatten_signal(slot.block(m));
    scale_inputs(x, scaling);
    return x;
}

Eigen::MatrixXd hidden_features(const SlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X) {
    const auto& cfg = model.config();
    if (X.rows() != cfg.input_dim) throw MismatchError("forward: input dimension mismatch");
    Eigen::MatrixXd a = X;
    for (int z = 0; z < cfg.hidden_layers; ++z) {
        Eigen::MatrixXd pre = model.hidden_weight(z) * a;
        pre.colwise() += model.hidden_bias(z);
        a = pre.cwiseMax(0.0);
    }
    return a;
}

Eigen::MatrixXd output_logits(const SlpModel& model, std::span<const Eigen::MatrixXd> features) {
    const auto& cfg = model.config();
    if (static_cast<int>(features.size()) != cfg.cluster_inputs)
        throw MismatchError("forward: expected " + std::to_string(cfg.cluster_inputs) + " inputs");
    const auto V = cfg.hidden_width;
    const auto W = model.output_weight();
    Eigen::MatrixXd logits = W.middleCols(0, V) * features[0];
    for (int t = 1; t < cfg.cluster_inputs; ++t)
        logits.noalias() += W.middleCols(static_cast<Eigen::Index>(t) * V, V) * features[static_cast<std::size_t>(t)];
    logits.colwise() += model.output_bias();
    return logits;
}

double sigmoid(double z) {
    constexpr double lo = std::numeric_limits<double>::min();
    const double hi = std::nextafter(1.0, 0.0);
    return std::clamp(1.0 / (1.0 + std::exp(-z)), lo, hi);
}

Eigen::MatrixXd forward_batch(const SlpModel& model, std::span<const Eigen::MatrixXd> inputs) {
    std::vector<Eigen::MatrixXd> feats;
    feats.reserve(inputs.size());
    for (const auto& X : inputs) feats.push_back(hidden_features(model, X));
    return output_logits(model, feats).unaryExpr([](double z) { return sigmoid(z); });
}

Eigen::VectorXd forward(const SlpModel& model, std::span<const Eigen::VectorXd> inputs) {
    std::vector<Eigen::MatrixXd> cols(inputs.begin(), inputs.end());
    return forward_batch(model, cols).col(0);
}

double bce_loss(const Eigen::Ref<const Eigen::MatrixXd>& predictions,
                const Eigen::Ref<const Eigen::MatrixXd>& labels) {
    if (predictions.rows() != labels.rows() || predictions.cols() != labels.cols())
        throw MismatchError("bce_loss: shape mismatch");
    double loss = 0.0;
    for (Eigen::Index j = 0; j < predictions.cols(); ++j)
        for (Eigen::Index i = 0; i < predictions.rows(); ++i) {
            const double p = std::clamp(predictions(i, j), kPredictionClip, 1.0 - kPredictionClip);
            const double a = labels(i, j);
            loss -= a * std::log(p) + (1.0 - a) * std::log(1.0 - p);
        }
    return loss;
}

LossAndGradient loss_and_gradient(const SlpModel& model, std::span<const Eigen::MatrixXd> inputs,
                                  const Eigen::Ref<const Eigen::MatrixXd>& labels) {
    const auto& cfg = model.config();
    const int T = cfg.cluster_inputs;
    const int Z = cfg.hidden_layers;
    const int V = cfg.hidden_width;
    if (static_cast<int>(inputs.size()) != T) throw MismatchError("gradient: wrong number of inputs");
    const Eigen::Index B = labels.cols();

    // activations[t][z] is the input of layer z for input t; index Z holds the features.
    std::vector<std::vector<Eigen::MatrixXd>> acts(static_cast<std::size_t>(T));
    std::vector<Eigen::MatrixXd> feats(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        const auto& X = inputs[static_cast<std::size_t>(t)];
        if (X.rows() != cfg.input_dim || X.cols() != B) throw MismatchError("gradient: input shape mismatch");
        auto& a = acts[static_cast<std::size_t>(t)];
        a.reserve(static_cast<std::size_t>(Z + 1));
        a.push_back(X);
        for (int z = 0; z < Z; ++z) {
            Eigen::MatrixXd pre = model.hidden_weight(z) * a.back();
            pre.colwise() += model.hidden_bias(z);
            a.push_back(pre.cwiseMax(0.0));
        }
        feats[static_cast<std::size_t>(t)] = a.back();
    }
    const Eigen::MatrixXd logits = output_logits(model, feats);
    const Eigen::MatrixXd P = logits.unaryExpr([](double z) { return sigmoid(z); });

    LossAndGradient out;
    out.loss = bce_loss(P, labels);
    Eigen::MatrixXd dlogit = P - labels;
    for (Eigen::Index j = 0; j < B; ++j)
        for (Eigen::Index i = 0; i < P.rows(); ++i)
            if (P(i, j) <= kPredictionClip || P(i, j) >= 1.0 - kPredictionClip) dlogit(i, j) = 0.0;

    SlpModel grad(cfg);
    auto gW = grad.output_weight();
    const auto W = model.output_weight();
    grad.output_bias() = dlogit.rowwise().sum();
    for (int t = 0; t < T; ++t) {
        const auto cols = static_cast<Eigen::Index>(t) * V;
        gW.middleCols(cols, V).noalias() = dlogit * feats[static_cast<std::size_t>(t)].transpose();
        Eigen::MatrixXd dA = W.middleCols(cols, V).transpose() * dlogit;
        const auto& a = acts[static_cast<std::size_t>(t)];
        for (int z = Z - 1; z >= 0; --z) {
            const Eigen::MatrixXd dPre =
                dA.cwiseProduct(a[static_cast<std::size_t>(z + 1)].unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
            grad.hidden_weight(z).noalias() += dPre * a[static_cast<std::size_t>(z)].transpose();
            grad.hidden_bias(z) += dPre.rowwise().sum();
            if (z > 0) dA = model.hidden_weight(z).transpose() * dPre;
        }
    }
    out.gradient = std::move(grad.parameters());
    return out;
}

} // namespace gfad
