#pragma once

// Single-layer-perceptron activity detector: Z shared ReLU layers of width V
// applied to each of T input signals, concatenation, and a K-unit sigmoid
// output layer.

#include "gfad/scenario.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace gfad {

enum class InputScaling : std::uint32_t {
    none = 0,
    /// Each flattened signal is rescaled to RMS 1 (zero vectors pass through).
    frobenius = 1,
};

struct ModelConfig {
    int input_dim = 160;
    int hidden_layers = 1;
    int hidden_width = 512;
    int num_devices = 100;
    int cluster_inputs = 1;
    InputScaling input_scaling = InputScaling::frobenius;

    static ModelConfig for_signal(int pilot_len, int num_antennas, int hidden_layers,
                                  int hidden_width, int num_devices, int cluster_inputs);
    void validate() const;
    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Trainable parameter count: shared hidden stack plus the output layer.
std::size_t param_count(const ModelConfig& cfg);

/// All parameters live in one flat vector; layer accessors are column-major
/// views into it in the order U_1, b_1, ..., U_Z, b_Z, W_out, b_out.
class SlpModel {
public:
    using MatMap = Eigen::Map<Eigen::MatrixXd>;
    using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
    using VecMap = Eigen::Map<Eigen::VectorXd>;
    using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

    SlpModel() = default;
    explicit SlpModel(ModelConfig cfg);

    static SlpModel zeros(const ModelConfig& cfg) { return SlpModel(cfg); }
    /// He-scaled Gaussian weights, zero biases.
    static SlpModel initialized(const ModelConfig& cfg, std::uint64_t seed);

    const ModelConfig& config() const { return cfg_; }
    Eigen::VectorXd& parameters() { return theta_; }
    const Eigen::VectorXd& parameters() const { return theta_; }

    MatMap hidden_weight(int z);
    ConstMatMap hidden_weight(int z) const;
    VecMap hidden_bias(int z);
    ConstVecMap hidden_bias(int z) const;
    MatMap output_weight();
    ConstMatMap output_weight() const;
    VecMap output_bias();
    ConstVecMap output_bias() const;

    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;

private:
    std::size_t offset_of_layer(int z) const;
    int layer_input_dim(int z) const { return z == 0 ? cfg_.input_dim : cfg_.hidden_width; }

    ModelConfig cfg_;
    Eigen::VectorXd theta_;
};

/// Flattens an L x N block as (re, im) per antenna, per symbol row.
Eigen::VectorXd flatten_signal(const Eigen::Ref<const Eigen::MatrixXcd>& Y);
Eigen::VectorXd flatten_signal(const Eigen::Map<const RowMajorXcf>& Y);
Eigen::MatrixXcd unflatten_signal(const Eigen::Ref<const Eigen::VectorXd>& v, int pilot_len,
                                  int num_antennas);

/// Applies the model's input scaling in place to each column.
void scale_inputs(Eigen::Ref<Eigen::MatrixXd> X, InputScaling scaling);

/// Flattened and scaled model input for AP m of a slot.
Eigen::VectorXd model_input(const AccessSlot& slot, int m, InputScaling scaling);

/// Output of the shared hidden stack for a batch of inputs (columns).
Eigen::MatrixXd hidden_features(const SlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Output-layer logits from T hidden feature blocks (each V x B).
Eigen::MatrixXd output_logits(const SlpModel& model, std::span<const Eigen::MatrixXd> features);

/// Logistic function clamped to the open interval (0, 1).
double sigmoid(double z);

/// Forward pass for one sample made of T already-scaled input vectors.
Eigen::VectorXd forward(const SlpModel& model, std::span<const Eigen::VectorXd> inputs);

/// Batched forward: T input matrices (input_dim x B) -> K x B predictions.
Eigen::MatrixXd forward_batch(const SlpModel& model, std::span<const Eigen::MatrixXd> inputs);

inline constexpr double kPredictionClip = 1e-7;

/// Binary cross-entropy summed over devices and samples, predictions clipped
/// to [delta, 1 - delta].
double bce_loss(const Eigen::Ref<const Eigen::MatrixXd>& predictions,
                const Eigen::Ref<const Eigen::MatrixXd>& labels);

/// Loss of a batch and its gradient with respect to every parameter (same
/// layout as SlpModel::parameters()).
struct LossAndGradient {
    double loss = 0.0;
    Eigen::VectorXd gradient;
};

LossAndGradient loss_and_gradient(const SlpModel& model, std::span<const Eigen::MatrixXd> inputs,
                                  const Eigen::Ref<const Eigen::MatrixXd>& labels);

} // namespace gfad
