#include "gfad/detection.hpp"

#include "gfad/error.hpp"
#include "gfad/rng.hpp"

#include <algorithm>
#include <numeric>

namespace gfad {

ClusterAssignment select_clusters(const LargeScaleMap& lsf, int cluster_size) {
    const auto M = static_cast<int>(lsf.beta_linear.rows());
    const auto K = static_cast<int>(lsf.beta_linear.cols());
    if (cluster_size < 1 || cluster_size > M)
        throw ConfigError("cluster size T=" + std::to_string(cluster_size) + " must lie in [1, M=" +
                          std::to_string(M) + "]");
    ClusterAssignment out;
    out.cluster_size = cluster_size;
    out.members.resize(static_cast<std::size_t>(K));
    std::vector<int> order(static_cast<std::size_t>(M));
    for (int k = 0; k < K; ++k) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return lsf.beta_linear(a, k) > lsf.beta_linear(b, k); });
        out.members[static_cast<std::size_t>(k)].assign(order.begin(), order.begin() + cluster_size);
    }
    return out;
}

std::vector<std::uint8_t> hard_decision(std::span<const double> scores, double tau) {
    if (tau < 0.0) throw ConfigError("threshold must be >= 0");
    std::vector<std::uint8_t> out(scores.size());
    std::transform(scores.begin(), scores.end(), out.begin(),
                   [tau](double s) { return static_cast<std::uint8_t>(s >= tau); });
    return out;
}

int majority_count(int T, MajorityRule rule) {
    if (T < 1) throw ConfigError("majority: T must be >= 1");
    return rule == MajorityRule::at_least_half ? (T + 1) / 2 : T / 2 + 1;
}

bool fuse_majority(std::span<const std::uint8_t> votes, MajorityRule rule) {
    const int ones = static_cast<int>(std::count_if(votes.begin(), votes.end(), [](auto v) { return v != 0; }));
    return ones >= majority_count(static_cast<int>(votes.size()), rule);
}

double ponderate(std::span<const double> predictions, std::span<const double> beta) {
    if (predictions.size() != beta.size() || beta.empty())
        throw MismatchError("ponderate: predictions and weights differ in length");
    double total = 0.0;
    for (double b : beta) {
        if (!(b > 0.0)) throw DomainError("ponderate: beta must be positive");
        total += b;
    }
    double acc = 0.0;
    for (std::size_t t = 0; t < beta.size(); ++t) acc += beta[t] / total * predictions[t];
    return acc;
}

Eigen::MatrixXd slot_inputs(const AccessSlot& slot, InputScaling scaling) {
    Eigen::MatrixXd X(2 * slot.pilot_len * slot.num_antennas, slot.num_aps);
    for (int m = 0; m < slot.num_aps; ++m) X.col(m) = flatten_signal(slot.block(m));
    scale_inputs(X, scaling);
    return X;
}

Eigen::MatrixXd per_ap_predictions(const SlpModel& model, const AccessSlot& slot) {
    if (model.config().cluster_inputs != 1)
        throw MismatchError("decentralized detection needs a model with T=1");
    const Eigen::MatrixXd X = slot_inputs(slot, model.config().input_scaling);
    return forward_batch(model, std::span<const Eigen::MatrixXd>(&X, 1));
}

Eigen::MatrixXd per_ap_predictions(std::span<const SlpModel> models, const AccessSlot& slot) {
    if (models.size() == 1) return per_ap_predictions(models.front(), slot);
    if (static_cast<int>(models.size()) != slot.num_aps)
        throw MismatchError("per-AP detection needs " + std::to_string(slot.num_aps) + " models, got " +
                            std::to_string(models.size()));
    const int K = models.front().config().num_devices;
    Eigen::MatrixXd out(K, slot.num_aps);
    for (int m = 0; m < slot.num_aps; ++m) {
        const auto& model = models[static_cast<std::size_t>(m)];
        if (model.config().cluster_inputs != 1 || model.config().num_devices != K)
            throw MismatchError("per-AP models must share K and have T=1");
        const std::vector<Eigen::VectorXd> in{model_input(slot, m, model.config().input_scaling)};
        out.col(m) = forward(model, in);
    }
    return out;
}

namespace {

void check_clusters(const ClusterAssignment& clusters, int num_devices, int num_aps) {
    if (clusters.num_devices() != num_devices)
        throw MismatchError("cluster assignment covers a different number of devices");
    for (const auto& c : clusters.members)
        for (int m : c)
            if (m < 0 || m >= num_aps) throw MismatchError("cluster references a missing AP");
}

} // namespace

Eigen::VectorXd decentralized_scores(const Eigen::MatrixXd& per_ap, const ClusterAssignment& clusters,
                                     const LargeScaleMap& lsf, PostMode mode, MajorityRule rule) {
    const auto K = static_cast<int>(per_ap.rows());
    check_clusters(clusters, K, static_cast<int>(per_ap.cols()));
    const int T = clusters.cluster_size;
    Eigen::VectorXd out(K);
    std::vector<double> preds(static_cast<std::size_t>(T)), betas(static_cast<std::size_t>(T));
    const int need = majority_count(T, rule);
    for (int k = 0; k < K; ++k) {
        const auto& c = clusters.members[static_cast<std::size_t>(k)];
        for (int t = 0; t < T; ++t) {
            preds[static_cast<std::size_t>(t)] = per_ap(k, c[static_cast<std::size_t>(t)]);
            betas[static_cast<std::size_t>(t)] = lsf.beta_linear(c[static_cast<std::size_t>(t)], k);
        }
        if (mode == PostMode::pond) {
            out(k) = ponderate(preds, betas);
        } else {
            // At least `need` votes clear tau iff the need-th largest prediction does.
            std::nth_element(preds.begin(), preds.begin() + (need - 1), preds.end(), std::greater<>());
            out(k) = preds[static_cast<std::size_t>(need - 1)];
        }
    }
    return out;
}

DetectionResult detect_decentralized(const SlpModel& model, const AccessSlot& slot,
                                     const ClusterAssignment& clusters, const LargeScaleMap& lsf,
                                     PostMode mode, double tau, MajorityRule rule) {
    if (model.config().num_devices != slot.activity.num_devices())
        throw MismatchError("model and slot disagree on K");
    return detect_decentralized(per_ap_predictions(model, slot), clusters, lsf, mode, tau, rule);
}

DetectionResult detect_decentralized(const Eigen::MatrixXd& per_ap, const ClusterAssignment& clusters,
                                     const LargeScaleMap& lsf, PostMode mode, double tau, MajorityRule rule) {
    DetectionResult r;
    r.tau = tau;
    if (mode == PostMode::pond) {
        r.strategy = "decentralized-pond";
        r.scores = decentralized_scores(per_ap, clusters, lsf, mode, rule);
        r.decisions = hard_decision(std::span<const double>(r.scores.data(), static_cast<std::size_t>(r.scores.size())), tau);
        return r;
    }
    r.strategy = "decentralized-fusion";
    const auto K = static_cast<int>(per_ap.rows());
    check_clusters(clusters, K, static_cast<int>(per_ap.cols()));
    r.scores.resize(K);
    r.decisions.resize(static_cast<std::size_t>(K));
    std::vector<double> preds;
    for (int k = 0; k < K; ++k) {
        preds.clear();
        for (int m : clusters.members[static_cast<std::size_t>(k)]) preds.push_back(per_ap(k, m));
        const auto votes = hard_decision(preds, tau);
        r.scores(k) = static_cast<double>(std::count(votes.begin(), votes.end(), 1)) / static_cast<double>(votes.size());
        r.decisions[static_cast<std::size_t>(k)] = fuse_majority(votes, rule) ? 1 : 0;
    }
    return r;
}

Eigen::VectorXd centralized_scores(const SlpModel& model, const AccessSlot& slot,
                                   const ClusterAssignment& clusters) {
    const auto& cfg = model.config();
    const int K = cfg.num_devices;
    if (K != slot.activity.num_devices()) throw MismatchError("model and slot disagree on K");
    if (cfg.cluster_inputs != clusters.cluster_size)
        throw MismatchError("centralized model expects T=" + std::to_string(cfg.cluster_inputs) +
                            " inputs, clusters have T=" + std::to_string(clusters.cluster_size));
    check_clusters(clusters, K, slot.num_aps);
    const Eigen::MatrixXd F = hidden_features(model, slot_inputs(slot, cfg.input_scaling));
    const auto W = model.output_weight();
    const auto b = model.output_bias();
    const int V = cfg.hidden_width;
    Eigen::VectorXd out(K);
    for (int k = 0; k < K; ++k) {
        double z = b(k);
        const auto& c = clusters.members[static_cast<std::size_t>(k)];
        for (int t = 0; t < cfg.cluster_inputs; ++t)
            z += W.row(k).segment(static_cast<Eigen::Index>(t) * V, V).dot(F.col(c[static_cast<std::size_t>(t)]));
        out(k) = sigmoid(z);
    }
    return out;
}

DetectionResult detect_centralized(const SlpModel& model, const AccessSlot& slot,
                                   const ClusterAssignment& clusters, double tau) {
    DetectionResult r;
    r.tau = tau;
    r.strategy = "centralized";
    r.scores = centralized_scores(model, slot, clusters);
    r.decisions = hard_decision(std::span<const double>(r.scores.data(), static_cast<std::size_t>(r.scores.size())), tau);
    return r;
}

namespace {

void fill_label(Eigen::MatrixXd& labels, Eigen::Index col, const ActivityVector& a) {
    for (int k = 0; k < a.num_devices(); ++k) labels(k, col) = a.a[static_cast<std::size_t>(k)];
}

} // namespace

TrainingSet decentralized_training_set(std::span<const AccessSlot> slots, InputScaling scaling,
                                       int aps_per_slot, std::uint64_t first_slot) {
    if (slots.empty()) throw ConfigError("training set: no slots");
    const int M = slots.front().num_aps;
    const int per = aps_per_slot <= 0 ? M : std::min(aps_per_slot, M);
    const int K = slots.front().activity.num_devices();
    const auto n = static_cast<Eigen::Index>(slots.size()) * per;
    TrainingSet set;
    set.inputs.emplace_back(2 * slots.front().pilot_len * slots.front().num_antennas, n);
    set.labels.resize(K, n);
    Eigen::Index col = 0;
    std::uint64_t next_ap = per == M ? 0 : first_slot * static_cast<std::uint64_t>(per);
    for (const auto& slot : slots) {
        for (int j = 0; j < per; ++j, ++col) {
            const int m = static_cast<int>(next_ap++ % static_cast<std::uint64_t>(M));
            set.inputs[0].col(col) = flatten_signal(slot.block(m));
            fill_label(set.labels, col, slot.activity);
        }
        if (per == M) next_ap = 0;
    }
    scale_inputs(set.inputs[0], scaling);
    return set;
}

TrainingSet single_ap_training_set(std::span<const AccessSlot> slots, InputScaling scaling, int ap) {
    if (slots.empty()) throw ConfigError("training set: no slots");
    if (ap < 0 || ap >= slots.front().num_aps) throw ConfigError("training set: AP index out of range");
    const int K = slots.front().activity.num_devices();
    const auto n = static_cast<Eigen::Index>(slots.size());
    TrainingSet set;
    set.inputs.emplace_back(2 * slots.front().pilot_len * slots.front().num_antennas, n);
    set.labels.resize(K, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        const auto& slot = slots[static_cast<std::size_t>(col)];
        set.inputs[0].col(col) = flatten_signal(slot.block(ap));
        fill_label(set.labels, col, slot.activity);
    }
    scale_inputs(set.inputs[0], scaling);
    return set;
}

TrainingSet centralized_training_set(std::span<const AccessSlot> slots, const ClusterAssignment& clusters,
                                     InputScaling scaling, int devices_per_slot, std::uint64_t seed,
                                     std::uint64_t first_slot) {
    if (slots.empty()) throw ConfigError("training set: no slots");
    const int K = slots.front().activity.num_devices();
    check_clusters(clusters, K, slots.front().num_aps);
    const int per = std::clamp(devices_per_slot, 1, K);
    const int T = clusters.cluster_size;
    const auto n = static_cast<Eigen::Index>(slots.size()) * per;
    const auto dim = 2 * slots.front().pilot_len * slots.front().num_antennas;
    TrainingSet set;
    for (int t = 0; t < T; ++t) set.inputs.emplace_back(dim, n);
    set.labels.resize(K, n);
    std::vector<int> devices(static_cast<std::size_t>(K));
    Eigen::Index col = 0;
    for (std::size_t s = 0; s < slots.size(); ++s) {
        auto rng = make_engine(seed, "central_devices", first_slot + s);
        std::iota(devices.begin(), devices.end(), 0);
        for (int j = 0; j < per; ++j, ++col) {
            std::uniform_int_distribution<int> pick(j, K - 1);
            std::swap(devices[static_cast<std::size_t>(j)], devices[static_cast<std::size_t>(pick(rng))]);
            const auto& c = clusters.members[static_cast<std::size_t>(devices[static_cast<std::size_t>(j)])];
            for (int t = 0; t < T; ++t)
                set.inputs[static_cast<std::size_t>(t)].col(col) = flatten_signal(slots[s].block(c[static_cast<std::size_t>(t)]));
            fill_label(set.labels, col, slots[s].activity);
        }
    }
    for (auto& X : set.inputs) scale_inputs(X, scaling);
    return set;
}

void append_samples(TrainingSet& a, const TrainingSet& b) {
    if (a.inputs.empty()) {
        a = b;
        return;
    }
    if (a.inputs.size() != b.inputs.size() || a.labels.rows() != b.labels.rows())
        throw MismatchError("append_samples: incompatible sets");
    const Eigen::Index n = a.labels.cols(), extra = b.labels.cols();
    for (std::size_t t = 0; t < a.inputs.size(); ++t) {
        a.inputs[t].conservativeResize(Eigen::NoChange, n + extra);
        a.inputs[t].rightCols(extra) = b.inputs[t];
    }
    a.labels.conservativeResize(Eigen::NoChange, n + extra);
    a.labels.rightCols(extra) = b.labels;
}

std::uint64_t fronthaul_bytes_decentralized(int num_aps, int num_devices) {
    return 4ULL * static_cast<std::uint64_t>(num_aps) * static_cast<std::uint64_t>(num_devices);
}

std::uint64_t fronthaul_bytes_centralized(int num_aps, int pilot_len, int num_antennas) {
    return 4ULL * 2ULL * static_cast<std::uint64_t>(num_aps) * static_cast<std::uint64_t>(pilot_len) *
           static_cast<std::uint64_t>(num_antennas);
}

} // namespace gfad
