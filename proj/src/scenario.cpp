#include "gfad/scenario.hpp"

#include "gfad/error.hpp"
#include "gfad/rng.hpp"
#include "gfad/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gfad {

void ScenarioConfig::validate() const {
    geometry.validate();
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError("scenario: " + msg);
    };
    require(num_antennas >= 1, "num_antennas must be >= 1");
    require(pilot_len >= 1, "pilot_len must be >= 1");
    require(sparsity > 0.0 && sparsity < 1.0, "sparsity must lie in (0, 1)");
    require(tx_power_w > 0.0, "tx_power_w must be > 0");
    require(shadow_sigma_db >= 0.0, "shadow_sigma_db must be >= 0");
    require(fading_block_len >= 1, "fading_block_len must be >= 1");
    require(coverage_fraction > 0.0 && coverage_fraction <= 1.0,
            "coverage_fraction must lie in (0, 1]");
    require(!orthonormal_pilots || geometry.num_devices <= pilot_len,
            "orthonormal pilots need num_devices <= pilot_len");
}

double ScenarioConfig::noise_var_w() const { return noiseless ? 0.0 : dbm_to_watts(noise_power_dbm); }

int ActivityVector::num_active() const {
    return static_cast<int>(std::count(a.begin(), a.end(), std::uint8_t{1}));
}

Eigen::Map<const RowMajorXcf> AccessSlot::block(int m) const {
    const std::size_t stride = static_cast<std::size_t>(pilot_len) * num_antennas;
    return {received.data() + stride * static_cast<std::size_t>(m), pilot_len, num_antennas};
}

PilotCodebook generate_pilots(int pilot_len, int num_devices, std::uint64_t seed, bool orthonormal) {
    if (pilot_len < 1 || num_devices < 1) throw ConfigError("pilots: L and K must be >= 1");
    if (orthonormal && num_devices > pilot_len)
        throw ConfigError("pilots: orthonormal codebook needs K <= L");
    auto rng = make_engine(seed, "pilots");
    Eigen::MatrixXcd S(pilot_len, num_devices);
    for (int k = 0; k < num_devices; ++k)
        for (int l = 0; l < pilot_len; ++l) S(l, k) = complex_normal(rng);
    if (orthonormal) {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(S);
        S = qr.householderQ() * Eigen::MatrixXcd::Identity(pilot_len, num_devices);
    }
    const double target = std::sqrt(static_cast<double>(pilot_len));
    for (int k = 0; k < num_devices; ++k) S.col(k) *= target / S.col(k).norm();
    return PilotCodebook{std::move(S)};
}

ActivityVector draw_activity(int num_devices, double epsilon, std::uint64_t seed) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("activity: epsilon must lie in (0, 1)");
    auto rng = make_engine(seed, "activity");
    std::bernoulli_distribution coin(epsilon);
    ActivityVector act;
    act.epsilon = epsilon;
    act.a.resize(static_cast<std::size_t>(num_devices));
    for (auto& bit : act.a) bit = coin(rng) ? 1 : 0;
    return act;
}

AccessSlot synthesize_slot(const PilotCodebook& codebook, const ActivityVector& activity,
                           const LargeScaleMap& lsf, const FadingTensor& ssf,
                           const std::vector<double>& tx_power_w, double noise_var_w,
                           std::uint64_t seed) {
    const int L = codebook.pilot_len();
    const int K = codebook.num_devices();
    const int M = lsf.num_aps();
    if (activity.num_devices() != K || lsf.num_devices() != K ||
        static_cast<int>(tx_power_w.size()) != K || static_cast<int>(ssf.size()) != M)
        throw MismatchError("synthesize_slot: dimension mismatch");
    if (noise_var_w < 0.0) throw ConfigError("synthesize_slot: noise variance must be >= 0");
    const int N = M > 0 ? static_cast<int>(ssf.front().cols()) : 0;

    AccessSlot slot;
    slot.activity = activity;
    slot.tx_power_w = tx_power_w;
    slot.noise_var_w = noise_var_w;
    slot.num_aps = M;
    slot.pilot_len = L;
    slot.num_antennas = N;
    slot.received.resize(static_cast<std::size_t>(M) * L * N);

    std::vector<int> active;
    for (int k = 0; k < K; ++k)
        if (activity.a[static_cast<std::size_t>(k)]) active.push_back(k);

    auto rng = make_engine(seed, "noise");
    Eigen::MatrixXcd Y(L, N);
    std::size_t out = 0;
    for (int m = 0; m < M; ++m) {
        if (ssf[static_cast<std::size_t>(m)].rows() != K || ssf[static_cast<std::size_t>(m)].cols() != N)
            throw MismatchError("synthesize_slot: fading tensor shape mismatch");
        Y.setZero();
        for (int k : active) {
            const double amp = std::sqrt(tx_power_w[static_cast<std::size_t>(k)] * lsf.beta_linear(m, k));
            Y.noalias() += (amp * codebook.S.col(k)) * ssf[static_cast<std::size_t>(m)].row(k);
        }
        if (noise_var_w > 0.0)
            for (int l = 0; l < L; ++l)
                for (int n = 0; n < N; ++n) Y(l, n) += complex_normal(rng, noise_var_w);
        for (int l = 0; l < L; ++l)
            for (int n = 0; n < N; ++n) slot.received[out++] = std::complex<float>(Y(l, n));
    }
    return slot;
}

SnrReport dominant_ap_snr(const LargeScaleMap& lsf, const std::vector<double>& tx_power_w,
                          double noise_var_w, double coverage_fraction, double snr_gain_db) {
    const int K = lsf.num_devices();
    if (static_cast<int>(tx_power_w.size()) != K) throw MismatchError("snr: power vector length");
    SnrReport rep;
    rep.snr_db.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const double best = lsf.beta_linear.col(k).maxCoeff();
        const double snr = tx_power_w[static_cast<std::size_t>(k)] * best / noise_var_w;
        rep.snr_db[static_cast<std::size_t>(k)] = to_db(snr) + snr_gain_db;
    }
    rep.target_db = empirical_quantile(rep.snr_db, 1.0 - coverage_fraction);
    return rep;
}

std::vector<double> transmit_powers(const LargeScaleMap& lsf, const ScenarioConfig& cfg) {
    const int K = lsf.num_devices();
    std::vector<double> rho(static_cast<std::size_t>(K), cfg.tx_power_w);
    if (!cfg.power_control) return rho;
    std::vector<double> best(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) best[static_cast<std::size_t>(k)] = lsf.beta_linear.col(k).maxCoeff();
    const double target_rx = cfg.tx_power_w * empirical_quantile(best, 1.0 - cfg.coverage_fraction);
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = std::min(cfg.tx_power_w, target_rx / best[k]);
    return rho;
}

ScenarioInstance make_scenario(const ScenarioConfig& cfg, std::uint64_t master_seed) {
    cfg.validate();
    ScenarioInstance inst;
    inst.topology = place_network(cfg.geometry, derive_seed(master_seed, "topology"));
    inst.lsf = large_scale_map(inst.topology, cfg.shadow_sigma_db, derive_seed(master_seed, "lsf"));
    inst.codebook = generate_pilots(cfg.pilot_len, cfg.geometry.num_devices,
                                    derive_seed(master_seed, "codebook"), cfg.orthonormal_pilots);
    inst.tx_power_w = transmit_powers(inst.lsf, cfg);
    return inst;
}

namespace {

const char* partition_tag(Partition p) { return p == Partition::train ? "train" : "eval"; }

} // namespace

std::vector<AccessSlot> generate_slots(const ScenarioConfig& cfg, const ScenarioInstance& inst,
                                       std::uint64_t master_seed, Partition part,
                                       std::uint64_t first, int count) {
    const std::uint64_t stream = derive_seed(master_seed, partition_tag(part));
    const SmallScaleBlock ssf(inst.topology.num_aps(), cfg.num_antennas, cfg.geometry.num_devices,
                              cfg.fading_mode, derive_seed(stream, "ssf_stream"),
                              cfg.fading_block_len);
    const double noise = cfg.noise_var_w();
    std::vector<AccessSlot> slots;
    slots.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        const std::uint64_t idx = first + static_cast<std::uint64_t>(i);
        auto act = draw_activity(cfg.geometry.num_devices, cfg.sparsity,
                                 derive_seed(stream, "activity", idx));
        slots.push_back(synthesize_slot(inst.codebook, act, inst.lsf, ssf.at_slot(idx),
                                        inst.tx_power_w, noise, derive_seed(stream, "noise", idx)));
    }
    return slots;
}

AccessSlotDataset generate_dataset(const ScenarioConfig& cfg, int num_slots,
                                   std::uint64_t master_seed, Partition part,
                                   std::uint64_t config_hash) {
    if (num_slots < 1) throw ConfigError("dataset: num_slots must be >= 1");
    auto inst = make_scenario(cfg, master_seed);
    AccessSlotDataset ds;
    ds.slots = generate_slots(cfg, inst, master_seed, part, 0, num_slots);
    ds.topology = std::move(inst.topology);
    ds.lsf = std::move(inst.lsf);
    ds.codebook = std::move(inst.codebook);
    ds.fading_mode = cfg.fading_mode;
    ds.fading_block_len = cfg.fading_block_len;
    ds.sparsity = cfg.sparsity;
    ds.master_seed = master_seed;
    ds.config_hash = config_hash;
    ds.partition = part;
    return ds;
}

} // namespace gfad
