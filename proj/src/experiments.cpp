#include "gfad/experiments.hpp"

#include "gfad/error.hpp"
#include "gfad/rng.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <numeric>

namespace gfad {

Method parse_method(std::string_view name) {
    if (name == "slp-pond") return Method::slp_pond;
    if (name == "slp-fusion") return Method::slp_fusion;
    if (name == "slp-central") return Method::slp_central;
    if (name == "ista") return Method::ista;
    if (name == "fista") return Method::fista;
    if (name == "amp") return Method::amp;
    throw ConfigError("unknown method '" + std::string(name) +
                      "' (expected slp-pond|slp-fusion|slp-central|ista|fista|amp)");
}

std::string_view to_string(Method m) {
    switch (m) {
    case Method::slp_pond: return "slp-pond";
    case Method::slp_fusion: return "slp-fusion";
    case Method::slp_central: return "slp-central";
    case Method::ista: return "ista";
    case Method::fista: return "fista";
    case Method::amp: return "amp";
    }
    return "?";
}

bool is_learned(Method m) { return m == Method::slp_pond || m == Method::slp_fusion || m == Method::slp_central; }

std::vector<Method> parse_methods(std::string_view csv) {
    std::vector<Method> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto comma = csv.find(',', pos);
        out.push_back(parse_method(csv.substr(pos, comma == std::string_view::npos ? csv.npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

namespace {

Algorithm algorithm_of(Method m) {
    switch (m) {
    case Method::ista: return Algorithm::ista;
    case Method::fista: return Algorithm::fista;
    case Method::amp: return Algorithm::amp;
    default: throw ConfigError("not a baseline method");
    }
}

} // namespace

void for_each_chunk(const RunConfig& cfg, const ScenarioInstance& inst, Partition part, int num_slots,
                    const std::function<void(std::span<const AccessSlot>, std::uint64_t)>& fn, int chunk) {
    for (int first = 0; first < num_slots; first += chunk) {
        const int n = std::min(chunk, num_slots - first);
        const auto slots = generate_slots(cfg.scenario, inst, cfg.seed, part, static_cast<std::uint64_t>(first), n);
        fn(slots, static_cast<std::uint64_t>(first));
    }
}

ScenarioInstance instance_of(const AccessSlotDataset& ds) {
    ScenarioInstance inst;
    inst.topology = ds.topology;
    inst.lsf = ds.lsf;
    inst.codebook = ds.codebook;
    if (!ds.slots.empty()) inst.tx_power_w = ds.slots.front().tx_power_w;
    return inst;
}

TrainingSet build_training_set(const RunConfig& cfg, const ClusterAssignment& clusters, Strategy strategy,
                               std::span<const AccessSlot> slots, std::uint64_t first_slot,
                               std::optional<int> aps_per_slot) {
    if (strategy == Strategy::decentralized)
        return decentralized_training_set(slots, cfg.input_scaling, aps_per_slot.value_or(cfg.train_aps_per_slot),
                                          first_slot);
    return centralized_training_set(slots, clusters, cfg.input_scaling, cfg.central_devices_per_slot,
                                    derive_seed(cfg.seed, "central_samples"), first_slot);
}

TrainResult fit_detector(const RunConfig& cfg, const ModelConfig& model_cfg, const TrainingSet& all,
                         const TrainConfig& train_cfg, std::optional<int> ap) {
    const std::uint64_t root = ap ? derive_seed(cfg.seed, "ap_model", static_cast<std::uint64_t>(*ap)) : cfg.seed;
    TrainConfig tc = train_cfg;
    tc.seed = derive_seed(root, "train", static_cast<std::uint64_t>(model_cfg.cluster_inputs));
    auto [tr, val] = split_validation(all, tc.validation_fraction, tc.seed);
    SlpModel model = SlpModel::initialized(
        model_cfg, derive_seed(root, "model_init", static_cast<std::uint64_t>(model_cfg.cluster_inputs)));
    model.config_hash = config_hash(cfg);
    return train(std::move(model), tr, val, tc);
}

TrainResult train_detector(const RunConfig& cfg, const ScenarioInstance& inst, Strategy strategy,
                           std::optional<int> num_slots) {
    const int T = strategy == Strategy::decentralized ? 1 : cfg.effective_cluster_size();
    const auto clusters = select_clusters(inst.lsf, cfg.effective_cluster_size());
    TrainingSet all;
    for_each_chunk(cfg, inst, Partition::train, num_slots.value_or(cfg.train_slots),
                   [&](std::span<const AccessSlot> slots, std::uint64_t first) {
                       append_samples(all, build_training_set(cfg, clusters, strategy, slots, first));
                   });
    return fit_detector(cfg, cfg.model_config(T), all, cfg.train);
}

std::vector<TrainResult> train_per_ap_detectors(const RunConfig& cfg, const ScenarioInstance& inst,
                                                std::optional<int> num_slots) {
    const int M = inst.topology.num_aps();
    std::vector<TrainingSet> sets(static_cast<std::size_t>(M));
    for_each_chunk(cfg, inst, Partition::train, num_slots.value_or(cfg.train_slots),
                   [&](std::span<const AccessSlot> slots, std::uint64_t) {
                       for (int m = 0; m < M; ++m)
                           append_samples(sets[static_cast<std::size_t>(m)],
                                          single_ap_training_set(slots, cfg.input_scaling, m));
                   });
    std::vector<TrainResult> out;
    for (int m = 0; m < M; ++m) {
        out.push_back(fit_detector(cfg, cfg.model_config(1), sets[static_cast<std::size_t>(m)], cfg.train, m));
        sets[static_cast<std::size_t>(m)] = {};
    }
    return out;
}

void score_slots(const RunConfig& cfg, const ScenarioInstance& inst, const ClusterAssignment& clusters,
                 Method method, const Detectors& detectors, std::span<const AccessSlot> slots, ScorePool& pool) {
    for (const auto& slot : slots) {
        Eigen::VectorXd s;
        switch (method) {
        case Method::slp_pond:
        case Method::slp_fusion: {
            if (!detectors.decentralized && detectors.per_ap.empty())
                throw ConfigError("no decentralized model available");
            const Eigen::MatrixXd per_ap = detectors.per_ap.empty()
                                               ? per_ap_predictions(*detectors.decentralized, slot)
                                               : per_ap_predictions(detectors.per_ap, slot);
            s = decentralized_scores(per_ap, clusters, inst.lsf,
                                     method == Method::slp_pond ? PostMode::pond : PostMode::fusion, cfg.majority_rule);
            break;
        }
        case Method::slp_central:
            if (!detectors.centralized) throw ConfigError("no centralized model available");
            s = centralized_scores(*detectors.centralized, slot, clusters);
            break;
        default:
            s = baseline_scores(slot, inst.codebook, clusters, inst.lsf, cfg.solver(algorithm_of(method)),
                                cfg.baseline_aggregation);
        }
        pool.add(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), slot.activity.a);
    }
}

RocCurve method_roc(Method method, const ScorePool& pool, int num_taus, BaselineRoc baseline) {
    if (is_learned(method)) return roc_sweep(pool, num_taus);
    if (baseline == BaselineRoc::raw) return roc_exact(pool);
    ScorePool normalized;
    normalized.scores = rank_normalize(pool.scores);
    normalized.truth = pool.truth;
    return roc_sweep(normalized, num_taus);
}

std::vector<MethodResult> run_methods(const RunConfig& cfg, std::span<const Method> methods) {
    cfg.validate();
    const ScenarioInstance inst = make_scenario(cfg.scenario, cfg.seed);
    const auto clusters = select_clusters(inst.lsf, cfg.effective_cluster_size());
    Detectors det;
    std::optional<TrainReport> dec_report, cen_report;
    const auto wants = [&](auto pred) { return std::any_of(methods.begin(), methods.end(), pred); };
    const bool wants_dec = wants([](Method m) { return m == Method::slp_pond || m == Method::slp_fusion; });
    if (wants_dec && cfg.decentralized_models == ModelSharing::per_ap) {
        for (auto& r : train_per_ap_detectors(cfg, inst)) {
            if (!dec_report) dec_report = r.report;
            det.per_ap.push_back(std::move(r.model));
        }
    } else if (wants_dec) {
        auto r = train_detector(cfg, inst, Strategy::decentralized);
        det.decentralized = std::move(r.model);
        dec_report = std::move(r.report);
    }
    if (wants([](Method m) { return m == Method::slp_central; })) {
        auto r = train_detector(cfg, inst, Strategy::centralized);
        det.centralized = std::move(r.model);
        cen_report = std::move(r.report);
    }
    const int baseline_n = cfg.baseline_eval_slots > 0 ? std::min(cfg.baseline_eval_slots, cfg.eval_slots) : cfg.eval_slots;
    std::vector<ScorePool> pools(methods.size());
    for_each_chunk(cfg, inst, Partition::eval, cfg.eval_slots, [&](std::span<const AccessSlot> slots, std::uint64_t first) {
        for (std::size_t i = 0; i < methods.size(); ++i) {
            auto use = slots;
            if (!is_learned(methods[i])) {
                if (first >= static_cast<std::uint64_t>(baseline_n)) continue;
                use = slots.first(std::min<std::size_t>(slots.size(), static_cast<std::size_t>(baseline_n) - first));
            }
            score_slots(cfg, inst, clusters, methods[i], det, use, pools[i]);
        }
    });
    std::vector<MethodResult> out;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        MethodResult r{std::string(to_string(methods[i])), method_roc(methods[i], pools[i], cfg.num_taus, cfg.baseline_roc),
                       std::nullopt};
        const RocCurve exact = roc_exact(pools[i]);
        r.exact_auc = exact.auc;
        r.exact_best_accuracy = exact.best_accuracy();
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t j = 0; j < pools[i].size(); ++j) {
            if (pools[i].truth[j])
                lo = std::min(lo, pools[i].scores[j]);
            else
                hi = std::max(hi, pools[i].scores[j]);
        }
        r.margin = lo - hi;
        if (methods[i] == Method::slp_central)
            r.report = cen_report;
        else if (is_learned(methods[i]))
            r.report = dec_report;
        out.push_back(std::move(r));
    }
    return out;
}

SweepAxis parse_axis(std::string_view name) {
    if (name == "L" || name == "pilot_len") return SweepAxis::pilot_len;
    if (name == "K" || name == "num_devices") return SweepAxis::num_devices;
    if (name == "eps" || name == "sparsity") return SweepAxis::sparsity;
    throw ConfigError("unknown sweep axis '" + std::string(name) + "' (expected L|K|eps)");
}

std::string_view to_string(SweepAxis a) {
    switch (a) {
    case SweepAxis::pilot_len: return "pilot_len";
    case SweepAxis::num_devices: return "num_devices";
    case SweepAxis::sparsity: return "sparsity";
    }
    return "?";
}

std::vector<SweepPoint> run_sweep(SweepAxis axis, std::span<const std::string> values, const RunConfig& base,
                                  std::span<const Method> methods) {
    if (values.empty()) throw ConfigError("sweep: no values given");
    std::vector<SweepPoint> out;
    for (const auto& v : values) {
        RunConfig cfg = base;
        set_config_value(cfg, to_string(axis), v);
        cfg.validate();
        for (auto& r : run_methods(cfg, methods))
            out.push_back({std::string(to_string(axis)), v, r.method, std::move(r.roc), config_hash(cfg), cfg.seed});
    }
    return out;
}

std::vector<ParetoRow> run_pareto(const RunConfig& cfg) {
    cfg.validate();
    const ScenarioInstance inst = make_scenario(cfg.scenario, cfg.seed);
    const auto clusters = select_clusters(inst.lsf, cfg.effective_cluster_size());
    TrainingSet all;
    for_each_chunk(cfg, inst, Partition::train, cfg.pareto_train_slots,
                   [&](std::span<const AccessSlot> slots, std::uint64_t first) {
                       append_samples(all, build_training_set(cfg, clusters, Strategy::decentralized, slots, first, 1));
                   });
    TrainConfig tc = cfg.train;
    tc.max_epochs = cfg.pareto_epochs;
    std::vector<ParetoRow> rows;
    std::vector<ParetoPoint> points;
    for (int v : cfg.pareto_widths)
        for (int z : cfg.pareto_depths) {
            RunConfig c = cfg;
            c.hidden_width = v;
            c.hidden_layers = z;
            const auto r = fit_detector(cfg, c.model_config(1), all, tc);
            rows.push_back({v, z, r.report.param_count, r.report.min_train_loss(), false});
            points.push_back({static_cast<double>(r.report.param_count), r.report.min_train_loss(),
                              static_cast<int>(rows.size() - 1)});
        }
    for (const auto& p : pareto_front(points)) rows[static_cast<std::size_t>(p.tag)].on_front = true;
    return rows;
}

TimingRow time_method(const std::string& label, std::span<const AccessSlot> slots, int warmup, int reps,
                      const std::function<void(const AccessSlot&)>& fn) {
    if (slots.empty() || reps < 1) throw ConfigError("timing: need slots and repetitions");
    using clock = std::chrono::steady_clock;
    for (int w = 0; w < warmup; ++w)
        for (const auto& s : slots) fn(s);
    std::vector<double> per_slot;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock::now();
        for (const auto& s : slots) fn(s);
        const std::chrono::duration<double> dt = clock::now() - t0;
        per_slot.push_back(dt.count() / static_cast<double>(slots.size()));
    }
    TimingRow row;
    row.method = label;
    row.reps = reps;
    row.mean_s = std::accumulate(per_slot.begin(), per_slot.end(), 0.0) / reps;
    std::sort(per_slot.begin(), per_slot.end());
    const auto n = per_slot.size();
    row.median_s = n % 2 ? per_slot[n / 2] : 0.5 * (per_slot[n / 2 - 1] + per_slot[n / 2]);
    return row;
}

std::vector<TimingRow> bench_timing(const RunConfig& cfg, const ScenarioInstance& inst,
                                    std::span<const Method> methods, const Detectors& detectors,
                                    std::span<const AccessSlot> slots) {
    const auto clusters = select_clusters(inst.lsf, cfg.effective_cluster_size());
    std::vector<TimingRow> rows;
    volatile double sink = 0.0;
    const int K = inst.codebook.num_devices();
    rows.push_back(time_method("constant", slots, cfg.bench_warmup, cfg.bench_reps, [&](const AccessSlot&) {
        const Eigen::VectorXd s = Eigen::VectorXd::Constant(K, 0.5);
        sink = sink + hard_decision(std::span<const double>(s.data(), static_cast<std::size_t>(K)), 0.5).size();
    }));
    for (Method m : methods) {
        std::function<void(const AccessSlot&)> fn;
        switch (m) {
        case Method::slp_pond:
        case Method::slp_fusion: {
            if (!detectors.decentralized && detectors.per_ap.empty()) throw ConfigError("bench: no decentralized model");
            const PostMode mode = m == Method::slp_pond ? PostMode::pond : PostMode::fusion;
            fn = [&, mode](const AccessSlot& s) {
                const Eigen::MatrixXd p = detectors.per_ap.empty() ? per_ap_predictions(*detectors.decentralized, s)
                                                                   : per_ap_predictions(detectors.per_ap, s);
                sink = sink + detect_decentralized(p, clusters, inst.lsf, mode, 0.5, cfg.majority_rule).decisions.size();
            };
            break;
        }
        case Method::slp_central:
            if (!detectors.centralized) throw ConfigError("bench: no centralized model");
            fn = [&](const AccessSlot& s) {
                sink = sink + detect_centralized(*detectors.centralized, s, clusters, 0.5).decisions.size();
            };
            break;
        default: {
            const SolverConfig sc = cfg.solver(algorithm_of(m));
            fn = [&, sc](const AccessSlot& s) {
                sink = sink + baseline_scores(s, inst.codebook, clusters, inst.lsf, sc, cfg.baseline_aggregation)(0);
            };
        }
        }
        rows.push_back(time_method(std::string(to_string(m)), slots, cfg.bench_warmup, cfg.bench_reps, fn));
    }
    return rows;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os.precision(17);
    return os;
}

} // namespace

void write_roc_csv(const std::filesystem::path& path, const std::vector<std::pair<std::string, RocCurve>>& curves) {
    auto os = open_csv(path);
    os << "method,tau,p_fa,p_d\n";
    for (const auto& [label, c] : curves)
        for (const auto& p : c.points) os << label << ',' << p.tau << ',' << p.p_fa << ',' << p.p_d << '\n';
}

void write_auc_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points) {
    auto os = open_csv(path);
    os << "axis,value,method,auc,best_accuracy,config_hash,seed\n";
    for (const auto& p : points)
        os << p.axis << ',' << p.value << ',' << p.method << ',' << p.roc.auc << ',' << p.roc.best_accuracy() << ','
           << p.config_hash << ',' << p.seed << '\n';
}

void write_cdf_csv(const std::filesystem::path& path, const SnrCdf& cdf) {
    auto os = open_csv(path);
    os << "snr_db,cdf\n";
    for (std::size_t i = 0; i < cdf.snr_db.size(); ++i) os << cdf.snr_db[i] << ',' << cdf.cdf[i] << '\n';
}

void write_pareto_csv(const std::filesystem::path& path, const std::vector<ParetoRow>& rows) {
    auto os = open_csv(path);
    os << "v,z,params,train_loss,pareto_flag\n";
    for (const auto& r : rows)
        os << r.width << ',' << r.depth << ',' << r.params << ',' << r.train_loss << ',' << (r.on_front ? 1 : 0) << '\n';
}

void write_timing_csv(const std::filesystem::path& path, const std::vector<TimingRow>& rows) {
    auto os = open_csv(path);
    os << "method,median_s,mean_s,reps\n";
    for (const auto& r : rows) os << r.method << ',' << r.median_s << ',' << r.mean_s << ',' << r.reps << '\n';
}

void write_sidecar(const std::filesystem::path& path, const RunConfig& cfg, const std::string& command) {
    std::ofstream os(path.string() + ".meta");
    if (!os) throw IoError("cannot write " + path.string() + ".meta");
    os << "command = " << command << '\n' << "config_hash = " << config_hash(cfg) << '\n' << "seed = " << cfg.seed << '\n';
}

} // namespace gfad
