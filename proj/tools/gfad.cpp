// Command-line front end: gfad <subcommand> [options].

#include "gfad/dataset_io.hpp"
#include "gfad/error.hpp"
#include "gfad/experiments.hpp"
#include "gfad/model_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace gfad;

namespace {

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::config: return 2;
    case ErrorKind::io: return 3;
    case ErrorKind::numeric: return 4;
    case ErrorKind::mismatch: return 5;
    case ErrorKind::placement: return 6;
    case ErrorKind::domain: return 7;
    }
    return 1;
}

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::uint64_t seed = 1;
    bool seed_given = false;
    std::string out = "out";
};

RunConfig load_config(const Common& c) {
    RunConfig cfg = c.config_path.empty() ? parse_config_text("") : parse_config(c.config_path);
    for (const auto& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (c.seed_given) cfg.seed = c.seed;
    cfg.validate();
    for (const auto& w : cfg.warnings()) std::cerr << "warning: " << w << '\n';
    return cfg;
}

fs::path prepare_out(const Common& c, const RunConfig& cfg) {
    const fs::path out(c.out);
    fs::create_directories(out);
    std::ofstream os(out / "config.txt");
    if (!os) throw IoError("cannot write " + (out / "config.txt").string());
    os << emit_config(cfg);
    return out;
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, "Configuration file (key = value)");
    app->add_option("--set", c.overrides, "Override a configuration key (key=value), repeatable");
    app->add_option_function<std::uint64_t>(
        "--seed", [&c](const std::uint64_t& s) { c.seed = s, c.seed_given = true; }, "Master seed");
    app->add_option("--out", c.out, "Output directory")->capture_default_str();
}

ClusterAssignment clusters_for(const RunConfig& cfg, const LargeScaleMap& lsf) {
    return select_clusters(lsf, std::min(cfg.cluster_size, static_cast<int>(lsf.beta_linear.rows())));
}

std::string command_line(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
    return s;
}

void report_curve(const std::string& label, const RocCurve& c, const ScorePool* pool = nullptr) {
    std::cout << label << ": auc=" << c.auc;
    if (pool) std::cout << " exact_auc=" << roc_exact(*pool).auc;
    std::cout << " best_accuracy=" << c.best_accuracy() << " at tau=" << c.best_accuracy_tau() << '\n';
}

fs::path per_ap_model_path(const fs::path& dir, int m) { return dir / ("model_ap" + std::to_string(m) + ".cfmd"); }

// A directory holds per-AP models model_ap<m>.cfmd; a file is one shared model.
Detectors load_decentralized(const fs::path& path) {
    Detectors d;
    if (!fs::is_directory(path)) {
        d.decentralized = load_model(path);
        return d;
    }
    for (int m = 0; fs::exists(per_ap_model_path(path, m)); ++m) d.per_ap.push_back(load_model(per_ap_model_path(path, m)));
    if (d.per_ap.empty()) throw IoError("no model_ap<m>.cfmd files in " + path.string());
    return d;
}

void write_train_log(std::ostream& os, const TrainReport& r, const std::string& prefix) {
    for (std::size_t e = 0; e < r.train_loss.size(); ++e)
        os << prefix << e + 1 << ',' << r.train_loss[e] << ',' << (e < r.val_loss.size() ? r.val_loss[e] : 0.0) << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grant-free activity detection workbench"};
    app.require_subcommand(1);
    Common common;
    const std::string cmdline = command_line(argc, argv);

    auto* gen = app.add_subcommand("generate", "Generate a CFAD dataset");
    add_common(gen, common);
    std::string partition = "train";
    int slots = 0;
    gen->add_option("--partition", partition, "train or eval")->check(CLI::IsMember({"train", "eval"}));
    gen->add_option("--slots", slots, "Number of slots (default: train_slots or eval_slots)");

    auto* trn = app.add_subcommand("train", "Train an SLP detector on a dataset");
    add_common(trn, common);
    std::string data, strategy = "decentralized";
    std::optional<int> hidden, layers;
    trn->add_option("--data", data, "Training dataset (CFAD)")->required();
    trn->add_option("--strategy", strategy)->check(CLI::IsMember({"decentralized", "centralized"}));
    trn->add_option("--hidden", hidden, "Hidden width V");
    trn->add_option("--layers", layers, "Hidden layers Z");

    auto* det = app.add_subcommand("detect", "Evaluate an SLP detector (roc.csv)");
    add_common(det, common);
    std::string model_path, post;
    std::optional<int> taus;
    det->add_option("--model", model_path, "Model (CFMD), or a directory of per-AP models")->required();
    det->add_option("--data", data, "Evaluation dataset (CFAD)")->required();
    det->add_option("--post", post, "fusion or pond (decentralized models)")->check(CLI::IsMember({"fusion", "pond"}));
    det->add_option("--taus", taus, "Number of thresholds");

    auto* base = app.add_subcommand("baseline", "Evaluate ISTA, FISTA or AMP (roc.csv)");
    add_common(base, common);
    std::string algo = "ista";
    std::optional<int> iters;
    base->add_option("--data", data, "Evaluation dataset (CFAD)")->required();
    base->add_option("--algo", algo)->check(CLI::IsMember({"ista", "fista", "amp"}));
    base->add_option("--iters", iters, "Iterations (default 235 / 100 / 18)");
    base->add_option("--taus", taus, "Number of thresholds");

    auto* cdf = app.add_subcommand("snr-cdf", "Dominant-AP SNR CDF (cdf.csv)");
    add_common(cdf, common);

    auto* par = app.add_subcommand("pareto", "V x Z grid (pareto.csv)");
    add_common(par, common);

    auto* swp = app.add_subcommand("sweep", "Sweep L, K or eps (roc.csv, auc.csv)");
    add_common(swp, common);
    std::string axis, methods_csv = "slp-pond,slp-fusion,slp-central,ista,fista,amp";
    std::vector<std::string> values;
    swp->add_option("--axis", axis, "L, K or eps")->required()->check(CLI::IsMember({"L", "K", "eps"}));
    swp->add_option("--values", values, "Axis values")->required()->delimiter(',');
    swp->add_option("--methods", methods_csv, "Comma-separated methods")->capture_default_str();

    auto* bch = app.add_subcommand("bench", "Per-slot inference timing (timing.csv)");
    add_common(bch, common);
    std::string central_path;
    std::string bench_methods = "slp-pond,slp-fusion,slp-central,ista,fista,amp";
    bch->add_option("--model", model_path,
                    "Decentralized model or per-AP model directory (trained from the config if absent)");
    bch->add_option("--central-model", central_path, "Centralized model (trained from the config if absent)");
    bch->add_option("--methods", bench_methods, "Comma-separated methods")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        const RunConfig cfg = load_config(common);
        const fs::path out = prepare_out(common, cfg);

        if (gen->parsed()) {
            const Partition part = partition == "eval" ? Partition::eval : Partition::train;
            const int n = slots > 0 ? slots : (part == Partition::eval ? cfg.eval_slots : cfg.train_slots);
            const auto ds = generate_dataset(cfg.scenario, n, cfg.seed, part, config_hash(cfg));
            const fs::path file = out / (partition + ".cfad");
            save_dataset(ds, file);
            std::cout << "wrote " << file.string() << " (" << n << " slots)\n";
        } else if (trn->parsed()) {
            RunConfig c = cfg;
            if (hidden) c.hidden_width = *hidden;
            if (layers) c.hidden_layers = *layers;
            c.validate();
            const auto ds = load_dataset(data);
            const Strategy s = strategy == "centralized" ? Strategy::centralized : Strategy::decentralized;
            const auto clusters = clusters_for(c, ds.lsf);
            const int T = s == Strategy::decentralized ? 1 : clusters.cluster_size;
            ModelConfig mc = ModelConfig::for_signal(ds.pilot_len(), ds.num_antennas(), c.hidden_layers,
                                                     c.hidden_width, ds.num_devices(), T);
            mc.input_scaling = c.input_scaling;
            std::ofstream log(out / "train_log.csv");
            log.precision(17);
            if (s == Strategy::decentralized && c.decentralized_models == ModelSharing::per_ap) {
                log << "ap,epoch,train_loss,val_loss\n";
                for (int m = 0; m < ds.num_aps(); ++m) {
                    auto r = fit_detector(c, mc, single_ap_training_set(ds.slots, c.input_scaling, m), c.train, m);
                    const fs::path file = per_ap_model_path(out, m);
                    save_model(r.model, file);
                    write_sidecar(file, c, cmdline);
                    write_train_log(log, r.report, std::to_string(m) + ",");
                    std::cout << "wrote " << file.string() << " (stopped at epoch " << r.report.stopped_epoch
                              << ", best validation loss " << r.report.best_val_loss() << ")\n";
                }
            } else {
                auto r = fit_detector(c, mc, build_training_set(c, clusters, s, ds.slots, 0), c.train);
                const fs::path file = out / "model.cfmd";
                save_model(r.model, file);
                write_sidecar(file, c, cmdline);
                log << "epoch,train_loss,val_loss\n";
                write_train_log(log, r.report, "");
                std::cout << "wrote " << file.string() << " (" << r.report.param_count
                          << " parameters, stopped at epoch " << r.report.stopped_epoch << ", best validation loss "
                          << r.report.best_val_loss() << ")\n";
            }
        } else if (det->parsed()) {
            const auto ds = load_dataset(data);
            const auto inst = instance_of(ds);
            Detectors d = load_decentralized(model_path);
            const SlpModel& model = d.per_ap.empty() ? *d.decentralized : d.per_ap.front();
            for (const auto& pm : d.per_ap) require_compatible(pm.config(), ds.num_devices(), ds.pilot_len(), ds.num_antennas());
            require_compatible(model.config(), ds.num_devices(), ds.pilot_len(), ds.num_antennas());
            if (!d.per_ap.empty() && static_cast<int>(d.per_ap.size()) != ds.num_aps())
                throw MismatchError(std::to_string(d.per_ap.size()) + " per-AP models for " +
                                    std::to_string(ds.num_aps()) + " APs");
            const int model_T = model.config().cluster_inputs;
            Method m = Method::slp_central;
            if (model_T == 1) {
                const bool fusion = post.empty() ? cfg.post_mode == PostMode::fusion : post == "fusion";
                m = fusion ? Method::slp_fusion : Method::slp_pond;
            } else {
                d.centralized = std::move(d.decentralized);
                d.decentralized.reset();
            }
            ClusterAssignment clusters = clusters_for(cfg, ds.lsf);
            if (m == Method::slp_central) clusters = select_clusters(ds.lsf, model_T);
            ScorePool pool;
            score_slots(cfg, inst, clusters, m, d, ds.slots, pool);
            const auto curve = method_roc(m, pool, taus.value_or(cfg.num_taus));
            const std::string label(to_string(m));
            write_roc_csv(out / "roc.csv", {{label, curve}});
            write_sidecar(out / "roc.csv", cfg, cmdline);
            write_auc_csv(out / "auc.csv", {{"", "", label, curve, ds.config_hash, ds.master_seed}});
            report_curve(label, curve, &pool);
        } else if (base->parsed()) {
            RunConfig c = cfg;
            const Algorithm a = parse_algorithm(algo);
            const int t = iters.value_or(default_iterations(a));
            (a == Algorithm::ista ? c.ista_iters : a == Algorithm::fista ? c.fista_iters : c.amp_iters) = t;
            const auto ds = load_dataset(data);
            const auto inst = instance_of(ds);
            const Method m = parse_method(algo);
            ScorePool pool;
            score_slots(c, inst, clusters_for(c, ds.lsf), m, {}, ds.slots, pool);
            const auto curve = method_roc(m, pool, taus.value_or(c.num_taus), c.baseline_roc);
            write_roc_csv(out / "roc.csv", {{algo, curve}});
            write_sidecar(out / "roc.csv", c, cmdline);
            write_auc_csv(out / "auc.csv", {{"", "", algo, curve, ds.config_hash, ds.master_seed}});
            report_curve(algo, curve, &pool);
        } else if (cdf->parsed()) {
            const auto inst = make_scenario(cfg.scenario, cfg.seed);
            const auto c = snr_cdf(inst.lsf, inst.tx_power_w, cfg.scenario.noise_var_w(), cfg.scenario.coverage_fraction);
            write_cdf_csv(out / "cdf.csv", c);
            write_sidecar(out / "cdf.csv", cfg, cmdline);
            std::cout << "SNR target (CDF = " << 1.0 - cfg.scenario.coverage_fraction << "): " << c.target_db << " dB\n";
        } else if (par->parsed()) {
            const auto rows = run_pareto(cfg);
            write_pareto_csv(out / "pareto.csv", rows);
            write_sidecar(out / "pareto.csv", cfg, cmdline);
            for (const auto& r : rows)
                std::cout << "V=" << r.width << " Z=" << r.depth << " params=" << r.params << " loss=" << r.train_loss
                          << (r.on_front ? " (front)" : "") << '\n';
        } else if (swp->parsed()) {
            const auto methods = parse_methods(methods_csv);
            const auto points = run_sweep(parse_axis(axis), values, cfg, methods);
            std::vector<std::pair<std::string, RocCurve>> curves;
            for (const auto& p : points) curves.emplace_back(p.axis + "=" + p.value + "/" + p.method, p.roc);
            write_roc_csv(out / "roc.csv", curves);
            write_auc_csv(out / "auc.csv", points);
            write_sidecar(out / "roc.csv", cfg, cmdline);
            write_sidecar(out / "auc.csv", cfg, cmdline);
            for (const auto& p : points) report_curve(p.axis + "=" + p.value + " " + p.method, p.roc);
        } else if (bch->parsed()) {
            const auto methods = parse_methods(bench_methods);
            const auto inst = make_scenario(cfg.scenario, cfg.seed);
            Detectors d;
            const auto needs = [&](auto pred) { return std::any_of(methods.begin(), methods.end(), pred); };
            if (needs([](Method m) { return m == Method::slp_pond || m == Method::slp_fusion; })) {
                if (!model_path.empty())
                    d = load_decentralized(model_path);
                else if (cfg.decentralized_models == ModelSharing::per_ap)
                    for (auto& r : train_per_ap_detectors(cfg, inst)) d.per_ap.push_back(std::move(r.model));
                else
                    d.decentralized = train_detector(cfg, inst, Strategy::decentralized).model;
            }
            if (needs([](Method m) { return m == Method::slp_central; }))
                d.centralized = central_path.empty() ? train_detector(cfg, inst, Strategy::centralized).model
                                                     : load_model(central_path);
            const auto slots_eval = generate_slots(cfg.scenario, inst, cfg.seed, Partition::eval, 0, cfg.bench_slots);
            const auto rows = bench_timing(cfg, inst, methods, d, slots_eval);
            write_timing_csv(out / "timing.csv", rows);
            write_sidecar(out / "timing.csv", cfg, cmdline);
            for (const auto& r : rows)
                std::cout << r.method << ": median " << r.median_s << " s/slot, mean " << r.mean_s << " s/slot\n";
        }
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error [io]: " << e.what() << '\n';
        return exit_code(ErrorKind::io);
    }
    return 0;
}
