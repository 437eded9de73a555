#include "gfad/error.hpp"
#include "gfad/experiments.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gfad;
namespace fs = std::filesystem;

namespace {

RunConfig tiny() {
    auto c = parse_config_text("num_aps = 4\nnum_devices = 6\npilot_len = 4\ncluster_size = 2\nhidden_width = 8\n"
                               "train_slots = 60\neval_slots = 30\nmax_epochs = 3\nbatch_size = 16\n"
                               "ista_iters = 5\nfista_iters = 5\namp_iters = 3\nnum_taus = 21\n");
    c.seed = 11;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string run_to_csv(const RunConfig& cfg, const fs::path& path) {
    const std::vector<Method> methods{Method::slp_pond, Method::slp_fusion, Method::slp_central, Method::ista,
                                      Method::fista, Method::amp};
    const auto results = run_methods(cfg, methods);
    std::vector<std::pair<std::string, RocCurve>> curves;
    for (const auto& r : results) curves.emplace_back(r.method, r.roc);
    write_roc_csv(path, curves);
    return slurp(path);
}

} // namespace

TEST_CASE("method names") {
    CHECK(parse_methods("slp-pond,amp") == std::vector<Method>{Method::slp_pond, Method::amp});
    CHECK(to_string(Method::slp_central) == "slp-central");
    CHECK(is_learned(Method::slp_fusion));
    CHECK_FALSE(is_learned(Method::fista));
    CHECK_THROWS_AS(parse_method("svm"), ConfigError);
    CHECK(parse_axis("L") == SweepAxis::pilot_len);
    CHECK_THROWS_AS(parse_axis("M"), ConfigError);
}

TEST_CASE("property: identical seeds give byte-identical results") {
    const fs::path dir = fs::temp_directory_path() / "gfad_unit";
    fs::create_directories(dir);
    const auto a = run_to_csv(tiny(), dir / "roc_a.csv");
    const auto b = run_to_csv(tiny(), dir / "roc_b.csv");
    CHECK(!a.empty());
    CHECK(a == b);
    auto other = tiny();
    other.seed = 12;
    CHECK(run_to_csv(other, dir / "roc_c.csv") != a);
}

TEST_CASE("sweep rows carry hash and seed") {
    auto cfg = tiny();
    const std::vector<std::string> values{"4", "6"};
    const std::vector<Method> methods{Method::fista};
    const auto pts = run_sweep(SweepAxis::pilot_len, values, cfg, methods);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].value == "4");
    CHECK(pts[0].seed == 11);
    CHECK(pts[0].config_hash != pts[1].config_hash);
    const fs::path out = fs::temp_directory_path() / "gfad_unit" / "auc.csv";
    write_auc_csv(out, pts);
    CHECK(slurp(out).rfind("axis,value,method,auc,best_accuracy,config_hash,seed\n", 0) == 0);
}

TEST_CASE("pareto rows flag a consistent front") {
    auto cfg = tiny();
    cfg.pareto_widths = {4, 8};
    cfg.pareto_depths = {1, 2};
    cfg.pareto_train_slots = 40;
    cfg.pareto_epochs = 2;
    const auto rows = run_pareto(cfg);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        bool dominated = false;
        for (const auto& o : rows)
            dominated |= (o.params <= r.params && o.train_loss <= r.train_loss) &&
                         (o.params < r.params || o.train_loss < r.train_loss);
        CHECK(r.on_front == !dominated);
        CHECK(r.params == param_count(ModelConfig::for_signal(4, 2, r.depth, r.width, 6, 1)));
    }
}

TEST_CASE("timing rows report per-slot statistics") {
    auto cfg = tiny();
    const auto inst = make_scenario(cfg.scenario, cfg.seed);
    const auto slots = generate_slots(cfg.scenario, inst, cfg.seed, Partition::eval, 0, 4);
    int calls = 0;
    const auto row = time_method("count", slots, 1, 5, [&](const AccessSlot&) { ++calls; });
    CHECK(calls == 24);
    CHECK(row.reps == 5);
    CHECK(row.median_s >= 0.0);
    CHECK_THROWS_AS(time_method("none", {}, 0, 5, [](const AccessSlot&) {}), ConfigError);
}

TEST_CASE("per-AP decentralized models and raw baseline ROC") {
    auto cfg = tiny();
    cfg.decentralized_models = ModelSharing::per_ap;
    cfg.baseline_roc = BaselineRoc::raw;
    const std::vector<Method> methods{Method::slp_pond, Method::fista};
    const auto r = run_methods(cfg, methods);
    REQUIRE(r.size() == 2);
    CHECK(r[0].report.has_value());
    CHECK(r[0].exact_auc > 0.0);
    CHECK(r[1].roc.auc == doctest::Approx(r[1].exact_auc).epsilon(1e-12));
    const auto models = train_per_ap_detectors(cfg, make_scenario(cfg.scenario, cfg.seed));
    REQUIRE(models.size() == 4);
    CHECK(models[0].model.parameters() != models[1].model.parameters());
}
