#include "gfad/config.hpp"

#include "gfad/error.hpp"
#include "gfad/rng.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace gfad {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T v{};
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size())
        throw ConfigError(std::string(key) + ": cannot parse '" + std::string(text) + "' as a number");
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

struct Field {
    std::string name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename Get>
Field real(std::string name, Get ref, double lo, double hi, bool open_lo = false) {
    return {name,
            [=](RunConfig& c, std::string_view v) {
                const double x = parse_number<double>(name, v);
                if (!(open_lo ? x > lo : x >= lo) || !(x <= hi))
                    throw ConfigError(name + ": " + std::string(v) + " is out of range " + (open_lo ? "(" : "[") +
                                      fmt_double(lo) + ", " + fmt_double(hi) + "]");
                ref(c) = x;
            },
            [=](const RunConfig& c) { return fmt_double(ref(const_cast<RunConfig&>(c))); }};
}

template <typename Get>
Field integer(std::string name, Get ref, long long lo, long long hi) {
    return {name,
            [=](RunConfig& c, std::string_view v) {
                const auto x = parse_number<long long>(name, v);
                if (x < lo || x > hi)
                    throw ConfigError(name + ": " + std::string(v) + " is out of range [" + std::to_string(lo) + ", " +
                                      std::to_string(hi) + "]");
                ref(c) = static_cast<std::remove_reference_t<decltype(ref(c))>>(x);
            },
            [=](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}

template <typename Get>
Field flag(std::string name, Get ref) {
    return {name, [=](RunConfig& c, std::string_view v) { ref(c) = parse_bool(name, v); },
            [=](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

template <typename E, typename Get>
Field choice(std::string name, Get ref, std::vector<std::pair<std::string, E>> options) {
    return {name,
            [=](RunConfig& c, std::string_view v) {
                for (const auto& [label, value] : options)
                    if (v == label) {
                        ref(c) = value;
                        return;
                    }
                std::string allowed;
                for (const auto& o : options) allowed += (allowed.empty() ? "" : "|") + o.first;
                throw ConfigError(name + ": unknown value '" + std::string(v) + "' (expected " + allowed + ")");
            },
            [=](const RunConfig& c) {
                for (const auto& [label, value] : options)
                    if (ref(const_cast<RunConfig&>(c)) == value) return label;
                return std::string("?");
            }};
}

template <typename Get>
Field int_list(std::string name, Get ref) {
    return {name,
            [=](RunConfig& c, std::string_view v) {
                std::vector<int> out;
                std::size_t pos = 0;
                while (pos <= v.size()) {
                    const auto comma = v.find(',', pos);
                    const auto item = trim(v.substr(pos, comma == std::string_view::npos ? v.npos : comma - pos));
                    const int x = parse_number<int>(name, item);
                    if (x < 1) throw ConfigError(name + ": entries must be >= 1");
                    out.push_back(x);
                    if (comma == std::string_view::npos) break;
                    pos = comma + 1;
                }
                ref(c) = out;
            },
            [=](const RunConfig& c) {
                std::string s;
                for (int x : ref(const_cast<RunConfig&>(c))) s += (s.empty() ? "" : ",") + std::to_string(x);
                return s;
            }};
}

#define GFAD_REF(expr) [](RunConfig& c) -> auto& { return c.expr; }

const std::vector<Field>& fields() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr long long big = 1LL << 40;
    static const std::vector<Field> table = {
        real("area_side_m", GFAD_REF(scenario.geometry.area_side_m), 0.0, inf, true),
        real("edge_margin_m", GFAD_REF(scenario.geometry.edge_margin_m), 0.0, inf, true),
        real("min_device_ap_dist_m", GFAD_REF(scenario.geometry.min_device_ap_dist_m), 0.0, inf, true),
        real("min_ap_spacing_m", GFAD_REF(scenario.geometry.min_ap_spacing_m), 0.0, inf, true),
        real("ap_height_m", GFAD_REF(scenario.geometry.ap_height_m), 1.0, inf, true),
        real("device_height_m", GFAD_REF(scenario.geometry.device_height_m), 1.0, inf, true),
        real("carrier_freq_hz", GFAD_REF(scenario.geometry.carrier_freq_hz), 0.0, inf, true),
        integer("num_aps", GFAD_REF(scenario.geometry.num_aps), 1, 100000),
        integer("num_devices", GFAD_REF(scenario.geometry.num_devices), 1, 100000),
        choice<TopologyMode>("topology", GFAD_REF(scenario.geometry.topology_mode),
                             {{"cell_free", TopologyMode::cell_free}, {"cellular", TopologyMode::cellular}}),
        integer("num_antennas", GFAD_REF(scenario.num_antennas), 1, 4096),
        integer("pilot_len", GFAD_REF(scenario.pilot_len), 1, 100000),
        real("sparsity", GFAD_REF(scenario.sparsity), 0.0, 1.0, true),
        real("tx_power_w", GFAD_REF(scenario.tx_power_w), 0.0, inf, true),
        real("noise_power_dbm", GFAD_REF(scenario.noise_power_dbm), -inf, inf),
        flag("noiseless", GFAD_REF(scenario.noiseless)),
        real("shadow_sigma_db", GFAD_REF(scenario.shadow_sigma_db), 0.0, inf),
        choice<FadingMode>("fading_mode", GFAD_REF(scenario.fading_mode),
                           {{"per_slot", FadingMode::per_slot}, {"static_block", FadingMode::static_block}}),
        integer("fading_block_len", GFAD_REF(scenario.fading_block_len), 1, big),
        flag("orthonormal_pilots", GFAD_REF(scenario.orthonormal_pilots)),
        flag("power_control", GFAD_REF(scenario.power_control)),
        real("coverage_fraction", GFAD_REF(scenario.coverage_fraction), 0.0, 1.0, true),
        real("snr_gain_db", GFAD_REF(scenario.snr_gain_db), -inf, inf),
        real("coherence_time_s", GFAD_REF(coherence_time_s), 0.0, inf, true),
        real("coherence_bandwidth_hz", GFAD_REF(coherence_bandwidth_hz), 0.0, inf, true),
        real("reserved_fraction", GFAD_REF(reserved_fraction), 0.0, 1.0, true),
        integer("cluster_size", GFAD_REF(cluster_size), 1, 100000),
        choice<Strategy>("strategy", GFAD_REF(strategy),
                         {{"decentralized", Strategy::decentralized}, {"centralized", Strategy::centralized}}),
        choice<PostMode>("post_mode", GFAD_REF(post_mode), {{"pond", PostMode::pond}, {"fusion", PostMode::fusion}}),
        choice<MajorityRule>("majority_rule", GFAD_REF(majority_rule),
                             {{"half", MajorityRule::at_least_half}, {"strict", MajorityRule::strict}}),
        integer("num_taus", GFAD_REF(num_taus), 2, 10000000),
        integer("hidden_width", GFAD_REF(hidden_width), 1, 1000000),
        integer("hidden_layers", GFAD_REF(hidden_layers), 1, 1000),
        choice<InputScaling>("input_scaling", GFAD_REF(input_scaling),
                             {{"frobenius", InputScaling::frobenius}, {"none", InputScaling::none}}),
        integer("train_slots", GFAD_REF(train_slots), 1, big),
        integer("eval_slots", GFAD_REF(eval_slots), 1, big),
        real("learning_rate", GFAD_REF(train.learning_rate), 0.0, inf),
        real("adam_beta1", GFAD_REF(train.adam_beta1), 0.0, 1.0),
        real("adam_beta2", GFAD_REF(train.adam_beta2), 0.0, 1.0),
        real("adam_epsilon", GFAD_REF(train.adam_epsilon), 0.0, inf, true),
        integer("batch_size", GFAD_REF(train.batch_size), 1, big),
        integer("max_epochs", GFAD_REF(train.max_epochs), 1, big),
        integer("early_stop_patience", GFAD_REF(train.early_stop_patience), 1, big),
        real("validation_fraction", GFAD_REF(train.validation_fraction), 0.0, 0.9),
        integer("train_aps_per_slot", GFAD_REF(train_aps_per_slot), 0, 100000),
        integer("central_devices_per_slot", GFAD_REF(central_devices_per_slot), 1, 100000),
        choice<ModelSharing>("decentralized_models", GFAD_REF(decentralized_models),
                             {{"shared", ModelSharing::shared}, {"per_ap", ModelSharing::per_ap}}),
        real("solver_lambda", GFAD_REF(solver_lambda), -inf, inf),
        real("amp_alpha", GFAD_REF(amp_alpha), 0.0, inf, true),
        integer("ista_iters", GFAD_REF(ista_iters), 1, big),
        integer("fista_iters", GFAD_REF(fista_iters), 1, big),
        integer("amp_iters", GFAD_REF(amp_iters), 1, big),
        choice<BaselineAggregation>("baseline_aggregation", GFAD_REF(baseline_aggregation),
                                    {{"cluster", BaselineAggregation::cluster_weighted},
                                     {"dominant", BaselineAggregation::dominant_ap}}),
        choice<BaselineRoc>("baseline_roc", GFAD_REF(baseline_roc), {{"rank", BaselineRoc::rank}, {"raw", BaselineRoc::raw}}),
        integer("baseline_eval_slots", GFAD_REF(baseline_eval_slots), 0, big),
        int_list("pareto_widths", GFAD_REF(pareto_widths)),
        int_list("pareto_depths", GFAD_REF(pareto_depths)),
        integer("pareto_train_slots", GFAD_REF(pareto_train_slots), 1, big),
        integer("pareto_epochs", GFAD_REF(pareto_epochs), 1, big),
        integer("bench_slots", GFAD_REF(bench_slots), 1, big),
        integer("bench_reps", GFAD_REF(bench_reps), 5, big),
        integer("bench_warmup", GFAD_REF(bench_warmup), 0, big),
        {"seed",
         [](RunConfig& c, std::string_view v) { c.seed = parse_number<std::uint64_t>("seed", v); },
         [](const RunConfig& c) { return std::to_string(c.seed); }},
    };
    return table;
}

#undef GFAD_REF

const Field& find_field(std::string_view key) {
    for (const auto& f : fields())
        if (f.name == key) return f;
    throw ConfigError("unknown key '" + std::string(key) + "'");
}

} // namespace

void RunConfig::validate() const {
    scenario.validate();
    train.validate();
    if (cluster_size > scenario.geometry.effective_num_aps() &&
        scenario.geometry.topology_mode == TopologyMode::cell_free)
        throw ConfigError("cluster_size: T=" + std::to_string(cluster_size) + " exceeds num_aps=" +
                          std::to_string(scenario.geometry.num_aps));
    if (scenario.orthonormal_pilots && scenario.geometry.num_devices > scenario.pilot_len)
        throw ConfigError("orthonormal_pilots: requires num_devices <= pilot_len");
    if (pareto_widths.empty() || pareto_depths.empty()) throw ConfigError("pareto grid must not be empty");
}

std::vector<std::string> RunConfig::warnings() const {
    std::vector<std::string> out;
    const double symbols = coherence_time_s * coherence_bandwidth_hz;
    const double budget = reserved_fraction * symbols;
    if (static_cast<double>(scenario.pilot_len) > budget + 1e-9)
        out.push_back("pilot_len=" + std::to_string(scenario.pilot_len) + " exceeds the reserved pilot budget of " +
                      fmt_double(budget) + " symbols per coherence block");
    return out;
}

int RunConfig::effective_cluster_size() const {
    return std::min(cluster_size, scenario.geometry.effective_num_aps());
}

SolverConfig RunConfig::solver(Algorithm a) const {
    SolverConfig s = SolverConfig::defaults(a);
    s.max_iters = a == Algorithm::ista ? ista_iters : a == Algorithm::fista ? fista_iters : amp_iters;
    s.lambda = solver_lambda;
    s.amp_alpha = amp_alpha;
    s.seed = seed;
    return s;
}

ModelConfig RunConfig::model_config(int cluster_inputs) const {
    ModelConfig m = ModelConfig::for_signal(scenario.pilot_len, scenario.num_antennas, hidden_layers, hidden_width,
                                            scenario.geometry.num_devices, cluster_inputs);
    m.input_scaling = input_scaling;
    return m;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return emit_config(a) == emit_config(b); }

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
    find_field(trim(key)).set(cfg, trim(value));
}

RunConfig parse_config_text(std::string_view text) {
    RunConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = line;
        if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
        sv = trim(sv);
        if (sv.empty()) continue;
        const auto eq = sv.find('=');
        try {
            if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'");
            const auto key = trim(sv.substr(0, eq));
            const auto value = trim(sv.substr(eq + 1));
            if (value.empty()) throw ConfigError(std::string(key) + ": missing value");
            set_config_value(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

std::string emit_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& f : fields()) out += f.name + " = " + f.get(cfg) + "\n";
    return out;
}

std::uint64_t config_hash(const RunConfig& cfg) {
    std::string text;
    for (const auto& f : fields())
        if (f.name != "seed") text += f.name + " = " + f.get(cfg) + "\n";
    return fnv1a(text);
}

std::string_view to_string(Strategy s) { return s == Strategy::decentralized ? "decentralized" : "centralized"; }
std::string_view to_string(PostMode p) { return p == PostMode::pond ? "pond" : "fusion"; }

} // namespace gfad
