#include "gfad/model_io.hpp"

#include "gfad/binary_io.hpp"
#include "gfad/error.hpp"

#include <fstream>
#include <string>

namespace gfad {

namespace {

constexpr char kMagic[5] = "CFMD";
constexpr std::uint64_t kHeaderBytes = 4 + 4 + 6 * 4 + 3 * 8;

ModelHeader parse_header(std::istream& is) {
    if (!binio::check_magic(is, kMagic)) throw IoError("model: bad magic (not a CFMD file)");
    ModelHeader h;
    h.version = binio::get<std::uint32_t>(is, "version");
    if (h.version != kModelFormatVersion)
        throw IoError("model: unsupported format version " + std::to_string(h.version));
    auto& c = h.config;
    c.input_dim = static_cast<int>(binio::get<std::uint32_t>(is, "input_dim"));
    c.hidden_layers = static_cast<int>(binio::get<std::uint32_t>(is, "hidden_layers"));
    c.hidden_width = static_cast<int>(binio::get<std::uint32_t>(is, "hidden_width"));
    c.num_devices = static_cast<int>(binio::get<std::uint32_t>(is, "num_devices"));
    c.cluster_inputs = static_cast<int>(binio::get<std::uint32_t>(is, "cluster_inputs"));
    const auto scaling = binio::get<std::uint32_t>(is, "input_scaling");
    if (scaling > 1) throw IoError("model: corrupt header (input scaling)");
    c.input_scaling = static_cast<InputScaling>(scaling);
    h.seed = binio::get<std::uint64_t>(is, "seed");
    h.config_hash = binio::get<std::uint64_t>(is, "config_hash");
    h.num_params = binio::get<std::uint64_t>(is, "num_params");
    try {
        c.validate();
    } catch (const ConfigError&) {
        throw IoError("model: corrupt header dimensions");
    }
    if (h.num_params != param_count(c))
        throw IoError("model: parameter count disagrees with the configuration");
    return h;
}

} // namespace

void save_model(const SlpModel& model, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("model: cannot open " + path.string() + " for writing");
    const auto& c = model.config();
    binio::put_magic(os, kMagic);
    binio::put<std::uint32_t>(os, kModelFormatVersion);
    for (int v : {c.input_dim, c.hidden_layers, c.hidden_width, c.num_devices, c.cluster_inputs})
        binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(v));
    binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(c.input_scaling));
    binio::put<std::uint64_t>(os, model.seed);
    binio::put<std::uint64_t>(os, model.config_hash);
    binio::put<std::uint64_t>(os, static_cast<std::uint64_t>(model.parameters().size()));
    for (Eigen::Index i = 0; i < model.parameters().size(); ++i) binio::put<double>(os, model.parameters()(i));
    if (!os) throw IoError("model: write failed for " + path.string());
}

ModelHeader read_model_header(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("model: cannot open " + path.string());
    return parse_header(is);
}

SlpModel load_model(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("model: cannot open " + path.string());
    const ModelHeader h = parse_header(is);
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec || size != kHeaderBytes + 8 * h.num_params)
        throw IoError("model: corrupt header or truncated file");
    SlpModel model(h.config);
    model.seed = h.seed;
    model.config_hash = h.config_hash;
    for (Eigen::Index i = 0; i < model.parameters().size(); ++i)
        model.parameters()(i) = binio::get<double>(is, "weights");
    return model;
}

void require_compatible(const ModelConfig& cfg, int num_devices, int pilot_len, int num_antennas) {
    if (cfg.num_devices != num_devices)
        throw MismatchError("model has K=" + std::to_string(cfg.num_devices) + " outputs, dataset has K=" +
                            std::to_string(num_devices));
    if (cfg.input_dim != 2 * pilot_len * num_antennas)
        throw MismatchError("model input dimension " + std::to_string(cfg.input_dim) +
                            " does not match 2*L*N=" + std::to_string(2 * pilot_len * num_antennas));
}

} // namespace gfad
