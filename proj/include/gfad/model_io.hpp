#pragma once

// "CFMD" model file. Layout is documented in docs/formats.md.

#include "gfad/slp.hpp"

#include <filesystem>

namespace gfad {

struct ModelHeader {
    std::uint32_t version = 0;
    ModelConfig config;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t num_params = 0;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const SlpModel& model, const std::filesystem::path& path);
SlpModel load_model(const std::filesystem::path& path);
ModelHeader read_model_header(const std::filesystem::path& path);

/// Throws MismatchError unless the model fits signals of a dataset with the
/// given dimensions.
void require_compatible(const ModelConfig& cfg, int num_devices, int pilot_len, int num_antennas);

} // namespace gfad
