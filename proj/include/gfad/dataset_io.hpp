#pragma once

// "CFAD" dataset container. Layout is documented in docs/formats.md.

#include "gfad/scenario.hpp"

#include <cstdint>
#include <filesystem>

namespace gfad {

struct DatasetHeader {
    std::uint32_t version = 0;
    int num_aps = 0;
    int num_antennas = 0;
    int num_devices = 0;
    int pilot_len = 0;
    int num_slots = 0;
    FadingMode fading_mode = FadingMode::per_slot;
    TopologyMode topology_mode = TopologyMode::cell_free;
    Partition partition = Partition::train;
    int fading_block_len = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t config_hash = 0;

    /// Total file size implied by the header, in bytes.
    std::uint64_t expected_file_size() const;
};

void save_dataset(const AccessSlotDataset& ds, const std::filesystem::path& path);

/// Validates magic, version and size before decoding; throws IoError on any
/// corruption without returning partial data.
AccessSlotDataset load_dataset(const std::filesystem::path& path);

/// Parses the fixed header only.
DatasetHeader read_dataset_header(const std::filesystem::path& path);

} // namespace gfad
