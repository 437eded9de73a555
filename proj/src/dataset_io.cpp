#include "gfad/dataset_io.hpp"

#include "gfad/binary_io.hpp"
#include "gfad/error.hpp"

#include <fstream>

namespace gfad {

namespace {

constexpr char kMagic[5] = "CFAD";
constexpr std::uint64_t kHeaderBytes = 52;
constexpr std::uint64_t kGeometryBytes = 7 * 8 + 2 * 4 + 2 * 8;

constexpr std::uint32_t kFlagStaticBlock = 1u << 0;
constexpr std::uint32_t kFlagCellular = 1u << 1;
constexpr std::uint32_t kFlagEval = 1u << 2;

std::uint64_t activity_bytes(int K) { return (static_cast<std::uint64_t>(K) + 7) / 8; }

DatasetHeader parse_header(std::istream& is) {
    if (!binio::check_magic(is, kMagic)) throw IoError("dataset: bad magic (not a CFAD file)");
    DatasetHeader h;
    h.version = binio::get<std::uint32_t>(is, "version");
    if (h.version != AccessSlotDataset::kFormatVersion)
        throw IoError("dataset: unsupported format version " + std::to_string(h.version));
    h.num_aps = static_cast<int>(binio::get<std::uint32_t>(is, "M"));
    h.num_antennas = static_cast<int>(binio::get<std::uint32_t>(is, "N"));
    h.num_devices = static_cast<int>(binio::get<std::uint32_t>(is, "K"));
    h.pilot_len = static_cast<int>(binio::get<std::uint32_t>(is, "L"));
    h.num_slots = static_cast<int>(binio::get<std::uint32_t>(is, "num_slots"));
    const auto flags = binio::get<std::uint32_t>(is, "flags");
    h.fading_mode = (flags & kFlagStaticBlock) ? FadingMode::static_block : FadingMode::per_slot;
    h.topology_mode = (flags & kFlagCellular) ? TopologyMode::cellular : TopologyMode::cell_free;
    h.partition = (flags & kFlagEval) ? Partition::eval : Partition::train;
    h.fading_block_len = static_cast<int>(binio::get<std::uint32_t>(is, "block_len"));
    h.master_seed = binio::get<std::uint64_t>(is, "master_seed");
    h.config_hash = binio::get<std::uint64_t>(is, "config_hash");
    if (h.num_aps < 1 || h.num_antennas < 1 || h.num_devices < 1 || h.pilot_len < 1 ||
        h.num_slots < 1 || h.fading_block_len < 1)
        throw IoError("dataset: corrupt header dimensions");
    return h;
}

} // namespace

std::uint64_t DatasetHeader::expected_file_size() const {
    const std::uint64_t M = static_cast<std::uint64_t>(num_aps);
    const std::uint64_t N = static_cast<std::uint64_t>(num_antennas);
    const std::uint64_t K = static_cast<std::uint64_t>(num_devices);
    const std::uint64_t L = static_cast<std::uint64_t>(pilot_len);
    const std::uint64_t S = static_cast<std::uint64_t>(num_slots);
    const std::uint64_t scenario = kGeometryBytes + 16 * M + 16 * K + 16 * M * K + 16 * L * K;
    const std::uint64_t per_slot = 8 * (1 + K) + activity_bytes(num_devices) + 8 * M * L * N;
    return kHeaderBytes + scenario + S * per_slot;
}

void save_dataset(const AccessSlotDataset& ds, const std::filesystem::path& path) {
    if (ds.slots.empty()) throw ConfigError("dataset: refusing to save an empty dataset");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("dataset: cannot open " + path.string() + " for writing");

    const int M = ds.num_aps();
    const int N = ds.num_antennas();
    const int K = ds.num_devices();
    const int L = ds.pilot_len();
    const auto& g = ds.topology.geometry;

    binio::put_magic(os, kMagic);
    binio::put<std::uint32_t>(os, ds.format_version);
    for (int v : {M, N, K, L, ds.num_slots()}) binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(v));
    std::uint32_t flags = 0;
    if (ds.fading_mode == FadingMode::static_block) flags |= kFlagStaticBlock;
    if (g.topology_mode == TopologyMode::cellular) flags |= kFlagCellular;
    if (ds.partition == Partition::eval) flags |= kFlagEval;
    binio::put<std::uint32_t>(os, flags);
    binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(ds.fading_block_len));
    binio::put<std::uint64_t>(os, ds.master_seed);
    binio::put<std::uint64_t>(os, ds.config_hash);

    for (double v : {g.area_side_m, g.edge_margin_m, g.min_device_ap_dist_m, g.min_ap_spacing_m,
                     g.ap_height_m, g.device_height_m, g.carrier_freq_hz})
        binio::put<double>(os, v);
    binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.num_aps));
    binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.num_devices));
    binio::put<double>(os, ds.sparsity);
    binio::put<double>(os, ds.lsf.shadow_sigma_db);
    for (const auto& p : ds.topology.ap_positions) {
        binio::put<double>(os, p.x);
        binio::put<double>(os, p.y);
    }
    for (const auto& p : ds.topology.device_positions) {
        binio::put<double>(os, p.x);
        binio::put<double>(os, p.y);
    }
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) binio::put<double>(os, ds.lsf.beta_db(m, k));
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) binio::put<double>(os, ds.lsf.shadowing_db(m, k));
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k) {
            binio::put<double>(os, ds.codebook.S(l, k).real());
            binio::put<double>(os, ds.codebook.S(l, k).imag());
        }

    for (const auto& s : ds.slots) {
        if (static_cast<int>(s.tx_power_w.size()) != K || s.num_aps != M || s.pilot_len != L ||
            s.num_antennas != N)
            throw MismatchError("dataset: slot dimensions disagree with dataset");
        binio::put<double>(os, s.noise_var_w);
        for (double p : s.tx_power_w) binio::put<double>(os, p);
    }
    std::vector<char> packed(activity_bytes(K));
    for (const auto& s : ds.slots) {
        std::fill(packed.begin(), packed.end(), 0);
        for (int k = 0; k < K; ++k)
            if (s.activity.a[static_cast<std::size_t>(k)]) packed[k / 8] |= static_cast<char>(1 << (k % 8));
        os.write(packed.data(), static_cast<std::streamsize>(packed.size()));
    }
    for (const auto& s : ds.slots)
        binio::put_floats(os, reinterpret_cast<const float*>(s.received.data()), 2 * s.received.size());
    if (!os) throw IoError("dataset: write failed for " + path.string());
}

DatasetHeader read_dataset_header(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("dataset: cannot open " + path.string());
    return parse_header(is);
}

AccessSlotDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("dataset: cannot open " + path.string());
    const DatasetHeader h = parse_header(is);
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec || size != h.expected_file_size())
        throw IoError("dataset: corrupt header or truncated file (size " + std::to_string(size) +
                      ", expected " + std::to_string(h.expected_file_size()) + ")");

    const int M = h.num_aps, N = h.num_antennas, K = h.num_devices, L = h.pilot_len;
    AccessSlotDataset ds;
    ds.format_version = h.version;
    ds.fading_mode = h.fading_mode;
    ds.fading_block_len = h.fading_block_len;
    ds.master_seed = h.master_seed;
    ds.config_hash = h.config_hash;
    ds.partition = h.partition;

    auto& g = ds.topology.geometry;
    for (double* v : {&g.area_side_m, &g.edge_margin_m, &g.min_device_ap_dist_m, &g.min_ap_spacing_m,
                      &g.ap_height_m, &g.device_height_m, &g.carrier_freq_hz})
        *v = binio::get<double>(is, "geometry");
    g.num_aps = static_cast<int>(binio::get<std::uint32_t>(is, "geometry"));
    g.num_devices = static_cast<int>(binio::get<std::uint32_t>(is, "geometry"));
    g.topology_mode = h.topology_mode;
    ds.sparsity = binio::get<double>(is, "sparsity");
    const double sigma = binio::get<double>(is, "shadow sigma");

    ds.topology.ap_positions.resize(static_cast<std::size_t>(M));
    for (auto& p : ds.topology.ap_positions) {
        p.x = binio::get<double>(is, "ap positions");
        p.y = binio::get<double>(is, "ap positions");
    }
    ds.topology.device_positions.resize(static_cast<std::size_t>(K));
    for (auto& p : ds.topology.device_positions) {
        p.x = binio::get<double>(is, "device positions");
        p.y = binio::get<double>(is, "device positions");
    }
    Eigen::MatrixXd beta_db(M, K), shadow(M, K);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) beta_db(m, k) = binio::get<double>(is, "beta");
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) shadow(m, k) = binio::get<double>(is, "shadowing");
    ds.lsf = LargeScaleMap::from_db(std::move(beta_db), std::move(shadow), sigma);
    ds.codebook.S.resize(L, K);
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k) {
            const double re = binio::get<double>(is, "pilots");
            const double im = binio::get<double>(is, "pilots");
            ds.codebook.S(l, k) = {re, im};
        }

    ds.slots.resize(static_cast<std::size_t>(h.num_slots));
    for (auto& s : ds.slots) {
        s.num_aps = M;
        s.pilot_len = L;
        s.num_antennas = N;
        s.noise_var_w = binio::get<double>(is, "noise variance");
        s.tx_power_w.resize(static_cast<std::size_t>(K));
        for (auto& p : s.tx_power_w) p = binio::get<double>(is, "tx power");
    }
    std::vector<char> packed(activity_bytes(K));
    for (auto& s : ds.slots) {
        is.read(packed.data(), static_cast<std::streamsize>(packed.size()));
        if (!is) throw IoError("dataset: truncated activity section");
        s.activity.epsilon = ds.sparsity;
        s.activity.a.resize(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k)
            s.activity.a[static_cast<std::size_t>(k)] = (packed[k / 8] >> (k % 8)) & 1;
    }
    for (auto& s : ds.slots) {
        s.received.resize(static_cast<std::size_t>(M) * L * N);
        binio::get_floats(is, reinterpret_cast<float*>(s.received.data()), 2 * s.received.size(),
                          "signals");
    }
    return ds;
}

} // namespace gfad
