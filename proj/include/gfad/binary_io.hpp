#pragma once

// Little-endian primitive readers/writers for the binary file formats.

#include "gfad/error.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace gfad::binio {

template <class T>
T byteswap_if_big(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::array<unsigned char, sizeof(T)> b;
        std::memcpy(b.data(), &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b.data(), sizeof(T));
    }
    return v;
}

template <class T>
void put(std::ostream& os, T v) {
    v = byteswap_if_big(v);
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& what) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("unexpected end of file while reading " + what);
    return byteswap_if_big(v);
}

/// Bulk transfer of a contiguous float array (complex<float> storage included).
inline void put_floats(std::ostream& os, const float* data, std::size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(float)));
    } else {
        for (std::size_t i = 0; i < count; ++i) put<float>(os, data[i]);
    }
}

inline void get_floats(std::istream& is, float* data, std::size_t count, const std::string& what) {
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(float)));
        if (!is) throw IoError("unexpected end of file while reading " + what);
    } else {
        for (std::size_t i = 0; i < count; ++i) data[i] = get<float>(is, what);
    }
}

inline void put_magic(std::ostream& os, const char (&magic)[5]) { os.write(magic, 4); }

/// Reads four bytes and compares them to the expected magic.
inline bool check_magic(std::istream& is, const char (&magic)[5]) {
    char buf[4] = {};
    is.read(buf, 4);
    return is && std::memcmp(buf, magic, 4) == 0;
}

} // namespace gfad::binio
