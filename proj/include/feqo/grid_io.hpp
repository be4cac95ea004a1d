#pragma once

// Binary 2-D grid files.  Layout, little-endian throughout:
//   "FEQO" | u32 version | u64 rows | u64 cols | f64 row_min, row_max, col_min, col_max | rows*cols f64
// Payload is row-major.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "feqo/errors.hpp"

namespace feqo {

struct DataGrid {
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    std::array<double, 4> bounds{};  // row_min, row_max, col_min, col_max
    std::vector<double> values;

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

inline constexpr std::uint32_t grid_format_version = 1;

namespace detail {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::string& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(const unsigned char* p) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

}  // namespace detail

inline constexpr std::size_t grid_header_size = 4 + 4 + 8 + 8 + 4 * 8;

inline std::string encode_grid(const DataGrid& g) {
    if (g.values.size() != g.rows * g.cols) throw DomainError("grid payload size does not match rows x cols");
    std::string out;
    out.reserve(grid_header_size + 8 * g.values.size());
    out.append("FEQO", 4);
    detail::put_le(out, grid_format_version);
    detail::put_le(out, g.rows);
    detail::put_le(out, g.cols);
    for (double b : g.bounds) detail::put_le(out, b);
    for (double v : g.values) detail::put_le(out, v);
    return out;
}

inline DataGrid decode_grid(const std::string& bytes) {
    if (bytes.size() < grid_header_size) throw IoError("grid file truncated: header needs 56 bytes");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (std::memcmp(p, "FEQO", 4) != 0) throw IoError("grid file has bad magic (expected FEQO)");
    const auto version = detail::get_le<std::uint32_t>(p + 4);
    if (version != grid_format_version) throw IoError("unsupported grid format version " + std::to_string(version));
    DataGrid g;
    g.rows = detail::get_le<std::uint64_t>(p + 8);
    g.cols = detail::get_le<std::uint64_t>(p + 16);
    for (int i = 0; i < 4; ++i) g.bounds[i] = detail::get_le<double>(p + 24 + 8 * i);
    if (g.rows == 0 || g.cols == 0 || g.rows > (1ull << 32) || g.cols > (1ull << 32))
        throw IoError("grid header has invalid shape " + std::to_string(g.rows) + " x " + std::to_string(g.cols));
    const std::uint64_t count = g.rows * g.cols;
    if (bytes.size() != grid_header_size + 8 * count)
        throw IoError("grid payload is " + std::to_string(bytes.size() - grid_header_size) + " bytes, header implies " +
                      std::to_string(8 * count));
    g.values.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) g.values[i] = detail::get_le<double>(p + grid_header_size + 8 * i);
    return g;
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("failed reading '" + path + "'");
    return s;
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot create '" + path + "'");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.close();
    if (!f) throw IoError("failed writing '" + path + "'");
}

inline void write_grid(const std::string& path, const DataGrid& g) { write_file(path, encode_grid(g)); }
inline DataGrid read_grid(const std::string& path) { return decode_grid(read_file(path)); }

}  // namespace feqo
