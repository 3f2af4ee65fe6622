#pragma once

/// @file binary_io.hpp
/// @brief Little-endian primitive readers/writers shared by the file formats.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mgsr::io {

/// Raised when a stream ends before a complete value could be read.
class Truncated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class T>
void write_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(bytes.data(), sizeof(T));
}

template <class T>
T read_le(std::istream& is, std::string_view what) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<char, sizeof(T)> bytes;
    if (!is.read(bytes.data(), sizeof(T))) throw Truncated("unexpected end of data reading " + std::string(what));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

inline void write_magic(std::ostream& os, std::string_view magic) { os.write(magic.data(), static_cast<std::streamsize>(magic.size())); }

/// Reads magic.size() bytes; returns false on mismatch, throws Truncated on short read.
inline bool read_magic(std::istream& is, std::string_view magic) {
    std::string got(magic.size(), '\0');
    if (!is.read(got.data(), static_cast<std::streamsize>(got.size()))) throw Truncated("unexpected end of data reading magic");
    return got == magic;
}

} // namespace mgsr::io
