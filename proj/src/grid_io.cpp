#include "mgsr/grid_io.hpp"

#include <algorithm>
#include <fstream>

#include "mgsr/binary_io.hpp"

namespace mgsr {

namespace {
constexpr std::string_view kMagic = "MGG1";
// Refuse absurd headers before allocating.
constexpr std::uint32_t kMaxSide = 1u << 15;
} // namespace

void write_grid(std::ostream& os, const Grid& g) {
    io::write_magic(os, kMagic);
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.n()));
    for (double v : g.values()) io::write_le<double>(os, v);
    if (!os) throw GridFileError("failed writing grid");
}

Grid read_grid(std::istream& is) {
    try {
        if (!io::read_magic(is, kMagic)) throw GridFileError("not an MGG1 grid file (bad magic)");
        const auto n = io::read_le<std::uint32_t>(is, "grid side");
        if (n < 2 || n > kMaxSide) throw GridFileError("invalid grid side " + std::to_string(n));
        std::vector<double> values(static_cast<std::size_t>(n) * n);
        for (double& v : values) v = io::read_le<double>(is, "grid values");
        return Grid(static_cast<int>(n), std::move(values));
    } catch (const io::Truncated& e) {
        throw GridFileError(std::string("truncated MGG1 file: ") + e.what());
    }
}

void save_grid(const std::filesystem::path& path, const Grid& g) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw GridFileError("cannot open " + path.string() + " for writing");
    write_grid(os, g);
}

Grid load_grid(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw GridFileError("cannot open " + path.string());
    return read_grid(is);
}

} // namespace mgsr
