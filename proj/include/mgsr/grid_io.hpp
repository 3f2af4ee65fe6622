#pragma once

/// @file grid_io.hpp
/// @brief MGG1 grid files.
///
/// Layout: the four bytes "MGG1", u32 LE side length n, then n*n float64 LE
/// values in row-major order. Nothing follows the payload.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "mgsr/grid.hpp"

namespace mgsr {

class GridFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_grid(std::ostream& os, const Grid& g);
Grid read_grid(std::istream& is);

void save_grid(const std::filesystem::path& path, const Grid& g);
Grid load_grid(const std::filesystem::path& path);

} // namespace mgsr
