#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "eegart/types.hpp"

namespace eegart {

/// A 2-D C-order float array widened to double.
struct NpyMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
};

/// Reads a 2-D '<f4' or '<f8' C-order array from an NPY v1/v2/v3 file.
/// Throws BadMagic, UnsupportedDtype, ShapeError or IoError.
NpyMatrix read_npy_matrix(const std::filesystem::path& path);

/// Reads a segment matrix; every row must hold exactly 512 samples.
SegmentSet read_npy(const std::filesystem::path& path, SetKind kind = SetKind::CleanEEG);

/// Writes a '<f8' C-order NPY v1.0 file.
void write_npy(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
               std::span<const double> data);

}  // namespace eegart
