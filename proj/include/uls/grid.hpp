#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace uls {

struct Index3 {
  int x = 0, y = 0, z = 0;
  bool operator==(const Index3&) const = default;
};

inline Index3 operator+(Index3 a, Index3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Index3 operator-(Index3 a, Index3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

struct Dims3 {
  int x = 0, y = 0, z = 0;
  std::size_t count() const { return std::size_t(x) * std::size_t(y) * std::size_t(z); }
  bool in_bounds(Index3 p) const {
    return p.x >= 0 && p.x < x && p.y >= 0 && p.y < y && p.z >= 0 && p.z < z;
  }
  bool operator==(const Dims3&) const = default;
};

struct Spacing3 {
  double x = 1.0, y = 1.0, z = 1.0;
  bool operator==(const Spacing3&) const = default;
};

/// Dense 2D grid, row-major (x fastest).
template <typename T>
struct Grid2D {
  int width = 0, height = 0;
  std::vector<T> data;

  Grid2D() = default;
  Grid2D(int w, int h, T fill = T{}) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("Grid2D: dimensions must be positive");
    data.assign(std::size_t(w) * std::size_t(h), fill);
  }

  std::size_t index(int x, int y) const { return std::size_t(y) * width + std::size_t(x); }
  T& at(int x, int y) { return data[index(x, y)]; }
  const T& at(int x, int y) const { return data[index(x, y)]; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  std::size_t size() const { return data.size(); }

  bool operator==(const Grid2D&) const = default;
};

using Mask2D = Grid2D<std::uint8_t>;

inline std::size_t count_foreground(const Mask2D& m) {
  std::size_t n = 0;
  for (auto v : m.data) n += (v != 0);
  return n;
}

}  // namespace uls
