#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sladr/grid_function.hpp"
#include "sladr/interp.hpp"
#include "sladr/mesh.hpp"

namespace sladr {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// One line per (dof, species): `x,y,species,value`, preceded by a header.
void write_field_csv(std::ostream& out, const Interpolator& interp, const GridFunction& c);

/// Species-major, row-major float64 raster of a structured grid function.
struct Raster {
  std::int64_t nx = 0;  // stored nodes along x
  std::int64_t ny = 0;
  std::int64_t species = 0;
  std::vector<double> data;  // index (s * ny + j) * nx + i

  double at(std::int64_t s, std::int64_t i, std::int64_t j) const {
    return data[static_cast<std::size_t>((s * ny + j) * nx + i)];
  }
};

inline constexpr char kRasterMagic[8] = {'S', 'L', 'A', 'D', 'R', '1', '\0', '\0'};

Raster to_raster(const StructuredGrid& grid, const GridFunction& c);
GridFunction from_raster(const Raster& r);

/// 32-byte header (magic, nx, ny, S as little-endian int64) then data.
void write_raster(std::ostream& out, const Raster& r);
Raster read_raster(std::istream& in);
void write_raster_file(const std::string& path, const Raster& r);
Raster read_raster_file(const std::string& path);

}  // namespace sladr
