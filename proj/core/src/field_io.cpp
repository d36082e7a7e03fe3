#include "sladr/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "sladr/error.hpp"

namespace sladr {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_field_csv(std::ostream& out, const Interpolator& interp, const GridFunction& c) {
  out << "x,y,species,value\n";
  for (std::size_t i = 0; i < c.n_dofs(); ++i) {
    const Vec2 p = interp.dof(i);
    for (std::size_t s = 0; s < c.n_species(); ++s) {
      out << format_double(p.x) << ',' << format_double(p.y) << ',' << s << ','
          << format_double(c(i, s)) << '\n';
    }
  }
}

Raster to_raster(const StructuredGrid& grid, const GridFunction& c) {
  if (c.n_dofs() != grid.node_count()) throw Error("raster: grid and field sizes differ");
  Raster r;
  r.nx = static_cast<std::int64_t>(grid.nodes_x());
  r.ny = static_cast<std::int64_t>(grid.nodes_y());
  r.species = static_cast<std::int64_t>(c.n_species());
  r.data.resize(c.values().size());
  std::size_t k = 0;
  for (std::size_t s = 0; s < c.n_species(); ++s)
    for (std::size_t i = 0; i < c.n_dofs(); ++i) r.data[k++] = c(i, s);
  return r;
}

GridFunction from_raster(const Raster& r) {
  const auto n = static_cast<std::size_t>(r.nx * r.ny);
  const auto S = static_cast<std::size_t>(r.species);
  GridFunction c(n, S);
  std::size_t k = 0;
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t i = 0; i < n; ++i) c(i, s) = r.data[k++];
  return c;
}

namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

template <typename T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ParseError("raster: truncated file");
  return to_little(v);
}

}  // namespace

void write_raster(std::ostream& out, const Raster& r) {
  out.write(kRasterMagic, sizeof(kRasterMagic));
  put<std::int64_t>(out, r.nx);
  put<std::int64_t>(out, r.ny);
  put<std::int64_t>(out, r.species);
  for (double v : r.data) put<double>(out, v);
  if (!out) throw Error("raster: write failed");
}

Raster read_raster(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kRasterMagic, sizeof(magic)) != 0) {
    throw ParseError("raster: bad magic");
  }
  Raster r;
  r.nx = get<std::int64_t>(in);
  r.ny = get<std::int64_t>(in);
  r.species = get<std::int64_t>(in);
  if (r.nx <= 0 || r.ny <= 0 || r.species <= 0 || r.nx > (1 << 24) || r.ny > (1 << 24) ||
      r.species > 1024) {
    throw ParseError("raster: implausible dimensions");
  }
  r.data.resize(static_cast<std::size_t>(r.nx * r.ny * r.species));
  for (auto& v : r.data) v = get<double>(in);
  return r;
}

void write_raster_file(const std::string& path, const Raster& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_raster(out, r);
}

Raster read_raster_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open raster '" + path + "'");
  return read_raster(in);
}

}  // namespace sladr
