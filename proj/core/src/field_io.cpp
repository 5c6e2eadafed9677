#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hlmax/error.hpp"
#include "hlmax/field.hpp"
#include "hlmax/io.hpp"

namespace hlmax {

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Config, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    require(static_cast<bool>(out), ErrorCode::Config, "failed writing " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Config, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

nlohmann::json grid_to_json(const Grid& g) {
  nlohmann::json j;
  j["dim"] = g.dim;
  j["origin"] = std::vector<double>(g.origin.data(), g.origin.data() + g.dim);
  j["spacing"] = g.spacing;
  j["shape"] = g.shape;
  j["layout"] = "row-major, axis 0 slowest, cell-centred";
  j["dtype"] = "float64-le";
  return j;
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  else return __builtin_bswap64(v);
}

}  // namespace

std::string grid_json(const Grid& grid) { return grid_to_json(grid).dump(2); }

std::string field_bytes(const ScalarField& f) {
  std::string bytes(f.size() * 8, '\0');
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::uint64_t v = to_le(std::bit_cast<std::uint64_t>(f[i]));
    std::memcpy(bytes.data() + 8 * i, &v, 8);
  }
  return bytes;
}

void write_field(const ScalarField& f, const std::string& stem) {
  write_file_atomic(stem + ".bin", field_bytes(f));
  write_file_atomic(stem + ".json", grid_json(f.grid) + "\n");
}

ScalarField read_field(const std::string& stem) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(stem + ".json"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, stem + ".json: " + e.what());
  }
  Grid g;
  try {
    g.dim = j.at("dim").get<int>();
    const auto origin = j.at("origin").get<std::vector<double>>();
    g.origin = Eigen::Map<const Vec>(origin.data(), static_cast<Eigen::Index>(origin.size()));
    g.spacing = j.at("spacing").get<double>();
    g.shape = j.at("shape").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, stem + ".json: " + e.what());
  }
  g.validate();
  const std::string bytes = read_file(stem + ".bin");
  require(bytes.size() == g.size() * 8, ErrorCode::Parse, stem + ".bin size does not match the header");
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::uint64_t v;
    std::memcpy(&v, bytes.data() + 8 * i, 8);
    f[i] = std::bit_cast<double>(to_le(v));
  }
  return f;
}

std::string slice_csv(const ScalarField& f, int axis, int plane) {
  const Grid& g = f.grid;
  std::ostringstream out;
  out << std::setprecision(17);
  if (g.dim == 1) {
    out << "x,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) out << g.center(i)(0) << ',' << f[i] << '\n';
  } else if (g.dim == 2) {
    out << "x,y,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Vec c = g.center(i);
      out << c(0) << ',' << c(1) << ',' << f[i] << '\n';
    }
  } else {
    if (axis < 0) axis = 2;
    require(axis < 3, ErrorCode::InvalidArgument, "slice axis out of range");
    if (plane < 0) plane = g.shape[axis] / 2;
    require(plane < g.shape[axis], ErrorCode::InvalidArgument, "slice plane out of range");
    int u = axis == 0 ? 1 : 0, w = axis == 2 ? 1 : 2;
    const char* names = "xyz";
    out << names[u] << ',' << names[w] << ",value\n";
    std::vector<int> cell(3);
    cell[axis] = plane;
    for (cell[u] = 0; cell[u] < g.shape[u]; ++cell[u])
      for (cell[w] = 0; cell[w] < g.shape[w]; ++cell[w]) {
        const Vec c = g.center(cell);
        out << c(u) << ',' << c(w) << ',' << f[g.ravel(cell)] << '\n';
      }
  }
  return out.str();
}

void write_slice_csv(const ScalarField& f, const std::string& path, int axis, int plane) {
  write_file_atomic(path, slice_csv(f, axis, plane));
}

}  // namespace hlmax
