#include "nlac/snapshot_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "nlac/error.hpp"

namespace nlac {

namespace {

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  std::filesystem::path p = stem;
  p += ext;
  return p;
}

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int k = 0; k < 8; ++k) r |= ((v >> (8 * k)) & 0xffu) << (8 * (7 - k));
  return r;
}

void set_precision(std::ostream& out) { out << std::setprecision(17); }

}  // namespace

void write_snapshot(const std::filesystem::path& stem, const Field2D& field, double epsilon) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  {
    std::ofstream bin(with_ext(stem, ".bin"), std::ios::binary);
    if (!bin) throw Error(ErrorKind::ConfigInvalid, "cannot write " + with_ext(stem, ".bin").string());
    for (double v : field.values) {
      const std::uint64_t raw = to_little(std::bit_cast<std::uint64_t>(v));
      char bytes[8];
      std::memcpy(bytes, &raw, 8);
      bin.write(bytes, 8);
    }
  }
  nlohmann::json meta = {{"nx", field.grid.nx},     {"ny", field.grid.ny},
                         {"Lx", field.grid.Lx},     {"Ly", field.grid.Ly},
                         {"time", field.time},      {"epsilon", epsilon}};
  std::ofstream side(with_ext(stem, ".json"));
  side << meta.dump(2) << '\n';
}

Snapshot read_snapshot(const std::filesystem::path& stem) {
  std::ifstream side(with_ext(stem, ".json"));
  if (!side) throw Error(ErrorKind::SchemaMismatch, "missing sidecar for " + stem.string());
  nlohmann::json meta;
  try {
    side >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaMismatch, std::string("unreadable sidecar: ") + e.what());
  }
  for (const char* key : {"nx", "ny", "Lx", "Ly", "time", "epsilon"})
    if (!meta.contains(key)) throw Error(ErrorKind::SchemaMismatch, std::string("sidecar lacks ") + key);

  Snapshot s;
  s.field.grid = Grid2D{meta["nx"].get<int>(), meta["ny"].get<int>(), meta["Lx"].get<double>(),
                        meta["Ly"].get<double>()};
  s.field.time = meta["time"].get<double>();
  s.epsilon = meta["epsilon"].get<double>();

  const auto bin_path = with_ext(stem, ".bin");
  const auto n = s.field.grid.size();
  if (!std::filesystem::exists(bin_path) || std::filesystem::file_size(bin_path) != n * 8)
    throw Error(ErrorKind::SchemaMismatch, "payload size does not match the sidecar grid");
  std::ifstream bin(bin_path, std::ios::binary);
  s.field.values.resize(n);
  for (auto& v : s.field.values) {
    char bytes[8];
    bin.read(bytes, 8);
    std::uint64_t raw;
    std::memcpy(&raw, bytes, 8);
    v = std::bit_cast<double>(to_little(raw));
  }
  return s;
}

void write_mass_csv(std::ostream& out, const std::vector<std::pair<double, double>>& series) {
  set_precision(out);
  out << "t,mass\n";
  for (const auto& [t, m] : series) out << t << ',' << m << '\n';
}

void write_contour_csv(std::ostream& out, const Contour& contour) {
  set_precision(out);
  out << "loop_id,x,y\n";
  for (std::size_t l = 0; l < contour.loops.size(); ++l)
    for (const Point& p : contour.loops[l].points) out << l << ',' << p.x << ',' << p.y << '\n';
}

void write_radial_csv(std::ostream& out, const RadialSeries& series) {
  set_precision(out);
  out << "t,R,gamma\n";
  for (std::size_t k = 0; k < series.t.size(); ++k)
    out << series.t[k] << ',' << series.R[k] << ',' << series.gamma[k] << '\n';
}

}  // namespace nlac
