#pragma once

#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "nlac/field.hpp"
#include "nlac/geometry.hpp"
#include "nlac/interface_limit.hpp"

namespace nlac {

/// Writes `<stem>.bin` (little-endian float64, row-major) and `<stem>.json`
/// holding {nx, ny, Lx, Ly, time, epsilon}.
void write_snapshot(const std::filesystem::path& stem, const Field2D& field, double epsilon);

struct Snapshot {
  Field2D field;
  double epsilon = 0.0;
};

/// Reads a pair written by write_snapshot. Throws SchemaMismatch when the
/// sidecar is incomplete or the payload size disagrees with it.
Snapshot read_snapshot(const std::filesystem::path& stem);

void write_mass_csv(std::ostream& out, const std::vector<std::pair<double, double>>& series);
void write_contour_csv(std::ostream& out, const Contour& contour);
void write_radial_csv(std::ostream& out, const RadialSeries& series);

}  // namespace nlac
