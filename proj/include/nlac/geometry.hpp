#pragma once

#include <limits>
#include <vector>

#include "nlac/field.hpp"

namespace nlac {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Ordered polyline. Closed loops do not repeat the first point at the end.
/// Orientation keeps the sub-level region {u < level} on the left, so a loop
/// enclosing a low region runs counter-clockwise.
struct Polyline {
  std::vector<Point> points;
  bool closed = true;

  double length() const;
  std::size_t segment_count() const;
  /// Endpoints of segment k (wrapping for closed loops).
  Point seg_start(std::size_t k) const { return points[k]; }
  Point seg_end(std::size_t k) const { return points[(k + 1) % points.size()]; }
};

struct Contour {
  std::vector<Polyline> loops;
  double level = 0.0;

  double length() const;
  bool all_closed() const;
  bool empty() const { return loops.empty(); }
};

enum class EdgeInterp { Linear, Cubic };

/// Marching squares. Crossings are placed on cell edges by linear
/// interpolation, or by the cubic through the four nodes along the edge's
/// grid line (quadratic at the walls). Saddle cells are resolved by comparing
/// the cell average with the level. Throws EmptyContour when the level is not
/// crossed.
Contour extract_contour(const Field2D& field, double level, EdgeInterp interp = EdgeInterp::Linear);

/// Closed polygon through n points of a circle, counter-clockwise.
Polyline circle_polyline(double cx, double cy, double r, int n);

double distance_to(const Contour& c, Point p);
/// Negative in the sub-level region: parity against closed loops, and the
/// side of the nearest segment when some polyline is open.
double signed_distance_at(const Contour& c, Point p);

/// Monotone cut-off: identity on [-d0, d0], constant +-2 d0 beyond 2 d0, C1
/// cubic in between.
double cutoff_distance(double s, double d0);

struct SignedDistanceField {
  Grid2D grid;
  std::vector<double> raw;  // signed distance to the polylines, clamped at the reach
  std::vector<double> d;    // after the cut-off
  double d0cut = 0.0;
};

/// `reach` limits the exact computation: farther nodes get +-reach. With an
/// open polyline the sign of such nodes falls back to ray parity. An optional
/// `hint` (a lower bound on the unsigned distance, carrying the sign) lets
/// nodes with |hint| >= 0.9 reach skip the search and take +-reach with the
/// hint's sign, so only the outer tenth of the band may be inexact.
SignedDistanceField signed_distance(const Contour& c, const Grid2D& grid, double d0cut,
                                    int workers = 1,
                                    double reach = std::numeric_limits<double>::infinity(),
                                    const std::vector<double>* hint = nullptr);

struct RegionAreas {
  double area_plus = 0.0;
  double area_minus = 0.0;
  double gamma = 0.0;
};

/// Shoelace areas; the enclosed (sub-level) region counts as Omega^-.
/// Throws BadInterface on open polylines.
RegionAreas region_areas(const Contour& c, double domain_area);

struct CurvatureSample {
  Point point;
  double kappa = 0.0;
};

/// Signed curvature by circumscribed circles of consecutive triples after
/// resampling every closed loop to uniform arclength `spacing` (0 selects
/// four times the mean segment length). Positive on loops around low regions
/// that are convex.
std::vector<CurvatureSample> curvature_samples(const Contour& c, double spacing = 0.0);

/// Centripetal Catmull-Rom refinement: `factor` - 1 points inserted per
/// segment, on a curve through the original vertices.
Contour refine_contour(const Contour& c, int factor);

/// Points along every polyline with spacing at most `spacing`.
std::vector<Point> densify(const Contour& c, double spacing);

/// Symmetric Hausdorff distance between densified samples and the exact
/// polylines of the other contour.
double hausdorff(const Contour& a, const Contour& b, double spacing);

struct WidthEstimate {
  double width = 0.0;        // band area / contour length
  double band_area = 0.0;    // area of {|u| <= 1 - eta}
  double length = 0.0;
  double max_extent = 0.0;   // largest normal extent of the band over arclength bins
};

/// Thickness of the transition layer around `contour`. Throws EmptyContour
/// when the contour is empty or the band has no nodes.
WidthEstimate transition_width(const Field2D& field, double eta, const Contour& contour);

}  // namespace nlac
