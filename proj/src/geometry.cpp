#include "nlac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlac/error.hpp"
#include "nlac/parallel.hpp"

namespace nlac {

namespace {

double circumcurvature(Point a, Point b, Point c);

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }
double cross(Point a, Point b, Point c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

struct Nearest {
  double distance = std::numeric_limits<double>::infinity();
  std::size_t loop = 0;
  std::size_t seg = 0;
  double t = 0.0;
};

Nearest nearest(const Contour& c, Point p) {
  Nearest best;
  for (std::size_t l = 0; l < c.loops.size(); ++l) {
    const auto& poly = c.loops[l];
    const std::size_t n = poly.segment_count();
    for (std::size_t k = 0; k < n; ++k) {
      const Point a = poly.seg_start(k), b = poly.seg_end(k);
      const double ex = b.x - a.x, ey = b.y - a.y;
      const double len2 = ex * ex + ey * ey;
      double t = len2 > 0 ? ((p.x - a.x) * ex + (p.y - a.y) * ey) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double d = std::hypot(a.x + t * ex - p.x, a.y + t * ey - p.y);
      if (d < best.distance) best = {d, l, k, t};
    }
  }
  return best;
}

bool inside_loop(const Polyline& poly, Point p) {
  bool in = false;
  const std::size_t n = poly.points.size();
  for (std::size_t k = 0, m = n - 1; k < n; m = k++) {
    const Point a = poly.points[k], b = poly.points[m];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xc) in = !in;
    }
  }
  return in;
}

// Unit left normal of segment k.
Point left_normal(const Polyline& poly, std::size_t k) {
  const Point a = poly.seg_start(k), b = poly.seg_end(k);
  const double len = dist(a, b);
  if (len == 0) return {0, 0};
  return {-(b.y - a.y) / len, (b.x - a.x) / len};
}

// +1 on the high side, -1 on the low (left) side of the nearest feature.
double side_of(const Contour& c, const Nearest& nb, Point p) {
  const auto& poly = c.loops[nb.loop];
  const std::size_t n = poly.segment_count();
  Point normal = left_normal(poly, nb.seg);
  Point anchor = poly.seg_start(nb.seg);
  if (nb.t >= 1.0 && (poly.closed || nb.seg + 1 < n)) {
    const Point other = left_normal(poly, (nb.seg + 1) % n);
    normal = {normal.x + other.x, normal.y + other.y};
    anchor = poly.seg_end(nb.seg);
  } else if (nb.t <= 0.0 && (poly.closed || nb.seg > 0)) {
    const Point other = left_normal(poly, (nb.seg + n - 1) % n);
    normal = {normal.x + other.x, normal.y + other.y};
  }
  const double s = (p.x - anchor.x) * normal.x + (p.y - anchor.y) * normal.y;
  return s > 0 ? -1.0 : 1.0;
}

double signed_from(const Contour& c, const Nearest& nb, Point p, bool parity) {
  if (parity) {
    int count = 0;
    for (const auto& loop : c.loops) count += inside_loop(loop, p) ? 1 : 0;
    return (count % 2 == 1 ? -1.0 : 1.0) * nb.distance;
  }
  return side_of(c, nb, p) * nb.distance;
}

// Uniform bucket grid over the segments of a contour. Nearest queries search
// rings of buckets outward until no unvisited bucket can hold a closer
// segment; ray parity only visits the segments spanning the query's row.
class SegmentIndex {
 public:
  explicit SegmentIndex(const Contour& c) : c_(c) {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    double total = 0.0;
    for (std::size_t l = 0; l < c.loops.size(); ++l) {
      const auto& poly = c.loops[l];
      for (std::size_t k = 0; k < poly.segment_count(); ++k) {
        segs_.push_back({l, k});
        const Point a = poly.seg_start(k), b = poly.seg_end(k);
        total += dist(a, b);
        x0 = std::min({x0, a.x, b.x});
        x1 = std::max({x1, a.x, b.x});
        y0 = std::min({y0, a.y, b.y});
        y1 = std::max({y1, a.y, b.y});
      }
    }
    if (segs_.empty()) return;
    const double extent = std::max({x1 - x0, y1 - y0, 1e-12});
    cell_ = std::max(2.0 * total / segs_.size(), extent / std::sqrt(static_cast<double>(segs_.size())));
    x0_ = x0;
    y0_ = y0;
    nx_ = static_cast<int>((x1 - x0) / cell_) + 1;
    ny_ = static_cast<int>((y1 - y0) / cell_) + 1;
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    rows_.assign(static_cast<std::size_t>(ny_), {});
    for (std::size_t s = 0; s < segs_.size(); ++s) {
      const auto& poly = c.loops[segs_[s].first];
      const Point a = poly.seg_start(segs_[s].second), b = poly.seg_end(segs_[s].second);
      const int i0 = col(std::min(a.x, b.x)), i1 = col(std::max(a.x, b.x));
      const int j0 = row(std::min(a.y, b.y)), j1 = row(std::max(a.y, b.y));
      for (int j = j0; j <= j1; ++j) {
        rows_[static_cast<std::size_t>(j)].push_back(s);
        for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(s);
      }
    }
  }

  /// Nearest segment within `reach` (infinite distance when none is).
  Nearest nearest(Point p, double reach = std::numeric_limits<double>::infinity()) const {
    Nearest best;
    if (segs_.empty()) return best;
    const int ci = col(p.x), cj = row(p.y);
    // Rings beyond the bounding box of p's clamped cell add nothing new.
    const int max_r = std::max(nx_, ny_);
    for (int r = 0; r <= max_r; ++r) {
      for (int j = cj - r; j <= cj + r; ++j) {
        if (j < 0 || j >= ny_) continue;
        const bool edge_row = j == cj - r || j == cj + r;
        for (int i = ci - r; i <= ci + r; i += (edge_row || r == 0) ? 1 : 2 * r) {
          if (i < 0 || i >= nx_) continue;
          for (std::size_t s : buckets_[static_cast<std::size_t>(j) * nx_ + i]) test(s, p, best);
        }
      }
      if (best.distance <= r * cell_) break;
      if (r * cell_ > reach + dist(p, Point{std::clamp(p.x, x0_, x0_ + nx_ * cell_),
                                             std::clamp(p.y, y0_, y0_ + ny_ * cell_)}))
        break;
    }
    if (best.distance > reach) best.distance = std::numeric_limits<double>::infinity();
    return best;
  }

  bool inside(Point p) const {
    if (segs_.empty() || p.y < y0_ || p.y > y0_ + ny_ * cell_) return false;
    bool in = false;
    for (std::size_t s : rows_[static_cast<std::size_t>(row(p.y))]) {
      const auto& poly = c_.loops[segs_[s].first];
      const Point a = poly.seg_start(segs_[s].second), b = poly.seg_end(segs_[s].second);
      if ((a.y > p.y) != (b.y > p.y)) {
        const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (p.x < xc) in = !in;
      }
    }
    return in;
  }

  double signed_distance(Point p, bool parity, Nearest* out = nullptr,
                         double reach = std::numeric_limits<double>::infinity()) const {
    const Nearest nb = nearest(p, reach);
    if (out) *out = nb;
    if (!std::isfinite(nb.distance)) return (inside(p) ? -1.0 : 1.0) * reach;
    if (parity) return (inside(p) ? -1.0 : 1.0) * nb.distance;
    return side_of(c_, nb, p) * nb.distance;
  }

 private:
  int col(double x) const { return std::clamp(static_cast<int>((x - x0_) / cell_), 0, nx_ - 1); }
  int row(double y) const { return std::clamp(static_cast<int>((y - y0_) / cell_), 0, ny_ - 1); }

  void test(std::size_t s, Point p, Nearest& best) const {
    const auto& poly = c_.loops[segs_[s].first];
    const std::size_t k = segs_[s].second;
    const Point a = poly.seg_start(k), b = poly.seg_end(k);
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double len2 = ex * ex + ey * ey;
    double t = len2 > 0 ? ((p.x - a.x) * ex + (p.y - a.y) * ey) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double d = std::hypot(a.x + t * ex - p.x, a.y + t * ey - p.y);
    if (d < best.distance || (d == best.distance && s < key(best))) best = {d, segs_[s].first, k, t};
  }
  std::size_t key(const Nearest& n) const {
    std::size_t base = 0;
    for (std::size_t l = 0; l < n.loop; ++l) base += c_.loops[l].segment_count();
    return base + n.seg;
  }

  const Contour& c_;
  std::vector<std::pair<std::size_t, std::size_t>> segs_;
  std::vector<std::vector<std::size_t>> buckets_;
  std::vector<std::vector<std::size_t>> rows_;
  double x0_ = 0, y0_ = 0, cell_ = 1;
  int nx_ = 1, ny_ = 1;
};

}  // namespace

double Polyline::length() const {
  double s = 0.0;
  for (std::size_t k = 0; k < segment_count(); ++k) s += dist(seg_start(k), seg_end(k));
  return s;
}

std::size_t Polyline::segment_count() const {
  if (points.size() < 2) return 0;
  return closed ? points.size() : points.size() - 1;
}

double Contour::length() const {
  double s = 0.0;
  for (const auto& l : loops) s += l.length();
  return s;
}

bool Contour::all_closed() const {
  return std::all_of(loops.begin(), loops.end(), [](const Polyline& l) { return l.closed; });
}

namespace {

// Zero in (0, 1) of the Lagrange polynomial through (s_k, v_k), found by
// bisection; v at s = 0 and s = 1 have opposite signs.
double edge_root(const double* s, const double* v, int n) {
  auto p = [&](double x) {
    double sum = 0.0;
    for (int a = 0; a < n; ++a) {
      double w = v[a];
      for (int b = 0; b < n; ++b)
        if (b != a) w *= (x - s[b]) / (s[a] - s[b]);
      sum += w;
    }
    return sum;
  };
  double lo = 0.0, hi = 1.0;
  const bool lo_neg = p(lo) < 0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((p(mid) < 0) == lo_neg)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Contour extract_contour(const Field2D& field, double level, EdgeInterp interp) {
  const auto& g = field.grid;
  const int nx = g.nx, ny = g.ny;
  const std::size_t n_h = static_cast<std::size_t>(nx - 1) * ny;
  const std::size_t n_edges = n_h + static_cast<std::size_t>(nx) * (ny - 1);
  auto h_edge = [&](int i, int j) { return static_cast<std::size_t>(j) * (nx - 1) + i; };
  auto v_edge = [&](int i, int j) { return n_h + static_cast<std::size_t>(j) * nx + i; };

  auto crossing = [&](std::size_t e) {
    int i0, j0, i1, j1;
    if (e < n_h) {
      j0 = j1 = static_cast<int>(e / (nx - 1));
      i0 = static_cast<int>(e % (nx - 1));
      i1 = i0 + 1;
    } else {
      const std::size_t r = e - n_h;
      j0 = static_cast<int>(r / nx);
      i0 = i1 = static_cast<int>(r % nx);
      j1 = j0 + 1;
    }
    const double va = field.at(i0, j0), vb = field.at(i1, j1);
    double t = (level - va) / (vb - va);
    if (interp == EdgeInterp::Cubic) {
      const int di = i1 - i0, dj = j1 - j0;
      const int n_line = di ? nx : ny;
      const int k0 = di ? i0 : j0;
      double sv[4], vv[4];
      int n = 0;
      for (int k = -1; k <= 2; ++k) {
        const int idx = k0 + k;
        if (idx < 0 || idx >= n_line) continue;
        sv[n] = k;
        vv[n] = field.at(i0 + k * di, j0 + k * dj) - level;
        ++n;
      }
      t = edge_root(sv, vv, n);
    }
    return Point{g.x(i0) + t * (g.x(i1) - g.x(i0)), g.y(j0) + t * (g.y(j1) - g.y(j0))};
  };

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> next(n_edges, kNone);
  std::vector<char> has_prev(n_edges, 0);

  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double c[4] = {field.at(i, j), field.at(i + 1, j), field.at(i + 1, j + 1),
                           field.at(i, j + 1)};
      const std::size_t e[4] = {h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
      bool low[4];
      for (int k = 0; k < 4; ++k) low[k] = c[k] < level;
      int rising[2], falling[2], nr = 0, nf = 0;
      for (int k = 0; k < 4; ++k) {
        const bool a = low[k], b = low[(k + 1) % 4];
        if (a && !b) rising[nr++] = k;
        if (!a && b) falling[nf++] = k;
      }
      if (nr == 0) continue;
      if (nr == 1) {
        next[e[rising[0]]] = e[falling[0]];
        has_prev[e[falling[0]]] = 1;
        continue;
      }
      const bool centre_low = 0.25 * (c[0] + c[1] + c[2] + c[3]) < level;
      for (int r = 0; r < 2; ++r) {
        const int k = rising[r];
        const int to = centre_low ? (k + 1) % 4 : (k + 3) % 4;
        next[e[k]] = e[to];
        has_prev[e[to]] = 1;
      }
    }
  }

  Contour out;
  out.level = level;
  std::vector<char> used(n_edges, 0);
  auto trace = [&](std::size_t start, bool closed) {
    Polyline poly;
    poly.closed = closed;
    std::size_t cur = start;
    while (cur != kNone && !used[cur]) {
      used[cur] = 1;
      const Point p = crossing(cur);
      if (poly.points.empty() || dist(poly.points.back(), p) > 1e-14) poly.points.push_back(p);
      cur = next[cur];
    }
    if (closed && poly.points.size() > 1 && dist(poly.points.front(), poly.points.back()) <= 1e-14)
      poly.points.pop_back();
    if (poly.points.size() >= (closed ? 3u : 2u)) out.loops.push_back(std::move(poly));
  };
  for (std::size_t e = 0; e < n_edges; ++e)
    if (next[e] != kNone && !has_prev[e] && !used[e]) trace(e, false);
  for (std::size_t e = 0; e < n_edges; ++e)
    if (next[e] != kNone && !used[e]) trace(e, true);

  if (out.loops.empty()) throw Error(ErrorKind::EmptyContour, "field does not cross the level");
  return out;
}

Polyline circle_polyline(double cx, double cy, double r, int n) {
  Polyline p;
  p.closed = true;
  for (int k = 0; k < n; ++k) {
    const double th = 2 * std::numbers::pi * k / n;
    p.points.push_back({cx + r * std::cos(th), cy + r * std::sin(th)});
  }
  return p;
}

double distance_to(const Contour& c, Point p) { return nearest(c, p).distance; }

double signed_distance_at(const Contour& c, Point p) {
  return signed_from(c, nearest(c, p), p, c.all_closed());
}

double cutoff_distance(double s, double d0) {
  const double a = std::abs(s);
  double v;
  if (a <= d0) {
    v = a;
  } else if (a >= 2 * d0) {
    v = 2 * d0;
  } else {
    const double t = (a - d0) / d0;
    v = d0 + d0 * (-t * t * t + t * t + t);
  }
  return s < 0 ? -v : v;
}

SignedDistanceField signed_distance(const Contour& c, const Grid2D& grid, double d0cut,
                                    int workers, double reach, const std::vector<double>* hint) {
  if (c.empty()) throw Error(ErrorKind::EmptyContour, "signed distance of an empty contour");
  SignedDistanceField out{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size()),
                          d0cut};
  const bool parity = c.all_closed();
  const SegmentIndex index(c);
  parallel_rows(static_cast<std::size_t>(grid.ny), workers, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < grid.nx; ++i) {
      const Point p{grid.x(i), grid.y(j)};
      const std::size_t k = grid.index(i, j);
      const double s = (hint && std::abs((*hint)[k]) >= 0.9 * reach)
                           ? std::copysign(reach, (*hint)[k])
                           : index.signed_distance(p, parity, nullptr, reach);
      out.raw[grid.index(i, j)] = s;
      out.d[grid.index(i, j)] = cutoff_distance(s, d0cut);
    }
  });
  return out;
}

RegionAreas region_areas(const Contour& c, double domain_area) {
  double enclosed = 0.0;
  for (const auto& loop : c.loops) {
    if (!loop.closed) throw Error(ErrorKind::BadInterface, "region areas need closed loops");
    double s = 0.0;
    for (std::size_t k = 0; k < loop.points.size(); ++k) {
      const Point a = loop.seg_start(k), b = loop.seg_end(k);
      s += a.x * b.y - b.x * a.y;
    }
    enclosed += 0.5 * s;
  }
  RegionAreas r;
  r.area_minus = enclosed;
  r.area_plus = domain_area - enclosed;
  r.gamma = r.area_plus - r.area_minus;
  return r;
}

namespace {

std::vector<Point> resample(const Polyline& poly, double spacing) {
  const double L = poly.length();
  const std::size_t segs = poly.segment_count();
  const int n = std::max(8, static_cast<int>(std::lround(L / spacing)));
  const double ds = poly.closed ? L / n : L / std::max(1, n - 1);
  std::vector<Point> out;
  std::size_t k = 0;
  double seg_start_s = 0.0;
  for (int m = 0; m < n; ++m) {
    const double s = m * ds;
    while (k + 1 < segs && seg_start_s + dist(poly.seg_start(k), poly.seg_end(k)) < s) {
      seg_start_s += dist(poly.seg_start(k), poly.seg_end(k));
      ++k;
    }
    const Point a = poly.seg_start(k), b = poly.seg_end(k);
    const double len = dist(a, b);
    const double t = len > 0 ? std::clamp((s - seg_start_s) / len, 0.0, 1.0) : 0.0;
    out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }
  return out;
}

double circumcurvature(Point a, Point b, Point c) {
  const double denom = dist(a, b) * dist(b, c) * dist(a, c);
  if (denom == 0.0) return 0.0;
  return 2.0 * cross(a, b, c) / denom;
}

}  // namespace

std::vector<CurvatureSample> curvature_samples(const Contour& c, double spacing) {
  std::vector<CurvatureSample> out;
  for (const auto& poly : c.loops) {
    const std::size_t segs = poly.segment_count();
    if (segs == 0) continue;
    const double ds = spacing > 0 ? spacing : 4.0 * poly.length() / segs;
    const auto pts = resample(poly, ds);
    const std::size_t n = pts.size();
    for (std::size_t k = 0; k < n; ++k) {
      if (!poly.closed && (k == 0 || k + 1 == n)) continue;
      const Point a = pts[(k + n - 1) % n], b = pts[k], d = pts[(k + 1) % n];
      out.push_back({b, circumcurvature(a, b, d)});
    }
  }
  return out;
}

Contour refine_contour(const Contour& c, int factor) {
  Contour out;
  out.level = c.level;
  for (const auto& poly : c.loops) {
    Polyline r;
    r.closed = poly.closed;
    const long n = static_cast<long>(poly.points.size());
    const std::size_t segs = poly.segment_count();
    auto pt = [&](long k) { return poly.points[static_cast<std::size_t>((k % n + n) % n)]; };
    // Signed curvature of the circle through the triple centred on vertex k.
    auto vertex_kappa = [&](long k) {
      if (!poly.closed && (k <= 0 || k >= n - 1)) return 0.0;
      return circumcurvature(pt(k - 1), pt(k), pt(k + 1));
    };
    for (std::size_t k = 0; k < segs; ++k) {
      const long i = static_cast<long>(k);
      const Point a = pt(i), b = pt(i + 1);
      r.points.push_back(a);
      if (n < 3) continue;
      const double kappa = 0.5 * (vertex_kappa(i) + vertex_kappa(i + 1));
      const double chord = dist(a, b);
      if (chord == 0.0) continue;
      const Point left{-(b.y - a.y) / chord, (b.x - a.x) / chord};
      for (int m = 1; m < factor; ++m) {
        const double s = static_cast<double>(m) / factor;
        // Bulge of a circular arc of curvature kappa over the chord; outward
        // (to the right) for positive curvature.
        double bulge = 0.5 * kappa * chord * chord * s * (1 - s);
        const double half = 0.5 * chord * std::abs(kappa);
        if (kappa != 0.0 && half < 0.9) {
          const double rad = 1.0 / std::abs(kappa);
          const double off = chord * (s - 0.5);
          bulge = std::copysign(std::sqrt(rad * rad - off * off) - std::sqrt(rad * rad - 0.25 * chord * chord),
                                kappa);
        }
        r.points.push_back({a.x + s * (b.x - a.x) - bulge * left.x, a.y + s * (b.y - a.y) - bulge * left.y});
      }
    }
    if (!poly.closed && n > 0) r.points.push_back(poly.points.back());
    out.loops.push_back(std::move(r));
  }
  return out;
}

std::vector<Point> densify(const Contour& c, double spacing) {
  std::vector<Point> out;
  for (const auto& poly : c.loops) {
    const std::size_t segs = poly.segment_count();
    if (segs == 0 && !poly.points.empty()) out.push_back(poly.points.front());
    for (std::size_t k = 0; k < segs; ++k) {
      const Point a = poly.seg_start(k), b = poly.seg_end(k);
      const int pieces = std::max(1, static_cast<int>(std::ceil(dist(a, b) / spacing)));
      for (int m = 0; m < pieces; ++m) {
        const double t = static_cast<double>(m) / pieces;
        out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
      }
    }
    if (!poly.closed && !poly.points.empty()) out.push_back(poly.points.back());
  }
  return out;
}

double hausdorff(const Contour& a, const Contour& b, double spacing) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyContour, "hausdorff of an empty contour");
  double h = 0.0;
  const SegmentIndex ia(a), ib(b);
  for (const Point& p : densify(a, spacing)) h = std::max(h, ib.nearest(p).distance);
  for (const Point& p : densify(b, spacing)) h = std::max(h, ia.nearest(p).distance);
  return h;
}

WidthEstimate transition_width(const Field2D& field, double eta, const Contour& contour) {
  if (contour.empty()) throw Error(ErrorKind::EmptyContour, "transition width without a contour");
  const auto& g = field.grid;
  WidthEstimate w;
  w.length = contour.length();

  // Arclength bins per polyline.
  const double bin_len = std::max(4.0 * g.h(), w.length / 256.0);
  std::vector<std::vector<double>> cum(contour.loops.size());
  std::vector<std::size_t> bin_offset(contour.loops.size() + 1, 0);
  for (std::size_t l = 0; l < contour.loops.size(); ++l) {
    const auto& poly = contour.loops[l];
    cum[l].assign(poly.segment_count() + 1, 0.0);
    for (std::size_t k = 0; k < poly.segment_count(); ++k)
      cum[l][k + 1] = cum[l][k] + dist(poly.seg_start(k), poly.seg_end(k));
    const auto nb = static_cast<std::size_t>(std::max(1.0, std::floor(cum[l].back() / bin_len)));
    bin_offset[l + 1] = bin_offset[l] + nb;
  }
  std::vector<double> lo(bin_offset.back(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(bin_offset.back(), -std::numeric_limits<double>::infinity());

  std::vector<double> rows(static_cast<std::size_t>(g.ny), 0.0);
  std::size_t band_nodes = 0;
  const bool parity = contour.all_closed();
  const SegmentIndex index(contour);
  for (int j = 0; j < g.ny; ++j) {
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      if (std::abs(field.at(i, j)) > 1.0 - eta) continue;
      ++band_nodes;
      s += (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
      const Point p{g.x(i), g.y(j)};
      Nearest nb;
      const double sd = index.signed_distance(p, parity, &nb);
      const auto& c = cum[nb.loop];
      const double arc = c[nb.seg] + nb.t * (c[nb.seg + 1] - c[nb.seg]);
      const std::size_t nbins = bin_offset[nb.loop + 1] - bin_offset[nb.loop];
      const auto bin = std::min(nbins - 1, static_cast<std::size_t>(arc / c.back() * nbins));
      const std::size_t idx = bin_offset[nb.loop] + bin;
      lo[idx] = std::min(lo[idx], sd);
      hi[idx] = std::max(hi[idx], sd);
    }
    rows[static_cast<std::size_t>(j)] = ((j == 0 || j == g.ny - 1) ? 0.5 : 1.0) * s;
  }
  if (band_nodes == 0) throw Error(ErrorKind::EmptyContour, "no nodes inside the transition band");
  w.band_area = pairwise_sum(rows) * g.hx() * g.hy();
  w.width = w.length > 0 ? w.band_area / w.length : 0.0;
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (hi[k] >= lo[k]) w.max_extent = std::max(w.max_extent, hi[k] - lo[k]);
  return w;
}

}  // namespace nlac
