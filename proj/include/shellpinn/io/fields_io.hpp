#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "shellpinn/errors.hpp"
#include "shellpinn/geometry/chart.hpp"
#include "shellpinn/training/fields.hpp"

namespace shellpinn {

inline constexpr std::array<const char*, 10> kFieldColumns{"xi1", "xi2", "x",  "y",      "z",
                                                            "u1",  "u2",  "u3", "theta1", "theta2"};

/// Shortest decimal form that parses back to the same double, independent of locale.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

inline double parse_double(std::string_view s, const std::string& what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw SchemaError(what + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(',', start);
    out.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

inline void write_fields_csv(std::ostream& os, const FieldTable& t) {
  for (std::size_t c = 0; c < kFieldColumns.size(); ++c) os << (c ? "," : "") << kFieldColumns[c];
  os << '\n';
  for (std::size_t j = 0; j < t.size(); ++j) {
    const std::array<double, 10> row{t.xi[j][0], t.xi[j][1], t.x[j][0],   t.x[j][1],   t.x[j][2],
                                     t.f[0][j],  t.f[1][j],  t.f[2][j],   t.f[3][j],   t.f[4][j]};
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_double(row[c]);
    os << '\n';
  }
}

inline void export_fields(const std::string& path, const FieldTable& t) {
  std::ofstream os(path);
  if (!os) throw Error("io", "cannot open '" + path + "' for writing");
  write_fields_csv(os, t);
  if (!os) throw Error("io", "failed writing '" + path + "'");
}

/// Reads a field table; columns are matched by header name and extra columns
/// are ignored.
inline FieldTable read_fields_csv(std::istream& is, const std::string& source = "input") {
  std::string line;
  if (!std::getline(is, line)) throw SchemaError(source + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[std::string(header[i])] = i;
  std::string missing;
  std::array<std::size_t, 10> idx{};
  for (std::size_t c = 0; c < kFieldColumns.size(); ++c) {
    const auto it = col.find(kFieldColumns[c]);
    if (it == col.end()) missing += (missing.empty() ? "" : ", ") + std::string(kFieldColumns[c]);
    else idx[c] = it->second;
  }
  if (!missing.empty()) throw SchemaError(source + ": missing columns " + missing);
  FieldTable t;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw SchemaError(source + " row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                        " cells, found " + std::to_string(cells.size()));
    }
    std::array<double, 10> v{};
    for (std::size_t c = 0; c < v.size(); ++c) {
      v[c] = parse_double(cells[idx[c]], source + " row " + std::to_string(row) + " column " + kFieldColumns[c]);
    }
    t.xi.push_back({v[0], v[1]});
    t.x.push_back({v[2], v[3], v[4]});
    for (int i = 0; i < 5; ++i) t.f[i].push_back(v[5 + i]);
  }
  if (t.size() == 0) throw SchemaError(source + ": no data rows");
  return t;
}

inline FieldTable ingest_reference(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("io", "cannot open '" + path + "'");
  return read_fields_csv(is, path);
}

/// Bilinear interpolation of a table given on a tensor grid in xi.
class GridInterpolator {
 public:
  explicit GridInterpolator(const FieldTable& t) {
    for (const auto& p : t.xi) {
      u_.push_back(p[0]);
      v_.push_back(p[1]);
    }
    unique(u_);
    unique(v_);
    if (u_.size() < 2 || v_.size() < 2 || u_.size() * v_.size() != t.size()) {
      throw SchemaError("reference points do not form a tensor grid in xi (" + std::to_string(u_.size()) + " x " +
                        std::to_string(v_.size()) + " distinct coordinates for " + std::to_string(t.size()) + " rows)");
    }
    for (auto& f : vals_) f.assign(t.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 0; j < t.size(); ++j) {
      const std::size_t k = index(locate(u_, t.xi[j][0]), locate(v_, t.xi[j][1]));
      for (int i = 0; i < 5; ++i) vals_[i][k] = t.f[i][j];
    }
    for (double x : vals_[0])
      if (std::isnan(x)) throw SchemaError("reference grid has duplicate or missing nodes");
  }

  std::array<double, 5> operator()(Vec2d xi) const {
    const std::size_t i = cell(u_, xi[0]), j = cell(v_, xi[1]);
    const double s = (xi[0] - u_[i]) / (u_[i + 1] - u_[i]), r = (xi[1] - v_[j]) / (v_[j + 1] - v_[j]);
    std::array<double, 5> out{};
    for (int f = 0; f < 5; ++f) {
      const auto& a = vals_[f];
      out[f] = (1 - s) * (1 - r) * a[index(i, j)] + s * (1 - r) * a[index(i + 1, j)] + (1 - s) * r * a[index(i, j + 1)] +
               s * r * a[index(i + 1, j + 1)];
    }
    return out;
  }

 private:
  static void unique(std::vector<double>& a) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  static std::size_t locate(const std::vector<double>& a, double x) {
    return static_cast<std::size_t>(std::lower_bound(a.begin(), a.end(), x) - a.begin());
  }
  /// Cell index with clamping, so points on or slightly outside the hull use the edge cell.
  static std::size_t cell(const std::vector<double>& a, double x) {
    const auto it = std::upper_bound(a.begin(), a.end(), x);
    const std::ptrdiff_t k = (it - a.begin()) - 1;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(a.size()) - 2));
  }
  std::size_t index(std::size_t i, std::size_t j) const { return i * v_.size() + j; }

  std::vector<double> u_, v_;
  std::array<std::vector<double>, 5> vals_;
};

/// Delaunay triangulation (Bowyer-Watson) of scattered points with
/// barycentric interpolation. Points outside the hull use the nearest
/// triangle's barycentric extrapolation.
class TriangulationInterpolator {
 public:
  explicit TriangulationInterpolator(const FieldTable& t) : table_(t) {
    if (t.size() < 3) throw SchemaError("reference needs at least 3 points for triangulation");
    triangulate();
    if (tris_.empty()) throw SchemaError("reference points are collinear");
  }

  std::size_t triangles() const { return tris_.size(); }

  std::array<double, 5> operator()(Vec2d xi) const {
    double best = -std::numeric_limits<double>::infinity();
    std::array<double, 3> bw{};
    std::size_t bt = 0;
    for (std::size_t k = 0; k < tris_.size(); ++k) {
      const auto w = barycentric(tris_[k], xi);
      const double m = std::min({w[0], w[1], w[2]});
      if (m > best) {
        best = m;
        bw = w;
        bt = k;
        if (m >= 0.0) break;
      }
    }
    std::array<double, 5> out{};
    for (int f = 0; f < 5; ++f)
      for (int c = 0; c < 3; ++c) out[f] += bw[c] * table_.f[f][tris_[bt][c]];
    return out;
  }

 private:
  using Tri = std::array<std::size_t, 3>;

  Vec2d pt(std::size_t i) const { return i < table_.size() ? table_.xi[i] : super_[i - table_.size()]; }

  std::array<double, 3> barycentric(const Tri& t, Vec2d p) const {
    const Vec2d a = pt(t[0]), b = pt(t[1]), c = pt(t[2]);
    const double det = (b[1] - c[1]) * (a[0] - c[0]) + (c[0] - b[0]) * (a[1] - c[1]);
    const double l0 = ((b[1] - c[1]) * (p[0] - c[0]) + (c[0] - b[0]) * (p[1] - c[1])) / det;
    const double l1 = ((c[1] - a[1]) * (p[0] - c[0]) + (a[0] - c[0]) * (p[1] - c[1])) / det;
    return {l0, l1, 1.0 - l0 - l1};
  }

  bool in_circumcircle(const Tri& t, Vec2d p) const {
    Vec2d a = pt(t[0]), b = pt(t[1]), c = pt(t[2]);
    const double orient = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    if (orient < 0) std::swap(b, c);
    const double ax = a[0] - p[0], ay = a[1] - p[1], bx = b[0] - p[0], by = b[1] - p[1], cx = c[0] - p[0],
                 cy = c[1] - p[1];
    const double d = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay) +
                     (cx * cx + cy * cy) * (ax * by - bx * ay);
    return d > 0.0;
  }

  void triangulate() {
    double lo1 = table_.xi[0][0], hi1 = lo1, lo2 = table_.xi[0][1], hi2 = lo2;
    for (const auto& p : table_.xi) {
      lo1 = std::min(lo1, p[0]);
      hi1 = std::max(hi1, p[0]);
      lo2 = std::min(lo2, p[1]);
      hi2 = std::max(hi2, p[1]);
    }
    const double span = std::max(hi1 - lo1, hi2 - lo2), m1 = 0.5 * (lo1 + hi1), m2 = 0.5 * (lo2 + hi2);
    super_ = {Vec2d{m1 - 20 * span, m2 - span}, Vec2d{m1 + 20 * span, m2 - span}, Vec2d{m1, m2 + 20 * span}};
    const std::size_t n = table_.size();
    std::vector<Tri> tris{{n, n + 1, n + 2}};
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2d p = table_.xi[i];
      std::vector<std::array<std::size_t, 2>> edges;
      std::vector<Tri> keep;
      keep.reserve(tris.size());
      for (const Tri& t : tris) {
        if (in_circumcircle(t, p)) {
          edges.push_back({t[0], t[1]});
          edges.push_back({t[1], t[2]});
          edges.push_back({t[2], t[0]});
        } else {
          keep.push_back(t);
        }
      }
      for (auto& e : edges)
        if (e[0] > e[1]) std::swap(e[0], e[1]);
      std::sort(edges.begin(), edges.end());
      for (std::size_t k = 0; k < edges.size(); ++k) {
        const bool dup = (k + 1 < edges.size() && edges[k] == edges[k + 1]) || (k > 0 && edges[k] == edges[k - 1]);
        if (!dup) keep.push_back({edges[k][0], edges[k][1], i});
      }
      tris = std::move(keep);
    }
    for (const Tri& t : tris) {
      if (t[0] >= n || t[1] >= n || t[2] >= n) continue;
      const Vec2d a = pt(t[0]), b = pt(t[1]), c = pt(t[2]);
      const double area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
      if (std::abs(area) > 1e-14 * span * span) tris_.push_back(t);
    }
  }

  const FieldTable& table_;
  std::array<Vec2d, 3> super_{};
  std::vector<Tri> tris_;
};

/// Reference fields interpolated to `pts`: bilinear on rectangles, barycentric
/// on a Delaunay triangulation for discs.
inline FieldTable interpolate_reference(const FieldTable& ref, const Chart& chart, const std::vector<Vec2d>& pts) {
  FieldTable out;
  out.xi = pts;
  for (auto& f : out.f) f.resize(pts.size());
  auto fill = [&](const auto& interp) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const auto v = interp(pts[j]);
      for (int i = 0; i < 5; ++i) out.f[i][j] = v[i];
      out.x.push_back(chart.map(pts[j][0], pts[j][1]));
    }
  };
  if (chart.domain().kind == DomainKind::disc) fill(TriangulationInterpolator(ref));
  else fill(GridInterpolator(ref));
  return out;
}

/// Reference fields interpolated to the points of `target` without a chart:
/// bilinear when the reference is a tensor grid, barycentric otherwise.
inline FieldTable interpolate_to(const FieldTable& ref, const FieldTable& target) {
  FieldTable out;
  out.xi = target.xi;
  out.x = target.x;
  for (auto& f : out.f) f.resize(target.size());
  auto fill = [&](const auto& interp) {
    for (std::size_t j = 0; j < target.size(); ++j) {
      const auto v = interp(target.xi[j]);
      for (int i = 0; i < 5; ++i) out.f[i][j] = v[i];
    }
  };
  bool grid = true;
  try {
    GridInterpolator g(ref);
    fill(g);
  } catch (const SchemaError&) {
    grid = false;
  }
  if (!grid) fill(TriangulationInterpolator(ref));
  return out;
}

}  // namespace shellpinn
