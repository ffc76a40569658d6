#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tetra/errors.hpp"
#include "tetra/pb4.hpp"

namespace tetra {

bool GridWindow::on_frame(int i, int j) const {
  if (j == 0 || j == nodes_s() - 1) return true;
  if (kind == WindowKind::kPlane && (i == 0 || i == nodes_u() - 1)) return true;
  return false;
}

std::size_t NodeMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool NodeMask::intersects(const NodeMask& other) const {
  for (std::size_t k = 0; k < bits_.size(); ++k)
    if (bits_[k] && other.bits_[k]) return true;
  return false;
}

bool NodeMask::contains(const NodeMask& other) const {
  for (std::size_t k = 0; k < bits_.size(); ++k)
    if (other.bits_[k] && !bits_[k]) return false;
  return true;
}

NodeMask NodeMask::dilated(int r, bool periodic_u) const {
  NodeMask out(nu_, ns_);
  for (int j = 0; j < ns_; ++j)
    for (int i = 0; i < nu_; ++i) {
      if (!(*this)(i, j)) continue;
      for (int dj = -r; dj <= r; ++dj) {
        const int jj = j + dj;
        if (jj < 0 || jj >= ns_) continue;
        for (int di = -r; di <= r; ++di) {
          int ii = i + di;
          if (periodic_u) {
            ii = ((ii % nu_) + nu_) % nu_;
          } else if (ii < 0 || ii >= nu_) {
            continue;
          }
          out.set(ii, jj);
        }
      }
    }
  return out;
}

std::string to_string(MaskId id) {
  switch (id) {
    case MaskId::kX0: return "X0";
    case MaskId::kX1: return "X1";
    case MaskId::kY0: return "Y0";
    case MaskId::kY1: return "Y1";
  }
  return "?";
}

namespace {

void check_window(const GridWindow& w) {
  if (w.cells_u < 4 || w.cells_s < 4) throw ParameterError("pb4 window needs at least 4 cells per axis");
  if (!(w.u_max > w.u_min) || !(w.s_max > w.s_min))
    throw ParameterError("pb4 window has an empty side");
}

}  // namespace

Pb4Problem Pb4Problem::from_geometry(const Pb4Geometry& geometry, int cells_u, int cells_s) {
  Pb4Problem p;
  p.window_ = geometry.window;
  p.window_.cells_u = cells_u;
  p.window_.cells_s = cells_s;
  check_window(p.window_);
  const auto& w = p.window_;
  const double radius = 0.5 * std::min(w.hu(), w.hs()) * (1.0 + 1e-9);
  for (std::size_t m = 0; m < 4; ++m) {
    NodeMask mask(w.nodes_u(), w.nodes_s());
    for (int j = 0; j < w.nodes_s(); ++j)
      for (int i = 0; i < w.nodes_u(); ++i)
        if (geometry.sets[m](w.u(i), w.s(j)) <= radius) mask.set(i, j);
    if (mask.empty()) {
      std::ostringstream os;
      os << "pb4 set " << geometry.names[m] << " misses every node of the " << cells_u << "x"
         << cells_s << " grid; choose a resolution whose nodes land on the sets";
      throw ParameterError(os.str());
    }
    p.raw_[m] = std::move(mask);
  }
  p.names_ = geometry.names;
  p.thickening_ = geometry.thickening;
  p.geometry_ = geometry;
  p.finalize();
  return p;
}

Pb4Problem Pb4Problem::from_masks(const GridWindow& window, std::array<NodeMask, 4> masks,
                                  int thickening) {
  check_window(window);
  for (const auto& m : masks)
    if (m.nu() != window.nodes_u() || m.ns() != window.nodes_s())
      throw ParameterError("pb4 mask shape does not match the window");
  Pb4Problem p;
  p.window_ = window;
  p.raw_ = std::move(masks);
  p.thickening_ = thickening;
  p.finalize();
  return p;
}

void Pb4Problem::finalize() {
  if (thickening_ < 0) throw ParameterError("pb4 thickening radius must be non-negative");
  const bool periodic = window_.kind == WindowKind::kCylinder;
  for (std::size_t m = 0; m < 4; ++m) thick_[m] = raw_[m].dilated(thickening_, periodic);
  auto require_disjoint = [&](MaskId a, MaskId b) {
    if (mask(a).intersects(mask(b))) {
      std::ostringstream os;
      os << "pb4 masks " << mask_name(a) << " and " << mask_name(b)
         << " intersect after thickening by " << thickening_;
      throw ParameterError(os.str());
    }
  };
  require_disjoint(MaskId::kX0, MaskId::kX1);
  require_disjoint(MaskId::kY0, MaskId::kY1);
  // the upper masks force values >= 1, incompatible with the zero frame
  for (MaskId id : {MaskId::kX1, MaskId::kY1}) {
    const auto& m = mask(id);
    for (int j = 0; j < window_.nodes_s(); ++j)
      for (int i = 0; i < window_.nodes_u(); ++i)
        if (m(i, j) && window_.on_frame(i, j))
          throw ParameterError("pb4 mask " + mask_name(id) + " touches the window frame");
  }
}

Pb4Problem Pb4Problem::regrid(int cells_u, int cells_s) const {
  if (!geometry_) throw ParameterError("pb4 problem built from masks cannot be regridded");
  auto g = *geometry_;
  g.names = names_;
  g.thickening = thickening_;
  return from_geometry(g, cells_u, cells_s);
}

namespace {

template <class T>
std::array<T, 4> permute(const std::array<T, 4>& a, std::array<int, 4> order) {
  return {a[static_cast<std::size_t>(order[0])], a[static_cast<std::size_t>(order[1])],
          a[static_cast<std::size_t>(order[2])], a[static_cast<std::size_t>(order[3])]};
}

}  // namespace

Pb4Problem Pb4Problem::relabeled() const {
  constexpr std::array<int, 4> order{3, 2, 0, 1};
  Pb4Problem p = *this;
  p.raw_ = permute(raw_, order);
  p.names_ = permute(names_, order);
  if (geometry_) {
    p.geometry_->sets = permute(geometry_->sets, order);
    p.geometry_->names = p.names_;
  }
  p.finalize();
  return p;
}

Pb4Problem Pb4Problem::swapped_x() const {
  constexpr std::array<int, 4> order{1, 0, 2, 3};
  Pb4Problem p = *this;
  p.raw_ = permute(raw_, order);
  p.names_ = permute(names_, order);
  if (geometry_) {
    p.geometry_->sets = permute(geometry_->sets, order);
    p.geometry_->names = p.names_;
  }
  p.finalize();
  return p;
}

Pb4Problem Pb4Problem::with_masks(std::array<NodeMask, 4> raw, int thickening) const {
  Pb4Problem p = from_masks(window_, std::move(raw), thickening);
  p.names_ = names_;
  return p;
}

namespace {

constexpr double kMarginFraction = 10.0 / 108.0;

// distance to the segment {u = u0, s in [s0, s1]} or {s = s0, u in [u0, u1]}
SetDistance horizontal(double s0, double u0, double u1) {
  return [=](double u, double s) {
    const double du = std::max({0.0, u0 - u, u - u1});
    return std::hypot(du, s - s0);
  };
}

SetDistance vertical(double u0, double s0, double s1) {
  return [=](double u, double s) {
    const double ds = std::max({0.0, s0 - s, s - s1});
    return std::hypot(u - u0, ds);
  };
}

}  // namespace

Pb4Geometry prototype_geometry(double R0, double R1, double T) {
  if (!(R0 > 0.0 && R1 > R0)) throw ParameterError("prototype needs 0 < R0 < R1");
  if (!(T > 0.0 && T < 1.0)) throw ParameterError("prototype needs 0 < T < 1");
  Pb4Geometry g;
  const double mu = kMarginFraction * T, ms = kMarginFraction * (R1 - R0);
  g.window.kind = WindowKind::kPlane;
  g.window.u_min = -mu;
  g.window.u_max = T + mu;
  g.window.s_min = R0 - ms;
  g.window.s_max = R1 + ms;
  // floor, ceiling, low wall (Reeb time T), high wall (Reeb time 0)
  g.sets = {horizontal(R0, 0.0, T), horizontal(R1, 0.0, T), vertical(T, R0, R1),
            vertical(0.0, R0, R1)};
  g.names = {"floor", "ceiling", "low_wall", "high_wall"};
  g.thickening = 1;
  return g;
}

Pb4Problem prototype_problem(double R0, double R1, double T, int cells) {
  return Pb4Problem::from_geometry(prototype_geometry(R0, R1, T), cells, cells);
}

GridField bracket_field(const GridWindow& w, const GridField& f, const GridField& g) {
  const int nu = w.nodes_u(), ns = w.nodes_s();
  if (f.nu() != nu || f.ns() != ns || g.nu() != nu || g.ns() != ns)
    throw ParameterError("pb4 field shape does not match the window");
  const bool periodic = w.kind == WindowKind::kCylinder;
  const double c = 1.0 / (4.0 * w.hu() * w.hs());
  GridField j_field(nu, ns, 0.0);
  const int i0 = periodic ? 0 : 1, i1 = periodic ? nu : nu - 1;
  for (int j = 1; j < ns - 1; ++j)
    for (int i = i0; i < i1; ++i) {
      const int e = periodic ? (i + 1) % nu : i + 1;
      const int wv = periodic ? (i + nu - 1) % nu : i - 1;
      const double fu = f(e, j) - f(wv, j), fs = f(i, j + 1) - f(i, j - 1);
      const double gu = g(e, j) - g(wv, j), gs = g(i, j + 1) - g(i, j - 1);
      j_field(i, j) = c * (fu * gs - fs * gu);
    }
  return j_field;
}

void check_feasible(const Pb4Problem& problem, const GridField& f, const GridField& g) {
  const auto& w = problem.window();
  constexpr double tol = 1e-12;
  if (f.nu() != w.nodes_u() || f.ns() != w.nodes_s() || g.nu() != w.nodes_u() ||
      g.ns() != w.nodes_s())
    throw ParameterError("pb4 field shape does not match the window");
  auto fail = [&](const std::string& what, int i, int j) {
    std::ostringstream os;
    os << "infeasible pair: " << what << " violated at node (" << i << ", " << j << ")";
    throw InfeasibleError(os.str(), what);
  };
  for (int j = 0; j < w.nodes_s(); ++j)
    for (int i = 0; i < w.nodes_u(); ++i) {
      if (!std::isfinite(f(i, j)) || !std::isfinite(g(i, j))) fail("finite values", i, j);
      if (w.on_frame(i, j) && (std::abs(f(i, j)) > tol || std::abs(g(i, j)) > tol))
        fail("frame", i, j);
      if (problem.mask(MaskId::kX0)(i, j) && f(i, j) > tol) fail(problem.mask_name(MaskId::kX0), i, j);
      if (problem.mask(MaskId::kX1)(i, j) && f(i, j) < 1.0 - tol)
        fail(problem.mask_name(MaskId::kX1), i, j);
      if (problem.mask(MaskId::kY0)(i, j) && g(i, j) > tol) fail(problem.mask_name(MaskId::kY0), i, j);
      if (problem.mask(MaskId::kY1)(i, j) && g(i, j) < 1.0 - tol)
        fail(problem.mask_name(MaskId::kY1), i, j);
    }
}

double feasible_pair_value(const Pb4Problem& problem, const GridField& f, const GridField& g,
                           BracketSign sign) {
  check_feasible(problem, f, g);
  const auto j_field = bracket_field(problem.window(), f, g);
  const auto& w = problem.window();
  const double sgn = sign == BracketSign::kPlus ? 1.0 : -1.0;
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 1; j < w.nodes_s() - 1; ++j)
    for (int i = 0; i < w.nodes_u(); ++i) {
      if (w.on_frame(i, j)) continue;
      best = std::max(best, sgn * j_field(i, j));
    }
  return best;
}

void project_feasible(const Pb4Problem& problem, GridField& f, GridField& g) {
  const auto& w = problem.window();
  const auto& x0 = problem.mask(MaskId::kX0);
  const auto& x1 = problem.mask(MaskId::kX1);
  const auto& y0 = problem.mask(MaskId::kY0);
  const auto& y1 = problem.mask(MaskId::kY1);
  for (int j = 0; j < w.nodes_s(); ++j)
    for (int i = 0; i < w.nodes_u(); ++i) {
      if (w.on_frame(i, j)) {
        f(i, j) = 0.0;
        g(i, j) = 0.0;
        continue;
      }
      if (x0(i, j)) f(i, j) = std::min(f(i, j), 0.0);
      if (x1(i, j)) f(i, j) = std::max(f(i, j), 1.0);
      if (y0(i, j)) g(i, j) = std::min(g(i, j), 0.0);
      if (y1(i, j)) g(i, j) = std::max(g(i, j), 1.0);
    }
}

namespace {

struct Box {
  int i0 = 0, i1 = -1, j0 = 0, j1 = -1;
  bool empty() const { return i1 < i0; }
};

Box bounding_box(const NodeMask& m) {
  Box b{m.nu(), -1, m.ns(), -1};
  for (int j = 0; j < m.ns(); ++j)
    for (int i = 0; i < m.nu(); ++i)
      if (m(i, j)) {
        b.i0 = std::min(b.i0, i);
        b.i1 = std::max(b.i1, i);
        b.j0 = std::min(b.j0, j);
        b.j1 = std::max(b.j1, j);
      }
  return b;
}

// Profile along one axis of n nodes (indices 0 and n-1 on the frame).
// Cutoff: 1 on the hull [h0,h1], linear decay to 0 over the first 40% of
// each margin.  Ramp: 0 on the side of the zero set, linear across the gap,
// 1 on the side of the one set up to 60% of the margin, then linear to 0.
// The split keeps the decaying parts of a ramp and of the other field's
// cutoff on disjoint nodes.
std::vector<double> cutoff_profile(int n, int h0, int h1) {
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  const double ml = h0, mr = (n - 1) - h1;
  for (int k = 0; k < n; ++k) {
    double val = 1.0;
    if (k < h0) val = std::max(0.0, 1.0 - (h0 - k) / (0.4 * ml));
    if (k > h1) val = std::max(0.0, 1.0 - (k - h1) / (0.4 * mr));
    v[static_cast<std::size_t>(k)] = val;
  }
  return v;
}

std::vector<double> ramp_profile(int n, int h0, int h1, int zero_lo, int zero_hi, int one_lo,
                                 int one_hi) {
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  const double ml = h0, mr = (n - 1) - h1;
  const bool rising = zero_hi < one_lo;
  for (int k = 0; k < n; ++k) {
    double val;
    if (rising) {
      if (k <= zero_hi) val = 0.0;
      else if (k < one_lo) val = static_cast<double>(k - zero_hi) / (one_lo - zero_hi);
      else if (k <= h1) val = 1.0;
      else {
        const double d = k - h1;
        val = d <= 0.6 * mr ? 1.0 : std::max(0.0, (mr - d) / (0.4 * mr));
      }
    } else {
      if (k >= zero_lo) val = 0.0;
      else if (k > one_hi) val = static_cast<double>(zero_lo - k) / (zero_lo - one_hi);
      else if (k >= h0) val = 1.0;
      else {
        const double d = h0 - k;
        val = d <= 0.6 * ml ? 1.0 : std::max(0.0, (ml - d) / (0.4 * ml));
      }
    }
    v[static_cast<std::size_t>(k)] = val;
  }
  return v;
}

GridField interpolant(const Pb4Problem& problem, MaskId zero_id, MaskId one_id, const Box& hull) {
  const auto& w = problem.window();
  GridField field(w.nodes_u(), w.nodes_s(), 0.0);
  const Box z = bounding_box(problem.mask(zero_id));
  const Box o = bounding_box(problem.mask(one_id));
  if (o.empty()) return field;
  if (z.empty()) {
    // only the one set matters: a bump equal to 1 on the hull
    const auto cu = cutoff_profile(w.nodes_u(), hull.i0, hull.i1);
    const auto cs = cutoff_profile(w.nodes_s(), hull.j0, hull.j1);
    for (int j = 0; j < w.nodes_s(); ++j)
      for (int i = 0; i < w.nodes_u(); ++i)
        field(i, j) = cu[static_cast<std::size_t>(i)] * cs[static_cast<std::size_t>(j)];
    return field;
  }
  const bool s_separated = z.j1 < o.j0 || o.j1 < z.j0;
  const bool u_separated = z.i1 < o.i0 || o.i1 < z.i0;
  if (s_separated) {
    const auto r = ramp_profile(w.nodes_s(), hull.j0, hull.j1, z.j0, z.j1, o.j0, o.j1);
    const auto c = cutoff_profile(w.nodes_u(), hull.i0, hull.i1);
    for (int j = 0; j < w.nodes_s(); ++j)
      for (int i = 0; i < w.nodes_u(); ++i)
        field(i, j) = r[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(i)];
  } else if (u_separated) {
    const auto r = ramp_profile(w.nodes_u(), hull.i0, hull.i1, z.i0, z.i1, o.i0, o.i1);
    const auto c = cutoff_profile(w.nodes_s(), hull.j0, hull.j1);
    for (int j = 0; j < w.nodes_s(); ++j)
      for (int i = 0; i < w.nodes_u(); ++i)
        field(i, j) = r[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)];
  }
  // otherwise the projection alone produces the 0/1 indicator
  return field;
}

}  // namespace

std::pair<GridField, GridField> indicator_interpolants(const Pb4Problem& problem) {
  Box hull{problem.window().nodes_u(), -1, problem.window().nodes_s(), -1};
  for (MaskId id : {MaskId::kX0, MaskId::kX1, MaskId::kY0, MaskId::kY1}) {
    const Box b = bounding_box(problem.mask(id));
    if (b.empty()) continue;
    hull.i0 = std::min(hull.i0, b.i0);
    hull.i1 = std::max(hull.i1, b.i1);
    hull.j0 = std::min(hull.j0, b.j0);
    hull.j1 = std::max(hull.j1, b.j1);
  }
  if (problem.window().kind == WindowKind::kCylinder) {
    // no frame in u: let the cutoff cover the whole circle
    hull.i0 = 0;
    hull.i1 = problem.window().nodes_u() - 1;
  }
  GridField f = interpolant(problem, MaskId::kX0, MaskId::kX1, hull);
  GridField g = interpolant(problem, MaskId::kY0, MaskId::kY1, hull);
  project_feasible(problem, f, g);
  return {std::move(f), std::move(g)};
}

}  // namespace tetra
