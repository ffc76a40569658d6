#include "tetra/tetragon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sphere_search.hpp"
#include "tetra/errors.hpp"

namespace tetra {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

std::vector<ParamInfo> legendrian_param_info(const ContactModel& model) {
  std::vector<ParamInfo> info;
  if (model.kind() == ModelKind::kCircle) return info;
  if (model.k() == 1) return {{ParamKind::kDiscrete, 2}};
  for (int i = 0; i + 1 < model.k() - 1; ++i) info.push_back({ParamKind::kInterval, 0});
  info.push_back({ParamKind::kPeriodic, 0});
  return info;
}

class TetragonRegion final : public Region {
 public:
  TetragonRegion(ContactModel model, RegionKind kind, double r0, double r1, double t)
      : model_(model), kind_(kind), r0_(r0), r1_(r1), t_(t), chart_(model.ambient_chart()) {}

  std::string name() const override { return to_string(kind_); }
  const PhaseChart& chart() const override { return chart_; }

  std::vector<ParamInfo> params() const override {
    std::vector<ParamInfo> info{{ParamKind::kInterval, 0}};
    auto leg = legendrian_param_info(model_);
    info.insert(info.end(), leg.begin(), leg.end());
    return info;
  }

  std::vector<double> point_at(std::span<const double> params) const override {
    const double a = std::clamp(params[0], 0.0, 1.0);
    const auto x = model_.legendrian_point(params.subspan(1));
    switch (kind_) {
      case RegionKind::kFloor:
        return model_.embed(model_.reeb_flow(x, a * t_), r0_);
      case RegionKind::kCeiling:
        return model_.embed(model_.reeb_flow(x, a * t_), r1_);
      case RegionKind::kHighWall:
        return model_.embed(x, wall_s(a));
      case RegionKind::kLowWall:
        return model_.embed(model_.reeb_flow(x, t_), wall_s(a));
    }
    return {};
  }

  std::vector<double> closest_point(std::span<const double> x) const override {
    switch (model_.kind()) {
      case ModelKind::kCircle:
        return closest_circle(x);
      case ModelKind::kUnitCotangentTorus:
        return closest_torus(x);
      case ModelKind::kContactSphere:
        return closest_sphere(x);
    }
    return {};
  }

  double level(std::span<const double> x) const override {
    const auto k = static_cast<std::size_t>(model_.k());
    const bool floor_like = kind_ == RegionKind::kFloor || kind_ == RegionKind::kCeiling;
    const double level_s = kind_ == RegionKind::kFloor ? r0_ : r1_;
    switch (model_.kind()) {
      case ModelKind::kCircle: {
        if (floor_like) return x[0] - level_s;
        const double uw = kind_ == RegionKind::kHighWall ? 0.0 : t_;
        return std::sin(2.0 * std::numbers::pi * (x[1] - uw)) / (2.0 * std::numbers::pi);
      }
      case ModelKind::kUnitCotangentTorus: {
        const auto p = x.first(k);
        if (floor_like) return dot(p, p) - level_s * level_s;
        const double np = norm(p);
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i)
          acc += wrap_centered(x[k + i]) * (np > 0.0 ? p[i] / np : (i == 0 ? 1.0 : 0.0));
        return kind_ == RegionKind::kHighWall ? acc : acc - t_;
      }
      case ModelKind::kContactSphere: {
        if (floor_like) return dot(x, x) - level_s;
        const double ang = kind_ == RegionKind::kHighWall ? 0.0 : -2.0 * t_;
        const double c = std::cos(ang), s = std::sin(ang);
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          const double p = c * x[i] - s * x[k + i];
          const double q = s * x[i] + c * x[k + i];
          acc += p * q;
        }
        return acc;
      }
    }
    return 0.0;
  }

 private:
  double wall_s(double a) const { return r0_ + a * (r1_ - r0_); }

  std::vector<double> closest_circle(std::span<const double> x) const {
    const double u = wrap_unit(x[1]);
    switch (kind_) {
      case RegionKind::kFloor:
      case RegionKind::kCeiling: {
        double cu = u;
        if (u > t_) cu = (u - t_) < (1.0 - u) ? t_ : 0.0;
        return {kind_ == RegionKind::kFloor ? r0_ : r1_, cu};
      }
      case RegionKind::kHighWall:
        return {std::clamp(x[0], r0_, r1_), 0.0};
      case RegionKind::kLowWall:
        return {std::clamp(x[0], r0_, r1_), t_};
    }
    return {};
  }

  std::vector<double> closest_torus(std::span<const double> x) const {
    const int ki = model_.k();
    const auto k = static_cast<std::size_t>(ki);
    std::vector<double> p(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<double> q(k);
    for (std::size_t i = 0; i < k; ++i) q[i] = wrap_centered(x[k + i]);
    std::vector<double> out(2 * k);
    auto finish = [&](std::span<const double> dir, double s, double tq) {
      for (std::size_t i = 0; i < k; ++i) {
        out[i] = s * dir[i];
        out[k + i] = wrap_unit(tq * dir[i]);
      }
      return out;
    };
    switch (kind_) {
      case RegionKind::kFloor:
      case RegionKind::kCeiling: {
        const double r = kind_ == RegionKind::kFloor ? r0_ : r1_;
        auto cost = [&](std::span<const double> d) {
          const double tq = std::clamp(dot(q, d), 0.0, t_);
          double acc = 0.0;
          for (std::size_t i = 0; i < k; ++i) {
            const double a = p[i] - r * d[i];
            const double b = q[i] - tq * d[i];
            acc += a * a + b * b;
          }
          return acc;
        };
        const auto d = detail::minimize_on_sphere(ki, cost);
        return finish(d, r, std::clamp(dot(q, d), 0.0, t_));
      }
      case RegionKind::kHighWall: {
        const double np = norm(p);
        std::vector<double> d(k, 0.0);
        if (np > 0.0)
          for (std::size_t i = 0; i < k; ++i) d[i] = p[i] / np;
        else
          d[0] = 1.0;
        return finish(d, std::clamp(np, r0_, r1_), 0.0);
      }
      case RegionKind::kLowWall: {
        auto cost = [&](std::span<const double> d) {
          const double s = std::clamp(dot(p, d), r0_, r1_);
          double acc = 0.0;
          for (std::size_t i = 0; i < k; ++i) {
            const double a = p[i] - s * d[i];
            const double b = q[i] - t_ * d[i];
            acc += a * a + b * b;
          }
          return acc;
        };
        const auto d = detail::minimize_on_sphere(ki, cost);
        return finish(d, std::clamp(dot(p, d), r0_, r1_), t_);
      }
    }
    return out;
  }

  std::vector<double> closest_sphere(std::span<const double> x) const {
    const auto k = static_cast<std::size_t>(model_.k());
    const auto p = x.first(k);
    const auto q = x.subspan(k, k);
    std::vector<double> out(2 * k, 0.0);
    if (kind_ == RegionKind::kFloor || kind_ == RegionKind::kCeiling) {
      const double rho = std::sqrt(kind_ == RegionKind::kFloor ? r0_ : r1_);
      // maximize |cos(psi) p + sin(psi) q|^2 = A + B cos(2 psi) + C sin(2 psi), 2 psi in [0, 4T]
      const double pp = dot(p, p), qq = dot(q, q);
      const double a = 0.5 * (pp + qq), b = 0.5 * (pp - qq), c = dot(p, q);
      const double phi_max = 4.0 * t_;
      auto val = [&](double phi) { return a + b * std::cos(phi) + c * std::sin(phi); };
      double best_phi = 0.0;
      double best = val(0.0);
      if (val(phi_max) > best) {
        best = val(phi_max);
        best_phi = phi_max;
      }
      double crit = std::atan2(c, b);
      if (crit < 0.0) crit += 2.0 * std::numbers::pi;
      if (crit <= phi_max && val(crit) > best) {
        best = val(crit);
        best_phi = crit;
      }
      const double psi = 0.5 * best_phi;
      const double cs = std::cos(psi), sn = std::sin(psi);
      std::vector<double> w(k);
      for (std::size_t i = 0; i < k; ++i) w[i] = cs * p[i] + sn * q[i];
      const double nw = norm(w);
      std::vector<double> e(k, 0.0);
      if (nw > 1e-300)
        for (std::size_t i = 0; i < k; ++i) e[i] = w[i] / nw;
      else
        e[0] = 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        out[i] = rho * cs * e[i];
        out[k + i] = rho * sn * e[i];
      }
      return out;
    }
    // walls: rotate into the frame where the wall lies in q = 0
    const double ang = kind_ == RegionKind::kHighWall ? 0.0 : 2.0 * t_;
    const double c = std::cos(ang), s = std::sin(ang);
    std::vector<double> pr(k);
    for (std::size_t i = 0; i < k; ++i) pr[i] = c * p[i] + s * q[i];
    const double np = norm(pr);
    const double sigma = std::clamp(np, std::sqrt(r0_), std::sqrt(r1_));
    for (std::size_t i = 0; i < k; ++i) {
      const double e = np > 0.0 ? pr[i] / np : (i == 0 ? 1.0 : 0.0);
      out[i] = c * sigma * e;
      out[k + i] = s * sigma * e;
    }
    return out;
  }

  ContactModel model_;
  RegionKind kind_;
  double r0_, r1_, t_;
  PhaseChart chart_;
};

class StabilizedRegion final : public Region {
 public:
  StabilizedRegion(RegionPtr base, int extra, Stabilization mode)
      : base_(std::move(base)),
        extra_(extra),
        mode_(mode),
        chart_(base_->chart().extended(extra, true)) {}

  std::string name() const override { return base_->name(); }
  const PhaseChart& chart() const override { return chart_; }

  std::vector<ParamInfo> params() const override {
    auto info = base_->params();
    for (int i = 0; i < extra_; ++i) info.push_back({ParamKind::kPeriodic, 0});
    return info;
  }

  std::vector<double> point_at(std::span<const double> params) const override {
    const auto nb = base_->params().size();
    const auto base_pt = base_->point_at(params.first(nb));
    std::vector<double> extra_q(params.begin() + static_cast<std::ptrdiff_t>(nb), params.end());
    return assemble(base_pt, std::vector<double>(static_cast<std::size_t>(extra_), 0.0), extra_q);
  }

  std::vector<double> closest_point(std::span<const double> x) const override {
    std::vector<double> base_x, p_extra, q_extra;
    split(x, base_x, p_extra, q_extra);
    const auto cp = base_->closest_point(base_x);
    if (mode_ == Stabilization::kZeroSection) std::fill(p_extra.begin(), p_extra.end(), 0.0);
    return assemble(cp, p_extra, q_extra);
  }

  double level(std::span<const double> x) const override {
    std::vector<double> base_x, p_extra, q_extra;
    split(x, base_x, p_extra, q_extra);
    return base_->level(base_x);
  }

 private:
  void split(std::span<const double> x, std::vector<double>& base_x, std::vector<double>& p_extra,
             std::vector<double>& q_extra) const {
    const int n = base_->chart().dim_pairs();
    const int m = n + extra_;
    base_x.resize(static_cast<std::size_t>(2 * n));
    project_to_base(x, n, base_x);
    p_extra.assign(x.begin() + n, x.begin() + m);
    q_extra.assign(x.begin() + m + n, x.begin() + 2 * m);
  }

  std::vector<double> assemble(std::span<const double> base_x, std::span<const double> p_extra,
                               std::span<const double> q_extra) const {
    const auto n = static_cast<std::size_t>(base_->chart().dim_pairs());
    std::vector<double> out;
    out.insert(out.end(), base_x.begin(), base_x.begin() + static_cast<std::ptrdiff_t>(n));
    out.insert(out.end(), p_extra.begin(), p_extra.end());
    out.insert(out.end(), base_x.begin() + static_cast<std::ptrdiff_t>(n), base_x.end());
    out.insert(out.end(), q_extra.begin(), q_extra.end());
    chart_.reduce(out);
    return out;
  }

  RegionPtr base_;
  int extra_;
  Stabilization mode_;
  PhaseChart chart_;
};

}  // namespace

double chart_distance(const PhaseChart& chart, std::span<const double> a,
                      std::span<const double> b) {
  double acc = 0.0;
  for (int i = 0; i < chart.dim(); ++i) {
    const double d =
        chart.difference(i, a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(i)]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

double Region::distance(std::span<const double> x) const {
  return chart_distance(chart(), x, closest_point(x));
}

std::vector<std::vector<double>> Region::seed_params(int count) const {
  const auto info = params();
  std::size_t fixed = 1;
  int continuous = 0;
  for (const auto& p : info) {
    if (p.kind == ParamKind::kDiscrete)
      fixed *= static_cast<std::size_t>(p.levels);
    else
      ++continuous;
  }
  const double budget = std::max(1.0, static_cast<double>(count) / static_cast<double>(fixed));
  const int per_axis =
      continuous == 0 ? 1 : std::max(1, static_cast<int>(std::lround(std::pow(budget, 1.0 / continuous))));
  std::vector<std::vector<double>> axes;
  for (const auto& p : info) {
    std::vector<double> values;
    if (p.kind == ParamKind::kDiscrete) {
      for (int j = 0; j < p.levels; ++j) values.push_back(static_cast<double>(j) / p.levels);
    } else if (p.kind == ParamKind::kPeriodic) {
      for (int j = 0; j < per_axis; ++j) values.push_back(static_cast<double>(j) / per_axis);
    } else if (per_axis == 1) {
      values.push_back(0.5);
    } else {
      for (int j = 0; j < per_axis; ++j) values.push_back(static_cast<double>(j) / (per_axis - 1));
    }
    axes.push_back(std::move(values));
  }
  std::vector<std::vector<double>> seeds{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : seeds)
      for (double v : axis) {
        auto s = prefix;
        s.push_back(v);
        next.push_back(std::move(s));
      }
    seeds = std::move(next);
  }
  return seeds;
}

void Region::normalize_params(std::span<double> values) const {
  const auto info = params();
  for (std::size_t i = 0; i < info.size() && i < values.size(); ++i) {
    if (info[i].kind == ParamKind::kInterval)
      values[i] = std::clamp(values[i], 0.0, 1.0);
    else
      values[i] = wrap_unit(values[i]);
  }
}

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::kFloor:
      return "floor";
    case RegionKind::kCeiling:
      return "ceiling";
    case RegionKind::kLowWall:
      return "low_wall";
    case RegionKind::kHighWall:
      return "high_wall";
  }
  return "?";
}

Tetragon::Tetragon(ContactModel model, double r0, double r1, double t)
    : model_(model), r0_(r0), r1_(r1), t_(t) {
  floor_ = std::make_shared<TetragonRegion>(model, RegionKind::kFloor, r0, r1, t);
  ceiling_ = std::make_shared<TetragonRegion>(model, RegionKind::kCeiling, r0, r1, t);
  low_ = std::make_shared<TetragonRegion>(model, RegionKind::kLowWall, r0, r1, t);
  high_ = std::make_shared<TetragonRegion>(model, RegionKind::kHighWall, r0, r1, t);
}

RegionPtr Tetragon::region_ptr(RegionKind kind) const {
  switch (kind) {
    case RegionKind::kFloor:
      return floor_;
    case RegionKind::kCeiling:
      return ceiling_;
    case RegionKind::kLowWall:
      return low_;
    case RegionKind::kHighWall:
      return high_;
  }
  return floor_;
}

double Tetragon::reeb_time(std::span<const double> x) const {
  double s = 0.0;
  const auto sigma = model_.project(x, s);
  return model_.reeb_time(sigma);
}

Tetragon build_tetragon(const ContactModel& model, double R0, double R1, double T) {
  if (!(R0 > 0.0) || !(R1 > R0)) {
    std::ostringstream os;
    os << "tetragon needs 0 < R0 < R1 (got R0=" << R0 << ", R1=" << R1 << ")";
    throw ParameterError(os.str());
  }
  const double tmax = model.max_T();
  const bool ok = T > 0.0 && (model.max_T_inclusive() ? T <= tmax * (1.0 + 1e-14) : T < tmax);
  if (!ok) {
    std::ostringstream os;
    os << "T=" << T << " violates the bound for " << model.name() << ": need 0 < T "
       << (model.max_T_inclusive() ? "<= " : "< ") << tmax;
    throw ParameterError(os.str());
  }
  // condition (C2): psi_t(L) misses L for t in (0, T], sampled
  const int time_samples = 64;
  const auto region = TetragonRegion(model, RegionKind::kHighWall, R0, R1, T);
  std::vector<std::vector<double>> leg_params;
  if (model.legendrian_param_dim() == 0) {
    leg_params.push_back({});
  } else {
    for (auto& s : region.seed_params(64)) leg_params.emplace_back(s.begin() + 1, s.end());
  }
  for (int i = 1; i <= time_samples; ++i) {
    const double t = T * i / time_samples;
    for (const auto& lp : leg_params) {
      const auto x = model.legendrian_point(lp);
      const double d = model.distance_to_legendrian(model.reeb_flow(x, t));
      if (d <= 1e-9) {
        std::ostringstream os;
        os << "psi_t(L) meets L at t=" << t << " for " << model.name();
        throw GeometryError(os.str());
      }
    }
  }
  return Tetragon(model, R0, R1, T);
}

double symplectic_form(std::span<const double> a, std::span<const double> b) {
  const auto n = a.size() / 2;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[n + i] - a[n + i] * b[i];
  return acc;
}

SmoothedTetragon smooth_tetragon(const Tetragon& tet, double eps) {
  const double limit = std::min(tet.R1() - tet.R0(), tet.T()) / 2.0;
  if (!(eps > 0.0) || !(eps < limit)) {
    std::ostringstream os;
    os << "smoothing radius eps=" << eps << " must satisfy 0 < eps < min(R1-R0, T)/2 = "
       << limit;
    throw ParameterError(os.str());
  }
  return SmoothedTetragon(tet, eps);
}

double SmoothedTetragon::area() const {
  return tet_.rectangle_area() - (4.0 - std::numbers::pi) * eps_ * eps_;
}

double SmoothedTetragon::perimeter() const {
  const double ls = tet_.R1() - tet_.R0();
  return 2.0 * (ls + tet_.T()) - 8.0 * eps_ + 2.0 * std::numbers::pi * eps_;
}

namespace {

struct LoopSample {
  std::array<double, 2> point;
  std::array<double, 2> tangent;
};

LoopSample rounded_rectangle(double r0, double r1, double t_len, double eps, double theta,
                             double perimeter) {
  double ell = wrap_unit(theta) * perimeter;
  const double ls = r1 - r0 - 2.0 * eps;
  const double lt = t_len - 2.0 * eps;
  const double arc = 0.5 * std::numbers::pi * eps;
  struct Edge {
    double x0, y0, dx, dy, len;
  };
  struct Arc {
    double cx, cy, phi0;
  };
  const Edge edges[4] = {{r0 + eps, 0.0, 1.0, 0.0, ls},
                         {r1, eps, 0.0, 1.0, lt},
                         {r1 - eps, t_len, -1.0, 0.0, ls},
                         {r0, t_len - eps, 0.0, -1.0, lt}};
  const double half_pi = 0.5 * std::numbers::pi;
  const Arc arcs[4] = {{r1 - eps, eps, -half_pi},
                       {r1 - eps, t_len - eps, 0.0},
                       {r0 + eps, t_len - eps, half_pi},
                       {r0 + eps, eps, std::numbers::pi}};
  for (int i = 0; i < 4; ++i) {
    const auto& e = edges[i];
    if (ell <= e.len) {
      return {{e.x0 + e.dx * ell, e.y0 + e.dy * ell}, {e.dx, e.dy}};
    }
    ell -= e.len;
    if (ell <= arc || i == 3) {
      const auto& a = arcs[i];
      const double phi = a.phi0 + std::min(ell, arc) / eps;
      return {{a.cx + eps * std::cos(phi), a.cy + eps * std::sin(phi)},
              {-std::sin(phi), std::cos(phi)}};
    }
    ell -= arc;
  }
  return {};
}

}  // namespace

std::array<double, 2> SmoothedTetragon::loop_point(double theta) const {
  return rounded_rectangle(tet_.R0(), tet_.R1(), tet_.T(), eps_, theta, perimeter()).point;
}

std::array<double, 2> SmoothedTetragon::loop_tangent(double theta) const {
  return rounded_rectangle(tet_.R0(), tet_.R1(), tet_.T(), eps_, theta, perimeter()).tangent;
}

std::vector<double> SmoothedTetragon::surface_point(std::span<const double> legendrian_params,
                                                    double theta) const {
  const auto st = loop_point(theta);
  const auto& model = tet_.model();
  return model.embed(model.reeb_flow(model.legendrian_point(legendrian_params), st[1]), st[0]);
}

std::vector<std::vector<double>> SmoothedTetragon::surface_tangents(
    std::span<const double> legendrian_params, double theta) const {
  const auto sample =
      rounded_rectangle(tet_.R0(), tet_.R1(), tet_.T(), eps_, theta, perimeter());
  const double s = sample.point[0], t = sample.point[1];
  const auto& model = tet_.model();
  const auto sigma = model.reeb_flow(model.legendrian_point(legendrian_params), t);
  std::vector<std::vector<double>> out;
  for (const auto& v : model.legendrian_tangents(legendrian_params, t))
    out.push_back(model.embed_differential(sigma, s, v, 0.0));
  auto reeb = model.reeb_vector(sigma);
  for (auto& r : reeb) r *= sample.tangent[1];
  out.push_back(model.embed_differential(sigma, s, reeb, sample.tangent[0]));
  return out;
}

LagrangianResidual SmoothedTetragon::residual(int samples) const {
  LagrangianResidual report;
  const int dim = tet_.model().legendrian_param_dim();
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < samples; ++i) {
    const double theta = (i + 0.5) / samples;
    std::vector<double> lp(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j)
      lp[static_cast<std::size_t>(j)] = wrap_unit((i + 1) * golden * (j + 1) + 0.1 * j);
    const auto vecs = surface_tangents(lp, theta);
    for (std::size_t a = 0; a < vecs.size(); ++a)
      for (std::size_t b = a + 1; b < vecs.size(); ++b) {
        report.max_abs = std::max(report.max_abs, std::abs(symplectic_form(vecs[a], vecs[b])));
        ++report.pairs;
      }
    ++report.samples;
  }
  return report;
}

RegionPtr stabilize(RegionPtr base, int extra_pairs, Stabilization mode) {
  if (extra_pairs < 1) throw ParameterError("stabilize needs at least one extra pair");
  return std::make_shared<StabilizedRegion>(std::move(base), extra_pairs, mode);
}

}  // namespace tetra
