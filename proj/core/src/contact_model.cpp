#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sphere_search.hpp"
#include "tetra/errors.hpp"
#include "tetra/tetragon.hpp"

namespace tetra {

namespace {

constexpr double kSigmaTol = 1e-10;

double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// orthonormal basis of the complement of the unit vector x in R^k
std::vector<std::vector<double>> complement_basis(std::span<const double> x) {
  const auto k = x.size();
  std::vector<std::vector<double>> basis;
  std::size_t skip = 0;
  for (std::size_t i = 1; i < k; ++i)
    if (std::abs(x[i]) > std::abs(x[skip])) skip = i;
  for (std::size_t i = 0; i < k && basis.size() + 1 < k; ++i) {
    if (i == skip) continue;
    std::vector<double> v(k, 0.0);
    v[i] = 1.0;
    const double c = dot(v, x);
    for (std::size_t j = 0; j < k; ++j) v[j] -= c * x[j];
    for (const auto& b : basis) {
      const double cb = dot(v, b);
      for (std::size_t j = 0; j < k; ++j) v[j] -= cb * b[j];
    }
    const double nv = norm(v);
    for (auto& vj : v) vj /= nv;
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

ContactModel ContactModel::circle() { return ContactModel(ModelKind::kCircle, 1); }

ContactModel ContactModel::unit_cotangent_torus(int k) {
  if (k < 1) throw ParameterError("UnitCotangentTorus needs k >= 1");
  return ContactModel(ModelKind::kUnitCotangentTorus, k);
}

ContactModel ContactModel::contact_sphere(int k) {
  if (k < 1) throw ParameterError("ContactSphere needs k >= 1");
  return ContactModel(ModelKind::kContactSphere, k);
}

std::string ContactModel::name() const {
  std::ostringstream os;
  switch (kind_) {
    case ModelKind::kCircle:
      return "circle";
    case ModelKind::kUnitCotangentTorus:
      os << "unit_cotangent_torus(" << k_ << ")";
      break;
    case ModelKind::kContactSphere:
      os << "contact_sphere(" << k_ << ")";
      break;
  }
  return os.str();
}

PhaseChart ContactModel::ambient_chart() const {
  switch (kind_) {
    case ModelKind::kCircle:
      return PhaseChart(1, {true});
    case ModelKind::kUnitCotangentTorus:
      return PhaseChart(k_, std::vector<bool>(static_cast<std::size_t>(k_), true));
    case ModelKind::kContactSphere:
      return PhaseChart(k_);
  }
  return PhaseChart(1);
}

int ContactModel::sigma_dim() const { return kind_ == ModelKind::kCircle ? 1 : 2 * k_; }

double ContactModel::constraint_residual(std::span<const double> sigma) const {
  if (static_cast<int>(sigma.size()) != sigma_dim())
    throw ConstraintError("point has wrong dimension for " + name());
  switch (kind_) {
    case ModelKind::kCircle:
      return 0.0;
    case ModelKind::kUnitCotangentTorus:
      return std::abs(dot(sigma.first(static_cast<std::size_t>(k_)),
                          sigma.first(static_cast<std::size_t>(k_))) -
                      1.0);
    case ModelKind::kContactSphere:
      return std::abs(dot(sigma, sigma) - 1.0);
  }
  return 0.0;
}

void ContactModel::require_on_sigma(std::span<const double> sigma) const {
  const double r = constraint_residual(sigma);
  if (!(r <= kSigmaTol)) {
    std::ostringstream os;
    os << "point is off the contact hypersurface of " << name() << " (residual " << r << ")";
    throw ConstraintError(os.str());
  }
}

std::vector<double> ContactModel::reeb_flow(std::span<const double> sigma, double t) const {
  require_on_sigma(sigma);
  std::vector<double> out(sigma.begin(), sigma.end());
  const auto k = static_cast<std::size_t>(k_);
  switch (kind_) {
    case ModelKind::kCircle:
      out[0] = sigma[0] + t;
      break;
    case ModelKind::kUnitCotangentTorus:
      for (std::size_t i = 0; i < k; ++i) out[k + i] = sigma[k + i] + t * sigma[i];
      break;
    case ModelKind::kContactSphere: {
      const double c = std::cos(2.0 * t), s = std::sin(2.0 * t);
      for (std::size_t i = 0; i < k; ++i) {
        out[i] = c * sigma[i] - s * sigma[k + i];
        out[k + i] = s * sigma[i] + c * sigma[k + i];
      }
      break;
    }
  }
  return out;
}

std::vector<double> ContactModel::reeb_vector(std::span<const double> sigma) const {
  const auto k = static_cast<std::size_t>(k_);
  std::vector<double> v(sigma.size(), 0.0);
  switch (kind_) {
    case ModelKind::kCircle:
      v[0] = 1.0;
      break;
    case ModelKind::kUnitCotangentTorus:
      for (std::size_t i = 0; i < k; ++i) v[k + i] = sigma[i];
      break;
    case ModelKind::kContactSphere:
      for (std::size_t i = 0; i < k; ++i) {
        v[i] = -2.0 * sigma[k + i];
        v[k + i] = 2.0 * sigma[i];
      }
      break;
  }
  return v;
}

double ContactModel::contact_form(std::span<const double> sigma,
                                  std::span<const double> v) const {
  const auto k = static_cast<std::size_t>(k_);
  switch (kind_) {
    case ModelKind::kCircle:
      return v[0];
    case ModelKind::kUnitCotangentTorus:
      return dot(sigma.first(k), v.subspan(k, k));
    case ModelKind::kContactSphere:
      return 0.5 * (dot(sigma.first(k), v.subspan(k, k)) - dot(sigma.subspan(k, k), v.first(k)));
  }
  return 0.0;
}

double ContactModel::ambient_primitive(std::span<const double> x,
                                       std::span<const double> v) const {
  const auto n = x.size() / 2;
  if (kind_ == ModelKind::kContactSphere)
    return 0.5 * (dot(x.first(n), v.subspan(n, n)) - dot(x.subspan(n, n), v.first(n)));
  return dot(x.first(n), v.subspan(n, n));
}

std::vector<double> ContactModel::embed(std::span<const double> sigma, double s) const {
  const auto k = static_cast<std::size_t>(k_);
  std::vector<double> x;
  switch (kind_) {
    case ModelKind::kCircle:
      x = {s, wrap_unit(sigma[0])};
      break;
    case ModelKind::kUnitCotangentTorus:
      x.resize(2 * k);
      for (std::size_t i = 0; i < k; ++i) {
        x[i] = s * sigma[i];
        x[k + i] = wrap_unit(sigma[k + i]);
      }
      break;
    case ModelKind::kContactSphere: {
      const double r = std::sqrt(s);
      x.assign(sigma.begin(), sigma.end());
      for (auto& xi : x) xi *= r;
      break;
    }
  }
  return x;
}

std::vector<double> ContactModel::embed_differential(std::span<const double> sigma, double s,
                                                     std::span<const double> dsigma,
                                                     double ds) const {
  const auto k = static_cast<std::size_t>(k_);
  std::vector<double> v;
  switch (kind_) {
    case ModelKind::kCircle:
      v = {ds, dsigma[0]};
      break;
    case ModelKind::kUnitCotangentTorus:
      v.resize(2 * k);
      for (std::size_t i = 0; i < k; ++i) {
        v[i] = s * dsigma[i] + ds * sigma[i];
        v[k + i] = dsigma[k + i];
      }
      break;
    case ModelKind::kContactSphere: {
      const double r = std::sqrt(s);
      v.resize(2 * k);
      for (std::size_t i = 0; i < 2 * k; ++i) v[i] = r * dsigma[i] + ds / (2.0 * r) * sigma[i];
      break;
    }
  }
  return v;
}

std::vector<double> ContactModel::project(std::span<const double> x, double& s) const {
  const auto k = static_cast<std::size_t>(k_);
  switch (kind_) {
    case ModelKind::kCircle:
      s = x[0];
      return {wrap_unit(x[1])};
    case ModelKind::kUnitCotangentTorus: {
      s = norm(x.first(k));
      std::vector<double> sigma(2 * k);
      for (std::size_t i = 0; i < k; ++i) {
        sigma[i] = s > 0.0 ? x[i] / s : (i == 0 ? 1.0 : 0.0);
        sigma[k + i] = wrap_centered(x[k + i]);
      }
      return sigma;
    }
    case ModelKind::kContactSphere: {
      const double r = norm(x);
      s = r * r;
      std::vector<double> sigma(x.begin(), x.end());
      if (r > 0.0)
        for (auto& v : sigma) v /= r;
      else
        sigma[0] = 1.0;
      return sigma;
    }
  }
  return {};
}

double ContactModel::s_of(std::span<const double> x) const {
  double s = 0.0;
  (void)project(x, s);
  return s;
}

void ContactModel::s_gradient(std::span<const double> x, std::span<double> grad) const {
  const auto k = static_cast<std::size_t>(k_);
  std::fill(grad.begin(), grad.end(), 0.0);
  switch (kind_) {
    case ModelKind::kCircle:
      grad[0] = 1.0;
      break;
    case ModelKind::kUnitCotangentTorus: {
      const double r = norm(x.first(k));
      for (std::size_t i = 0; i < k; ++i) grad[i] = r > 0.0 ? x[i] / r : 0.0;
      break;
    }
    case ModelKind::kContactSphere:
      for (std::size_t i = 0; i < 2 * k; ++i) grad[i] = 2.0 * x[i];
      break;
  }
}

int ContactModel::legendrian_param_dim() const {
  if (kind_ == ModelKind::kCircle) return 0;
  return k_ == 1 ? 1 : k_ - 1;
}

std::vector<double> ContactModel::legendrian_point(std::span<const double> params) const {
  const auto k = static_cast<std::size_t>(k_);
  if (kind_ == ModelKind::kCircle) return {0.0};
  std::vector<double> dir;
  if (k_ == 1) {
    dir = {wrap_unit(params[0]) < 0.5 ? 1.0 : -1.0};
  } else {
    std::vector<double> angles(k - 1);
    for (std::size_t i = 0; i + 1 < k - 1; ++i) angles[i] = std::numbers::pi * params[i];
    angles[k - 2] = 2.0 * std::numbers::pi * params[k - 2];
    dir = detail::unit_from_angles(angles, k_);
  }
  std::vector<double> sigma(2 * k, 0.0);
  std::copy(dir.begin(), dir.end(), sigma.begin());
  return sigma;
}

std::vector<std::vector<double>> ContactModel::legendrian_tangents(
    std::span<const double> params, double t) const {
  if (kind_ == ModelKind::kCircle) return {};
  const auto k = static_cast<std::size_t>(k_);
  const auto x = legendrian_point(params);
  const auto basis = complement_basis(std::span<const double>(x).first(k));
  std::vector<std::vector<double>> out;
  for (const auto& v : basis) {
    std::vector<double> w(2 * k);
    if (kind_ == ModelKind::kUnitCotangentTorus) {
      for (std::size_t i = 0; i < k; ++i) {
        w[i] = v[i];
        w[k + i] = t * v[i];
      }
    } else {
      const double c = std::cos(2.0 * t), s = std::sin(2.0 * t);
      for (std::size_t i = 0; i < k; ++i) {
        w[i] = c * v[i];
        w[k + i] = s * v[i];
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

double ContactModel::distance_to_legendrian(std::span<const double> sigma) const {
  const auto k = static_cast<std::size_t>(k_);
  switch (kind_) {
    case ModelKind::kCircle:
      return std::abs(wrap_centered(sigma[0]));
    case ModelKind::kUnitCotangentTorus: {
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double q = wrap_centered(sigma[k + i]);
        acc += q * q;
      }
      return std::sqrt(acc);
    }
    case ModelKind::kContactSphere: {
      const double np = norm(sigma.first(k));
      const double nq = norm(sigma.subspan(k, k));
      return std::hypot(nq, np - 1.0);
    }
  }
  return 0.0;
}

double ContactModel::reeb_time(std::span<const double> sigma) const {
  const auto k = static_cast<std::size_t>(k_);
  switch (kind_) {
    case ModelKind::kCircle:
      return wrap_unit(sigma[0]);
    case ModelKind::kUnitCotangentTorus: {
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i) acc += wrap_centered(sigma[k + i]) * sigma[i];
      return acc;
    }
    case ModelKind::kContactSphere:
      return 0.5 * std::atan2(norm(sigma.subspan(k, k)), norm(sigma.first(k)));
  }
  return 0.0;
}

double ContactModel::max_T() const {
  switch (kind_) {
    case ModelKind::kCircle:
      return 1.0;
    case ModelKind::kUnitCotangentTorus:
      return 0.5;
    case ModelKind::kContactSphere:
      return std::numbers::pi / 4.0;
  }
  return 0.0;
}

bool ContactModel::max_T_inclusive() const { return kind_ == ModelKind::kContactSphere; }

}  // namespace tetra
