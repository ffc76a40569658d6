#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tetra {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// non-finite value or gradient; carries the point where it happened
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::vector<double> point, double time)
      : Error(what), point_(std::move(point)), time_(time) {}
  const std::vector<double>& point() const { return point_; }
  double time() const { return time_; }

 private:
  std::vector<double> point_;
  double time_;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

// point off the contact hypersurface
class ConstraintError : public Error {
 public:
  using Error::Error;
};

class EscapeError : public Error {
 public:
  EscapeError(const std::string& what, std::vector<double> last_state, double last_time)
      : Error(what), last_state_(std::move(last_state)), last_time_(last_time) {}
  const std::vector<double>& last_state() const { return last_state_; }
  double last_time() const { return last_time_; }

 private:
  std::vector<double> last_state_;
  double last_time_;
};

class StiffnessError : public Error {
 public:
  StiffnessError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::string mask)
      : Error(what), mask_(std::move(mask)) {}
  const std::string& mask() const { return mask_; }

 private:
  std::string mask_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tetra
