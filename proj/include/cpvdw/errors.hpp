#pragma once
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cpvdw {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (unknown labels, bad grids, ...).
class InputError : public Error {
public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Evaluation at a singular point (pole, omega = 0, R = 0).
class DomainError : public Error {
public:
  DomainError(const std::string &what, std::string label = {})
      : Error(what), m_label(std::move(label)) {}
  const std::string &label() const { return m_label; }

private:
  std::string m_label;
};

/// An energy denominator of the pair vanishes. Carries the colliding levels.
class ResonanceError : public Error {
public:
  ResonanceError(const std::string &what, std::vector<std::string> labels)
      : Error(what), m_labels(std::move(labels)) {}
  const std::vector<std::string> &labels() const { return m_labels; }

private:
  std::vector<std::string> m_labels;
};

/// Adaptive quadrature ran out of subdivisions.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string &what, double last_estimate,
                   double last_error)
      : Error(what), m_estimate(last_estimate), m_error(last_error) {}
  double last_estimate() const { return m_estimate; }
  double last_error() const { return m_error; }

private:
  double m_estimate;
  double m_error;
};

} // namespace cpvdw
