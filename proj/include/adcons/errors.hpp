#pragma once

#include <stdexcept>
#include <string>

namespace adcons {

/// Malformed scenario or configuration input. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid topology construction (self-loop, duplicate edge, bad index).
class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Gain synthesis failed: unstabilizable pair or infeasible LMI. CLI exit code 2.
class SynthesisError : public std::runtime_error {
 public:
  explicit SynthesisError(const std::string& what, double best_margin = 0.0)
      : std::runtime_error(what), best_margin_(best_margin) {}

  /// Best max-eigenvalue achieved by the failing solve (0 when not applicable).
  double best_margin() const noexcept { return best_margin_; }

 private:
  double best_margin_;
};

/// An iterative numerical kernel did not converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-loop state became non-finite. CLI exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace adcons
