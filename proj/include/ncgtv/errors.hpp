#pragma once

#include <stdexcept>
#include <string>

namespace ncgtv {

// Malformed or unreadable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver failed to reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double achieved_residual)
      : std::runtime_error(what), achieved_residual_(achieved_residual) {}

  double achieved_residual() const { return achieved_residual_; }

 private:
  double achieved_residual_;
};

}  // namespace ncgtv
