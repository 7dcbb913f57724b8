#pragma once

#include <stdexcept>
#include <string>

namespace warpreg {

// Fit design matrix is rank deficient (e.g. more basis functions than samples).
struct IllPosedFit : std::runtime_error {
  explicit IllPosedFit(const std::string& what) : std::runtime_error(what) {}
};

// Amplitude denominator vanished: the warped reference is identically zero.
struct DegenerateReference : std::runtime_error {
  explicit DegenerateReference(const std::string& what) : std::runtime_error(what) {}
};

// Closed-form warp parameter outside its monotone range.
struct NonmonotoneParameter : std::invalid_argument {
  explicit NonmonotoneParameter(const std::string& what) : std::invalid_argument(what) {}
};

// PRD of a zero-energy curve.
struct UndefinedPrd : std::runtime_error {
  explicit UndefinedPrd(const std::string& what) : std::runtime_error(what) {}
};

// Nonlinear solver could not evaluate the residual.
struct SolverFailure : std::runtime_error {
  explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace warpreg
