#pragma once

#include <stdexcept>

namespace unlearn {

/// The leave-k-out system is ill-posed for the requested points, e.g. a hat
/// diagonal entry equals one or the k-by-k system is singular.
struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A normal matrix (or its downdate after deletion) is not positive definite.
struct RankDeficiencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An iterative solver exhausted its iteration budget.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace unlearn
