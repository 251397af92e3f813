#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace tde {

// Invalid argument or violated precondition.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Scene rejection sampling exceeded its retry budget.
struct InfeasibleSceneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degenerate polar-arc geometry (adjacent atoms parallel or antipodal).
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No admissible dictionary index left outside the exclusion band.
struct SelectionExhaustedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The greedy basis became rank deficient and dropping the new atom did not fix it.
struct RankDeficiencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// First-order solver ran out of iterations; carries the best iterate found.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, Eigen::VectorXcd iterate, int iterations,
                   double final_change)
      : std::runtime_error(what),
        best(std::move(iterate)),
        iterations(iterations),
        final_change(final_change) {}

  Eigen::VectorXcd best;
  int iterations;
  double final_change;
};

// Filesystem failure, message carries the path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tde
