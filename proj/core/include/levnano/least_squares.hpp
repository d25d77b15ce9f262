#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace levnano {

struct LmOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-10;
  double initial_lambda = 1e-3;
  // false: return the last iterate with converged = false instead of throwing
  bool throw_on_cap = true;
  // Optional box; parameters are projected back after every step.
  Eigen::VectorXd lower, upper;
};

struct LmResult {
  Eigen::VectorXd params;
  Eigen::VectorXd residuals;  // weighted
  Eigen::MatrixXd covariance; // (J^T J)^-1 of the weighted problem
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<bool> at_bound;
};

// Fills the weighted residual vector (model - data) / sigma.
using ResidualFn = std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r)>;

/// Levenberg-Marquardt with Marquardt diagonal scaling and a central-difference
/// Jacobian. Throws NumericalFailure when the iteration cap is reached, unless
/// throw_on_cap is cleared.
LmResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd p0, Eigen::Index m,
                             const LmOptions& opt = {});

}  // namespace levnano
