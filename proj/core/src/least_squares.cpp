#include "levnano/least_squares.hpp"

#include <cmath>
#include <limits>

#include "levnano/errors.hpp"

namespace levnano {

namespace {

void project(Eigen::VectorXd& p, const LmOptions& opt) {
  if (opt.lower.size() == p.size()) p = p.cwiseMax(opt.lower);
  if (opt.upper.size() == p.size()) p = p.cwiseMin(opt.upper);
}

Eigen::MatrixXd jacobian(const ResidualFn& f, const Eigen::VectorXd& p, Eigen::Index m) {
  Eigen::MatrixXd J(m, p.size());
  Eigen::VectorXd rp(m), rm(m);
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    double h = 1e-6 * std::max(std::abs(p[j]), 1.0);
    Eigen::VectorXd q = p;
    q[j] = p[j] + h;
    f(q, rp);
    q[j] = p[j] - h;
    f(q, rm);
    J.col(j) = (rp - rm) / (2.0 * h);
  }
  return J;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const auto& ev = es.eigenvalues();
  double tol = ev.cwiseAbs().maxCoeff() * 1e-14 * static_cast<double>(A.rows());
  Eigen::VectorXd inv = ev.unaryExpr([tol](double v) { return v > tol ? 1.0 / v : 0.0; });
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd p, Eigen::Index m,
                             const LmOptions& opt) {
  if (m < p.size()) throw InvalidParameter("fewer residuals than parameters");
  project(p, opt);
  Eigen::VectorXd r(m);
  f(p, r);
  if (!finite(r)) throw NumericalFailure("non-finite residuals at the initial guess");
  double chi2 = r.squaredNorm();
  double lambda = opt.initial_lambda;

  LmResult res;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    Eigen::MatrixXd J = jacobian(f, p, m);
    Eigen::MatrixXd JtJ = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * r;
    Eigen::VectorXd diag = JtJ.diagonal().cwiseMax(1e-300);

    bool accepted = false;
    Eigen::VectorXd step;
    while (lambda < 1e20) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal() += lambda * diag;
      step = A.ldlt().solve(-g);
      Eigen::VectorXd pn = p + step;
      project(pn, opt);
      step = pn - p;
      Eigen::VectorXd rn(m);
      f(pn, rn);
      double chi2n = finite(rn) ? rn.squaredNorm() : std::numeric_limits<double>::infinity();
      if (chi2n <= chi2) {
        p = pn;
        r = rn;
        chi2 = chi2n;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    double rel = accepted ? step.norm() / (p.norm() + opt.relative_tolerance) : 0.0;
    // No downhill step at any damping: already at the minimum to working precision.
    if (!accepted || rel < opt.relative_tolerance) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged && opt.throw_on_cap) {
    throw NumericalFailure("fit did not converge after " + std::to_string(opt.max_iterations) +
                           " iterations; last residual norm " + std::to_string(std::sqrt(chi2)));
  }
  Eigen::MatrixXd J = jacobian(f, p, m);
  res.params = p;
  res.residuals = r;
  res.chi2 = chi2;
  res.covariance = pseudo_inverse(J.transpose() * J);
  res.at_bound.assign(static_cast<std::size_t>(p.size()), false);
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    bool lo = opt.lower.size() == p.size() && p[j] <= opt.lower[j];
    bool hi = opt.upper.size() == p.size() && p[j] >= opt.upper[j];
    res.at_bound[static_cast<std::size_t>(j)] = lo || hi;
  }
  return res;
}

}  // namespace levnano
