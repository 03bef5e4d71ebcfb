#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace optomech {

struct LmOptions {
  double step_tol = 1e-8;  // max_i |dp_i| / |p_i|
  int max_iter = 200;
  double lambda0 = 1e-3;
};

template <int N>
struct LmResult {
  Eigen::Matrix<double, N, 1> params;
  double cost;  // sum of squared residuals
  int iterations;
  bool converged;
};

/// Damped Gauss-Newton (Marquardt's diagonal scaling) for a small, fixed
/// number of parameters.
///
/// `eval(p, r, J)` fills the residual vector and its Jacobian at p.
/// `project(p)` maps a trial point back into the feasible set.
/// Converges when a proposed step is relatively smaller than step_tol;
/// otherwise gives up after max_iter iterations with converged = false.
template <int N, class Eval, class Project>
LmResult<N> levenberg_marquardt(Eval&& eval, Project&& project, Eigen::Matrix<double, N, 1> p,
                                Eigen::Index residuals, const LmOptions& opt = {}) {
  using Vec = Eigen::Matrix<double, N, 1>;
  using Mat = Eigen::Matrix<double, N, N>;
  Eigen::VectorXd r(residuals), r_trial(residuals);
  Eigen::Matrix<double, Eigen::Dynamic, N> J(residuals, N), J_trial(residuals, N);

  eval(p, r, J);
  double cost = r.squaredNorm();
  double lambda = opt.lambda0;

  auto relative_step = [](const Vec& step, const Vec& at) {
    double worst = 0.0;
    for (int i = 0; i < N; ++i) {
      const double scale = std::max(std::abs(at[i]), std::numeric_limits<double>::min());
      worst = std::max(worst, std::abs(step[i]) / scale);
    }
    return worst;
  };

  for (int it = 1; it <= opt.max_iter; ++it) {
    const Mat A = J.transpose() * J;
    const Vec g = J.transpose() * r;
    Mat damped = A;
    for (int i = 0; i < N; ++i) damped(i, i) += lambda * std::max(A(i, i), 1e-300);
    const Vec trial = project(Vec(p + damped.ldlt().solve(-g)));
    const Vec step = trial - p;

    eval(trial, r_trial, J_trial);
    const double trial_cost = r_trial.squaredNorm();
    const bool better = std::isfinite(trial_cost) && trial_cost <= cost;
    if (better) {
      p = trial;
      r.swap(r_trial);
      J.swap(J_trial);
      cost = trial_cost;
      lambda = std::max(lambda / 10.0, 1e-12);
    } else {
      lambda *= 10.0;
    }
    if (relative_step(step, p) < opt.step_tol) return {p, cost, it, true};
    if (lambda > 1e20) return {p, cost, it, true};  // no descent left at this point
  }
  return {p, cost, opt.max_iter, false};
}

}  // namespace optomech
