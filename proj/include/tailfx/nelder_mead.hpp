#pragma once

#include "tailfx/common.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace tailfx {

struct SimplexOptions {
  double f_tolerance = 1e-12;
  double x_tolerance = 1e-10;
  int max_evaluations_per_dim = 4000;
  double initial_step = 0.1;
  int restarts = 2;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline SimplexResult nelder_mead_once(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& start, const SimplexOptions& opt, int* eval_budget) {
  const int dim = static_cast<int>(start.size());
  const double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

  std::vector<Eigen::VectorXd> pts(dim + 1, start);
  std::vector<double> vals(dim + 1);
  for (int j = 0; j < dim; ++j) {
    double step = opt.initial_step * std::max(1.0, std::abs(start[j]));
    pts[j + 1][j] += step;
  }
  SimplexResult res;
  for (int j = 0; j <= dim; ++j) {
    vals[j] = f(pts[j]);
    ++res.evaluations;
  }

  std::vector<int> order(dim + 1);
  while (*eval_budget - res.evaluations > 0) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order[0], worst = order[dim], second = order[dim - 1];

    const double f_spread = std::abs(vals[worst] - vals[best]);
    double x_spread = 0.0;
    for (int j = 1; j <= dim; ++j)
      x_spread = std::max(
          x_spread, (pts[order[j]] - pts[best]).cwiseAbs().maxCoeff());
    if (f_spread <= opt.f_tolerance * (1.0 + std::abs(vals[best])) &&
        x_spread <= opt.x_tolerance * (1.0 + pts[best].cwiseAbs().maxCoeff())) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (int j = 0; j <= dim; ++j)
      if (j != worst) centroid += pts[j];
    centroid /= static_cast<double>(dim);

    Eigen::VectorXd xr = centroid + kReflect * (centroid - pts[worst]);
    double fr = f(xr);
    ++res.evaluations;

    if (fr < vals[best]) {
      Eigen::VectorXd xe = centroid + kExpand * (xr - centroid);
      double fe = f(xe);
      ++res.evaluations;
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      Eigen::VectorXd xc =
          outside ? Eigen::VectorXd(centroid + kContract * (xr - centroid))
                  : Eigen::VectorXd(centroid + kContract * (pts[worst] - centroid));
      double fc = f(xc);
      ++res.evaluations;
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (int j = 0; j <= dim; ++j) {
          if (j == best) continue;
          pts[j] = pts[best] + kShrink * (pts[j] - pts[best]);
          vals[j] = f(pts[j]);
          ++res.evaluations;
        }
      }
    }
  }

  int best = 0;
  for (int j = 1; j <= dim; ++j)
    if (vals[j] < vals[best]) best = j;
  res.x = pts[best];
  res.value = vals[best];
  *eval_budget -= res.evaluations;
  return res;
}

}  // namespace detail

// Derivative-free Nelder-Mead minimization. After a run converges (or the
// budget slice ends) the simplex is rebuilt around the best point with a
// smaller step, which polishes the optimum and guards against premature
// collapse. `converged` is false only if no run met the tolerances.
inline SimplexResult minimize_simplex(
    const std::function<double(const Eigen::VectorXd&)>& f,
    Eigen::VectorXd start, const SimplexOptions& opt = {}) {
  const int dim = static_cast<int>(start.size());
  const int total_budget = opt.max_evaluations_per_dim * std::max(1, dim);
  int budget = total_budget;

  SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  bool converged_any = false;
  for (int r = 0; r <= opt.restarts && budget > 0; ++r) {
    SimplexOptions o = opt;
    for (int k = 0; k < r; ++k) o.initial_step *= 0.1;
    SimplexResult res = detail::nelder_mead_once(f, start, o, &budget);
    if (best.x.size() == 0 || res.value < best.value) {
      best.x = res.x;
      best.value = res.value;
    }
    converged_any = converged_any || res.converged;
    if (res.converged && r >= 1) break;
    start = best.x;
  }
  best.converged = converged_any;
  best.evaluations = total_budget - budget;
  return best;
}

}  // namespace tailfx
