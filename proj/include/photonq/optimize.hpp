#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace photonq {

struct SimplexOptions {
  int max_iters = 200;
  double ftol = 1e-8;  // spread of objective values across the simplex
  double xtol = 1e-8;  // largest vertex distance from the best vertex
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead with the usual coefficients (1, 2, 0.5, 0.5). Non-finite
// objective values are treated as +inf, which keeps the simplex out of
// forbidden regions.
inline SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                                 const SimplexOptions& opt = {}) {
  const int n = static_cast<int>(x0.size());
  auto eval = [&](const Eigen::VectorXd& x) {
    double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (int i = 0; i < n; ++i) pts[i + 1](i) += step(i);
  for (int i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<int> idx(n + 1);
  SimplexResult res;
  int it = 0;
  for (; it < opt.max_iters; ++it) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = idx[0], worst = idx[n], second = idx[n - 1];

    double size = 0;
    for (int i = 1; i <= n; ++i) size = std::max(size, (pts[idx[i]] - pts[best]).cwiseAbs().maxCoeff());
    if (std::isfinite(vals[worst]) && vals[worst] - vals[best] <= opt.ftol && size <= opt.xtol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[idx[i]];
    centroid /= n;

    Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    double fr = eval(xr);
    if (fr < vals[best]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                 : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (int i = 1; i <= n; ++i) {
      pts[idx[i]] = pts[best] + 0.5 * (pts[idx[i]] - pts[best]);
      vals[idx[i]] = eval(pts[idx[i]]);
    }
  }

  int best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  res.x = pts[best];
  res.value = vals[best];
  res.iterations = it;
  return res;
}

}  // namespace photonq
