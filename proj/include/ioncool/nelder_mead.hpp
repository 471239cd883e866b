#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace ioncool {

struct SimplexOptions {
  double initial_step = 0.1;
  double f_tolerance = 1e-15;  // absolute spread of vertex values
  double x_tolerance = 1e-10;  // max vertex distance from the best vertex
  int max_iterations = 5000;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free Nelder-Mead minimizer with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
inline SimplexResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const SimplexOptions& opt = {}) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    xs[i + 1](i) += (x0(i) != 0.0 ? opt.initial_step * std::abs(x0(i))
                                   : opt.initial_step);
  }
  for (Eigen::Index i = 0; i <= n; ++i) fs[i] = f(xs[i]);

  std::vector<Eigen::Index> order(n + 1);
  SimplexResult res;
  for (res.iterations = 0; res.iterations < opt.max_iterations;
       ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return fs[a] < fs[b]; });
    const Eigen::Index best = order.front();
    const Eigen::Index worst = order.back();
    const Eigen::Index second = order[n - 1];

    double x_spread = 0.0;
    for (Eigen::Index i = 0; i <= n; ++i) {
      x_spread = std::max(x_spread, (xs[i] - xs[best]).cwiseAbs().maxCoeff());
    }
    if (fs[worst] - fs[best] <= opt.f_tolerance && x_spread <= opt.x_tolerance) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i != worst) centroid += xs[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + (centroid - xs[worst]);
    const double fr = f(xr);
    if (fr < fs[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
      continue;
    }
    const bool outside = fr < fs[worst];
    const Eigen::VectorXd xc = outside
                                   ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                   : Eigen::VectorXd(centroid + 0.5 * (xs[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : fs[worst])) {
      xs[worst] = xc;
      fs[worst] = fc;
      continue;
    }
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i == best) continue;
      xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
      fs[i] = f(xs[i]);
    }
  }
  const auto it = std::min_element(fs.begin(), fs.end());
  res.x = xs[static_cast<std::size_t>(it - fs.begin())];
  res.f = *it;
  return res;
}

}  // namespace ioncool
