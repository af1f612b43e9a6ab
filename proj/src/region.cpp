#include "efb/region.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace efb {

namespace {

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void eig_range(const Matrix& h, double& lmin, double& lmax) {
  const int n = static_cast<int>(h.size());
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = h[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  lmin = es.eigenvalues().minCoeff();
  lmax = es.eigenvalues().maxCoeff();
}

}  // namespace

bool ParamRegion::contains(const NaturalParam& th) const {
  if (th.dim() != theta_lo.size()) return false;
  for (std::size_t k = 0; k < theta_lo.size(); ++k)
    if (th[k] < theta_lo[k] || th[k] > theta_hi[k]) return false;
  return true;
}

ParamRegion region_curvature(const FamilyModel& m, const RegionBox& box, double rho,
                             int grid_points_per_axis) {
  if (rho < 0) throw RegionError("rho must be nonnegative");
  ParamRegion r;
  r.kind = m.kind;
  r.box = box;
  r.rho = rho;

  switch (m.kind) {
    case FamilyKind::Bernoulli: {
      if (!(box.mean_lo > 0 && box.mean_hi < 1 && box.mean_lo <= box.mean_hi))
        throw RegionError("Bernoulli mean range must sit inside (0,1)");
      const double tlo = bernoulli_theta(box.mean_lo) - rho;
      const double thi = bernoulli_theta(box.mean_hi) + rho;
      r.theta_lo = {tlo};
      r.theta_hi = {thi};
      const double mlo = sigmoid(tlo), mhi = sigmoid(thi);
      const auto g = [](double mu) { return mu * (1.0 - mu); };
      r.v_rho = std::min(g(mlo), g(mhi));  // mu(1-mu) dips at the range ends
      r.V_rho = (mlo <= 0.5 && 0.5 <= mhi) ? 0.25 : std::max(g(mlo), g(mhi));
      break;
    }
    case FamilyKind::GaussianMeanVar: {
      if (!(box.var_lo > 0 && box.var_lo <= box.var_hi))
        throw RegionError("Gaussian variance range must be positive");
      if (!(box.mean_lo <= box.mean_hi)) throw RegionError("Gaussian mean range empty");
      // theta-box from the (mean, variance) corners, then rho-enlarged
      double t1lo = 1e300, t1hi = -1e300;
      for (double mu : {box.mean_lo, box.mean_hi})
        for (double v : {box.var_lo, box.var_hi}) {
          t1lo = std::min(t1lo, mu / v);
          t1hi = std::max(t1hi, mu / v);
        }
      double t2lo = -0.5 / box.var_lo, t2hi = -0.5 / box.var_hi;
      t1lo -= rho;
      t1hi += rho;
      t2lo -= rho;
      t2hi += rho;
      if (!(t2hi < 0)) throw RegionError("rho-enlargement crosses the zero-variance boundary");
      r.theta_lo = {t1lo, t2lo};
      r.theta_hi = {t1hi, t2hi};
      const double var_lo = -0.5 / t2lo, var_hi = -0.5 / t2hi;
      const double t1max = std::max(std::fabs(t1lo), std::fabs(t1hi));
      const double mu2max = (t1max * var_hi) * (t1max * var_hi);
      // eigenvalue envelopes, extremized over the box
      r.v_rho = var_lo * var_lo / (0.5 + var_lo + 2.0 * mu2max);
      r.V_rho = var_hi * (1.0 + 2.0 * var_hi + 4.0 * mu2max);
      break;
    }
    case FamilyKind::DiscreteAtoms: {
      const int K = m.K;
      if (static_cast<int>(box.prob_lo.size()) != K || static_cast<int>(box.prob_hi.size()) != K)
        throw RegionError("discrete region needs K probability ranges");
      double slo = 0, shi = 0;
      for (int k = 0; k < K; ++k) {
        if (!(box.prob_lo[k] > 0 && box.prob_lo[k] <= box.prob_hi[k]))
          throw RegionError("discrete probability range invalid");
        slo += box.prob_lo[k];
        shi += box.prob_hi[k];
      }
      if (!(shi < 1)) throw RegionError("top-atom probability not positive over the box");
      r.theta_lo.resize(K);
      r.theta_hi.resize(K);
      for (int k = 0; k < K; ++k) {
        r.theta_lo[k] = std::log(box.prob_lo[k] / (1.0 - slo)) - rho;
        r.theta_hi[k] = std::log(box.prob_hi[k] / (1.0 - shi)) + rho;
      }
      // grid scan, axis count capped so the scan stays ~2e5 nodes
      int n = grid_points_per_axis;
      while (n > 3 && std::pow(static_cast<double>(n), K) > 2e5) --n;
      double hmax = 0.0;
      for (int k = 0; k < K; ++k)
        hmax = std::max(hmax, (r.theta_hi[k] - r.theta_lo[k]) / std::max(1, n - 1));
      // |dH_ij/d theta_l| <= 3/4 for the multinomial Hessian, so eigenvalues
      // move by at most (3/4) K sqrt(K) * (h/2) within a grid cell
      const double slack = 0.75 * K * std::sqrt(static_cast<double>(K)) * hmax / 2.0;
      double vmin = 1e300, vmax = -1e300;
      std::vector<int> idx(K, 0);
      NaturalParam th(std::vector<double>(K, 0.0));
      while (true) {
        for (int k = 0; k < K; ++k) {
          const double a = r.theta_lo[k], b = r.theta_hi[k];
          th.theta[k] = (n == 1) ? a : a + (b - a) * idx[k] / (n - 1);
        }
        double lmin, lmax;
        eig_range(hessian_log_partition(m, th), lmin, lmax);
        vmin = std::min(vmin, lmin);
        vmax = std::max(vmax, lmax);
        int k = 0;
        while (k < K && ++idx[k] == n) idx[k++] = 0;
        if (k == K) break;
      }
      r.v_rho = vmin - slack;
      r.V_rho = vmax + slack;
      break;
    }
  }
  if (!(r.v_rho > 0)) throw RegionError("region touches a degenerate boundary (v_rho <= 0)");
  if (!(r.V_rho >= r.v_rho)) throw RegionError("curvature bounds inconsistent");
  return r;
}

}  // namespace efb
