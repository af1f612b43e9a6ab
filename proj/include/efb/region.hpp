#pragma once
#include "efb/family.hpp"

namespace efb {

// Base region descriptor in interpretable coordinates, one box per kind:
//   Bernoulli      : mean range [mean_lo, mean_hi]
//   GaussianMeanVar: mean box [mean_lo, mean_hi] x variance box [var_lo, var_hi]
//   DiscreteAtoms  : per-cell probability box [prob_lo[k], prob_hi[k]] for the
//                    K non-top atoms (top-atom mass must stay positive)
struct RegionBox {
  double mean_lo = 0.0, mean_hi = 0.0;
  double var_lo = 0.0, var_hi = 0.0;
  std::vector<double> prob_lo, prob_hi;
};

// Enlarged parameter set Theta_rho with its curvature bounds. The enlargement
// is the per-axis rho-enlargement of the natural-parameter box spanned by the
// base region (contains every Euclidean rho-ball around the base set, so the
// theorem's requirements hold). Membership and the extremized v/V refer to
// the same theta-box.
struct ParamRegion {
  FamilyKind kind = FamilyKind::Bernoulli;
  RegionBox box;            // base region, interpretable coordinates
  double rho = 0.0;         // enlargement radius in natural-parameter space
  std::vector<double> theta_lo, theta_hi;  // the enlarged theta-box
  double v_rho = 0.0;       // inf over Theta_rho of lambda_min(hess psi)
  double V_rho = 0.0;       // sup over Theta_rho of lambda_max(hess psi)

  bool contains(const NaturalParam& th) const;
};

// Computes Theta_rho and (v_rho, V_rho). Bernoulli and Gaussian use closed
// forms / the eigenvalue envelopes extremized over the box; DiscreteAtoms
// uses a grid scan with Lipschitz slack (conservative in both directions).
// Throws RegionError if the region touches a degenerate boundary.
ParamRegion region_curvature(const FamilyModel& m, const RegionBox& box, double rho,
                             int grid_points_per_axis = 101);

}  // namespace efb
