#pragma once

#include <string>
#include <vector>

namespace cns {

/// Errors on a sequence of grids refined by 2 and the observed orders
/// log2(e_k / e_{k+1}).
struct ConvergenceStudy {
  std::string name;
  std::vector<int> resolutions;
  std::vector<double> errors;
  std::vector<double> orders;

  double final_order() const { return orders.empty() ? 0.0 : orders.back(); }
};

void fill_orders(ConvergenceStudy& study);

/// Face gradient of sin(πx)cos(πy) on the unit square; max error over interior faces.
ConvergenceStudy gradient_study(const std::vector<int>& resolutions);
/// Robin Laplacian: solves (I − L)c = s + (c_ex − Δc_ex) for a smooth c_ex
/// whose Robin data are sampled at face midpoints; max error at centres.
ConvergenceStudy robin_laplacian_study(const std::vector<int>& resolutions);
/// hessian_log of exp(sin 2x cos y); max Frobenius error over all cells.
ConvergenceStudy hessian_log_study(const std::vector<int>& resolutions);
/// Neumann pressure Poisson for p = cos(πx)cos(πy); max error after gauge fixing.
ConvergenceStudy pressure_study(const std::vector<int>& resolutions);
/// Entropy identity residual for n under a frozen smooth c, refined jointly
/// in space and time (dt = h/4).
ConvergenceStudy entropy_identity_study(const std::vector<int>& resolutions, double epsilon = 0.1);

std::vector<ConvergenceStudy> verify_identities();

}  // namespace cns
