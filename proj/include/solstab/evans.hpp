#pragma once

#include <string>
#include <vector>

#include "solstab/models.hpp"
#include "solstab/odecore.hpp"

namespace solstab {

struct EvansOptions {
  double tol = 1e-4;    // requested wedge accuracy
  double x_inf = 0.0;   // 0: automatic max(20, 12/alpha)
  double tol_split = 1e-8;
  // "auto" picks: reduced at k = 0 for models with a reduced branch,
  // the slow-split continuation ("tilde") for |slow root| < 1e-6,
  // plain exterior-power integration ("standard") otherwise.
  std::string branch = "auto";
};

// Evans function value stored as mantissa * exp(log_scale) with
// |mantissa| in [1, e) (or mantissa = 0).
struct EvansValue {
  cplx mantissa{0.0, 0.0};
  double log_scale = 0.0;
  cplx sigma{0.0, 0.0};
  double k = 0.0;
  double x_inf = 0.0;
  double tol = 0.0;
  std::string branch;
  double err_estimate = 0.0;

  cplx value() const { return mantissa * std::exp(log_scale); }
  double log_abs() const {
    return std::log(std::abs(mantissa)) + log_scale;
  }
  double arg() const { return std::arg(mantissa); }
  // a / b as a plain complex number; only safe when the scales are close.
  static cplx ratio(const EvansValue& a, const EvansValue& b);
};

EvansValue evans_eval(const Model& model, cplx sigma, double k,
                      const EvansOptions& opt = {});

// Normalized contour residual |sum_j D_j e^{i theta_j}| / (n max_j |D_j|)
// on a circle around `center`; vanishes for analytic D.
double analyticity_check(const Model& model, cplx center, double radius,
                         double k, int n_nodes = 128,
                         const EvansOptions& opt = {});

struct ContinuationRatio {
  std::vector<cplx> sigmas;
  std::vector<double> ks;
  std::vector<std::vector<cplx>> r;  // [sigma][k]
  std::vector<cplx> r_extrapolated;  // Richardson in k^2 from the last two k
  double spread = 0.0;               // max relative deviation across sigma
};

// Ratio D(sigma, k) / (sigma D_reduced(sigma, 0)) along the slow-split
// branch; tends to a sigma-independent constant as k -> 0.
ContinuationRatio continuation_ratio(const Model& model,
                                     const std::vector<cplx>& sigmas,
                                     const std::vector<double>& ks,
                                     const EvansOptions& opt = {});

}  // namespace solstab
