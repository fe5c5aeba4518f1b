#pragma once

#include <optional>
#include <string>
#include <vector>

#include "solstab/evans.hpp"
#include "solstab/models.hpp"

namespace solstab {

struct RectSigma {
  double re_lo = 0.02;
  double re_hi = 3.0;
  double im_lo = -6.0;
  double im_hi = 6.0;
};

// Winding number of the Evans function around the rectangle boundary,
// traversed counterclockwise with adaptive phase marching (each accepted
// segment turns the argument by less than pi/2).
int winding_number(const Model& model, double k, const RectSigma& rect,
                   const EvansOptions& opt = {});

struct UnstableRoot {
  cplx sigma;
  double residual;        // |D(sigma)| relative to the rectangle corner scale
  double verify_box = 0.0;  // half width of the winding-1 verification box
};

// Locates the unique unstable Evans root in the rectangle: winding count,
// rectangle subdivision, complex secant polish, and a winding-1
// verification on a shrunken box. Winding >= 2 raises an error.
std::optional<UnstableRoot> find_unstable_sigma(const Model& model, double k,
                                                const RectSigma& rect = {},
                                                const EvansOptions& opt = {});

struct DispersionSample {
  double k;
  cplx sigma;
  double residual;
};

struct DispersionCurve {
  std::vector<DispersionSample> samples;
  double band_lo = 0.0;
  double band_hi = 0.0;
  double k0 = 0.0;     // wavenumber of maximal growth
  double sigma0 = 0.0; // maximal growth rate
  int m = 0;           // order of the first nonvanishing even derivative at k0
  std::string note;
};

// Dispersion curve sigma(k) on [kmin, kmax] with band-edge bisection,
// maximizer refinement, and flatness order fit.
DispersionCurve trace_dispersion(const Model& model, double kmin, double kmax,
                                 int nk, const EvansOptions& opt = {});

struct ModeResult {
  RVec x;                 // uniform grid on [-X, X)
  std::vector<Vec> u;     // physical components on the grid, L2-normalized
  cplx sigma;
  double k = 0.0;
  double residual = 0.0;      // |J(L+S)U - sigma U| / |U| on the grid
  double conservation = 0.0;  // |(U, LU) + (U, SU)| / |U|_H1^2
  double glue_sv = 0.0;       // smallest singular value at the matching point
};

// Reconstructs the unstable eigenfunction by integrating the decaying
// bundles from both infinities with checkpointed QR and gluing at x = 0.
ModeResult mode_reconstruct(const Model& model, cplx sigma, double k,
                            int n_grid = 1024, const EvansOptions& opt = {});

}  // namespace solstab
