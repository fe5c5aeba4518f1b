#pragma once

#include <functional>
#include <vector>

#include "solstab/models.hpp"

namespace solstab {

// Roots of a polynomial given by coefficients, highest degree first.
// Companion-matrix eigenvalues polished by two Newton steps.
std::vector<cplx> poly_roots(const std::vector<cplx>& coeffs);

struct SplittingInfo {
  std::vector<cplx> roots;   // stable group first, then unstable
  int n_stable = 0;
  int n_unstable = 0;
  double spectral_gap = 0.0;  // min |Re root|
  bool degenerate = false;    // spectral_gap below tol_split
};

// Freestream spatial eigenvalues split by sign of the real part.
SplittingInfo spatial_eigenvalues(const Model& model, cplx sigma, double k,
                                  double tol_split = 1e-8);

// Spectral projector onto the invariant subspace of the roots in `group`,
// computed by trapezoid quadrature of the resolvent on a circle that
// separates `group` from `rest`.
Mat dunford_projector(const Mat& a, const std::vector<cplx>& group,
                      const std::vector<cplx>& rest, int n_nodes = 128);

struct Subspaces {
  Mat stable;    // dim x n_stable, orthonormal, deterministic phase
  Mat unstable;  // dim x n_unstable
  SplittingInfo split;
};

// Orthonormal bases of the stable and unstable freestream subspaces with a
// phase fixed so the basis varies continuously with (sigma, k).
Subspaces asymptotic_subspaces(const Model& model, cplx sigma, double k);

// Lexicographic m-element index sets over {0..n-1}.
std::vector<std::vector<int>> wedge_index_sets(int n, int m);

// Lift of a to the exterior power indexed by `sets` (m = 1 or 2).
void wedge_lift(const Mat& a, const std::vector<std::vector<int>>& sets,
                Mat& out);

// Sign of the permutation (set, complement of set) of {0..n-1}.
int pairing_sign(const std::vector<int>& set, int n);

// Wedge of companion-matrix eigenvectors v(r) = (1, r, r^2, ...) for the
// given root group, normalized by the in-group Vandermonde factor so the
// result is a symmetric polynomial of the group (analytic in parameters).
Vec companion_wedge(const std::vector<cplx>& group, int n);

// Unnormalized v(r1) ^ v(r2), used when one root of the pair is kept
// explicitly (gap-lemma continuation through k = 0).
Vec companion_wedge_raw(cplx r1, cplx r2, int n);

using RhsFn = std::function<void(double x, const Vec& y, Vec& dy)>;

struct OdeOptions {
  double tol = 1e-5;   // requested accuracy of the final direction
  double h_init = 0.02;
  double h_max = 0.5;
  bool renormalize = true;
  int max_steps = 2000000;
};

struct OdeState {
  Vec y;
  double log_scale = 0.0;
  double err_accum = 0.0;
  int steps = 0;
};

// Adaptive Dormand-Prince 5(4) for linear systems with magnitude tracking:
// the solution is rescaled to unit norm whenever |y| leaves [e^-12, e^12]
// and the log of the factor is accumulated in log_scale.
OdeState integrate_ode(const RhsFn& rhs, const Vec& y0, double x0, double x1,
                       const OdeOptions& opt);

}  // namespace solstab
