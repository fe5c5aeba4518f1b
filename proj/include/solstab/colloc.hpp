#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "solstab/models.hpp"

namespace solstab {

// Uniform periodic grid with N points on [-L, L).
struct CollocGrid {
  int n = 0;
  double half_length = 0.0;
  double h = 0.0;
  RVec x;
  std::vector<double> xi;
};

CollocGrid make_grid(int n, double half_length);

// Real matrix of the Fourier multiplier Re(F^{-1} diag(symbol) F).
RMat multiplier_matrix(const CollocGrid& grid,
                       const std::function<cplx(double)>& symbol);

// Orthonormal basis of the zero-mean subspace: QR of [1/sqrt(N) | e_2..e_N]
// with the first column dropped.
RMat zero_mean_basis(int n);

// Dense collocation operators. For models whose symplectic form contains
// d/dx the operators are restricted to the zero-mean subspace; nls is
// unrestricted (basis = identity).
struct CollocOps {
  Model model;
  CollocGrid grid;
  double k = 0.0;
  int d = 1;
  bool mean_excluded = true;
  RMat basis;  // n x nb, per component
  RMat jls;    // (d*nb) x (d*nb)
  RMat mk;     // (d*nb) x (d*nb), symmetric up to roundoff
  // nls only: the blocks L1(k), L2(k) used for the quadratic eigenvalue
  // shortcut sigma^2 = eig(-L2 L1).
  RMat l1k, l2k;
};

CollocOps build_operators(const Model& model, double k, int n = 512,
                          double half_length = 40.0);

struct CollocEig {
  cplx sigma;
  double residual;      // |JLS w - sigma w| / |w|
  double localization;  // mass fraction of the lifted mode in |x| <= L/2
  std::vector<Vec> u;   // lifted components on the grid
};

// The transversely unstable eigenvalue: Re sigma > 0.02 and eigenvector
// localized in |x| <= L/2 (99 percent of the mass).
std::optional<CollocEig> unstable_eigenvalue(const CollocOps& ops);

double max_eig_mk(const CollocOps& ops);
// Top eigenpair of the symmetrized M_k.
std::pair<double, RVec> max_eigpair_mk(const CollocOps& ops);

// Lowest eigenvalues of the unrestricted scalar operator L(0) acting on
// the given component (nls: 0 -> L1, 1 -> L2; block models use the full
// coupled operator and ignore the component).
RVec spectrum_l(const Model& model, int component, int n_lowest, int n = 512,
                double half_length = 40.0);

// Sup norm of the stationary equation applied to the profile.
double profile_residual(const Model& model, int n = 512,
                        double half_length = 40.0);

// Sup norm of L(0) applied to the profile derivative (translational mode).
double translational_residual(const Model& model, int n = 512,
                              double half_length = 40.0);

struct CriterionResult {
  double k0 = 0.0;
  double derivative_pairing = 0.0;
  bool valid = false;
  std::string note;
};

// Bisection for the zero crossing of max eig M_k on [k_lo, k_hi], plus the
// finite-difference derivative pairing at the crossing.
CriterionResult find_k0_criterion(const Model& model, double k_lo,
                                  double k_hi, int n = 512,
                                  double half_length = 40.0,
                                  double tol_k = 2.5e-4);

// Matrix-free spectral application of the energy operators on a uniform
// grid, used for mode residuals and conservation checks.
struct SpectralApplier {
  Model model;
  CollocGrid grid;
  double k = 0.0;
  RVec w;    // scalar potential on the grid (d = 1 models and bou)
  RVec q2;   // nls: Q^2 on the grid

  std::vector<Vec> apply_ls(const std::vector<Vec>& u) const;
  std::vector<Vec> apply_j(const std::vector<Vec>& u) const;
  std::vector<Vec> apply_jls(const std::vector<Vec>& u) const;
  std::vector<Vec> apply_s(const std::vector<Vec>& u) const;
  Vec derivative(const Vec& u) const;
  cplx inner(const std::vector<Vec>& a, const std::vector<Vec>& b) const;
  double h1_norm_sq(const std::vector<Vec>& u) const;
};

SpectralApplier make_applier(const Model& model, double k, int n,
                             double half_length);

}  // namespace solstab
