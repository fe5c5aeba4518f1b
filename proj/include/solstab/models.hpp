#pragma once

#include <Eigen/Dense>

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "solstab/common.hpp"

namespace solstab {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

enum class ModelId { gkp1, nls, boussinesq, zk, kpbbm };

struct BouProfileTable;

// One registered model family: soliton profile, linearized ODE data in the
// transverse wavenumber k and spectral parameter sigma, and the Fourier
// symbols of the energy-surface operators.
class Model {
 public:
  static Model make(const std::string& name,
                    const std::map<std::string, double>& params = {});
  static const std::vector<std::string>& names();

  const std::string& name() const { return name_; }
  ModelId id() const { return id_; }
  const std::map<std::string, double>& params() const { return params_; }

  int components() const { return d_; }
  int power() const { return p_; }
  double speed() const { return c_; }

  // Dimension of the first-order spatial ODE system at transverse
  // wavenumber k (gkp1/kpbbm drop to the reduced system at k = 0).
  int ode_dim(double k) const;
  bool has_reduced_branch() const;
  bool simulatable() const;
  bool corrector_supported() const;

  // Exponential decay rate of the potential terms in the ODE matrix.
  double decay_rate() const { return alpha_; }
  // Exponential decay rate of the soliton profile itself.
  double profile_decay_rate() const { return alpha_q_; }
  // Wavenumber beyond which transverse instability is excluded by a
  // coercivity bound on the quadratic form.
  double k_exclusion() const { return k_excl_; }
  // Soft upper bound for band searches.
  double kmax_hint() const { return kmax_hint_; }

  RVec profile(double x) const;
  double profile_derivative(double x) const;
  // Scalar potential entering the ODE matrix: {W, W', W''}.
  std::array<double, 3> potential(double x) const;

  // First-order ODE matrix; dispatches to the reduced form at k = 0 for
  // models with a reduced branch.
  Mat ode_matrix(double x, cplx sigma, double k) const;
  Mat ode_matrix_freestream(cplx sigma, double k) const;
  // Full-dimension form regardless of k (k = 0 allowed).
  Mat ode_matrix_full(double x, cplx sigma, double k) const;
  Mat ode_matrix_full_freestream(cplx sigma, double k) const;

  // Characteristic polynomial of the freestream matrix, highest degree
  // first; same k = 0 dispatch as ode_matrix.
  std::vector<cplx> char_poly(cplx sigma, double k) const;
  std::vector<cplx> char_poly_full(cplx sigma, double k) const;

  // JSON metadata describing how the quadratic pencil was reduced to
  // first-order form.
  std::string ode_source_map() const;

  // Fourier symbols (d x d) of the Hamiltonian building blocks.
  Mat j_symbol(double xi, double k) const;
  Mat s_symbol(double xi, double k) const;
  Mat l0_symbol(double xi) const;
  RMat potential_matrix(double x) const;

 private:
  Model() = default;

  std::string name_;
  ModelId id_ = ModelId::gkp1;
  std::map<std::string, double> params_;
  int d_ = 1;
  int p_ = 2;
  double c_ = 0.0;
  double alpha_ = 1.0;
  double alpha_q_ = 1.0;
  double k_excl_ = 1.0;
  double kmax_hint_ = 1.0;
  double w0_ = 0.0;    // potential amplitude, W = w0 sech^2(beta x)
  double beta_ = 0.5;  // potential half-rate
  std::shared_ptr<BouProfileTable> bou_table_;
};

}  // namespace solstab
