#pragma once

#include <limits>
#include <string>
#include <vector>

#include "solstab/models.hpp"
#include "solstab/specfind.hpp"

namespace solstab {

enum class PerturbationKind { none, eigenmode, wave_packet };

struct SimConfig {
  int nx = 256;
  int ny = 32;
  double lx = 0.0;  // 0: automatic 16*pi
  double ly = 0.0;  // 0: automatic 2*pi/k for eigenmode perturbations
  double dt = 0.01;
  double t_max = 80.0;
  double delta = 1e-4;  // perturbation amplitude, in (0, 0.1]
  PerturbationKind perturbation = PerturbationKind::eigenmode;
  bool dealias = true;
  bool linear_only = false;  // evolve the linearized equation instead
  double kappa = 0.1;        // |Pi u| threshold defining T_delta
  double fit_lo_factor = 10.0;  // growth fit opens at fit_lo_factor * delta
  double fit_hi = 1e-2;         // and closes at this |Pi u|
  int series_stride = 1;        // record the time series every this many steps
  int snapshot_stride = 0;      // 0: no field snapshots
  std::string snapshot_prefix;  // path prefix for snapshot files
};

struct SimSeriesRow {
  double t = 0.0;
  double norm_total = 0.0;
  double norm_perp = 0.0;
  double hamiltonian_diag = 0.0;  // relative L2 mass drift
};

struct SimReport {
  double growth_rate = std::numeric_limits<double>::quiet_NaN();
  double fit_r2 = 0.0;
  double fit_t_lo = 0.0;
  double fit_t_hi = 0.0;
  bool threshold_reached = false;
  double t_delta = std::numeric_limits<double>::quiet_NaN();
  double distance = 0.0;  // d(u(T_delta), F) = |Pi u| at the crossing
  double invariant_drift = 0.0;
  bool blow_up = false;
  double blow_up_time = std::numeric_limits<double>::quiet_NaN();
  double dt_stability_bound = 0.0;
  std::string note;
  std::vector<SimSeriesRow> series;
  std::vector<std::string> snapshot_files;
  // Geometry actually used (after automatic choices).
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  double dt = 0.0;
  double t_end = 0.0;
};

// Pseudo-spectral instability experiment (gkp1, zk, nls): integrating-factor
// RK4 on a periodic box, soliton background plus the configured perturbation.
// `mode` is required for eigenmode perturbations; `packet_init` (real fields
// on the simulation grid, one per component) for wave-packet perturbations.
SimReport run_simulation(const Model& model, const SimConfig& cfg,
                         const ModeResult* mode = nullptr,
                         const std::vector<RMat>* packet_init = nullptr);

// Flat binary snapshot: magic "SSBIN001", int32 nx, int32 ny, float64 lx,
// float64 ly, float64 t, int32 ncomp, then ncomp blocks of ny*nx float64
// values in row-major (y, x) order. Native endianness.
void write_snapshot(const std::string& path, int nx, int ny, double lx,
                    double ly, double t, const std::vector<RMat>& fields);
struct Snapshot {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  double t = 0.0;
  std::vector<RMat> fields;
};
Snapshot read_snapshot(const std::string& path);

// Trigonometric interpolation of a mode component from its uniform grid to
// arbitrary points; zero outside the mode's domain.
Vec mode_interpolate(const RVec& mode_x, const Vec& mode_u, const RVec& x_out);

struct PacketResult {
  std::vector<double> ks;   // quadrature nodes, snapped to uniform spacing
  std::vector<cplx> sigmas; // sigma(k) at the nodes
  std::vector<std::vector<Vec>> modes;  // phase-aligned modes at the nodes
  RVec mode_x;              // common mode grid
  double dk = 0.0;
  double sigma0 = 0.0;
  int m = 2;                // flatness order used in the decay factor
  std::vector<double> t;
  std::vector<double> norm;   // packet L2 norm at each time
  std::vector<double> ratio;  // norm(t) (1+t)^{1/(2m)} e^{-sigma0 t} / norm(0)
  double parseval_error = 0.0;  // t=0 quadrature vs grid-assembly mismatch
  double fitted_exponent = 0.0; // slope of log(norm (1+t)^{1/(2m)})
};

// Linear wave packet over the sub-band [k_lo, k_hi]: superposition of
// unstable modes with analytic e^{sigma(k) t} time dependence.
PacketResult wave_packet(const Model& model, const DispersionCurve& curve,
                         double k_lo, double k_hi, int n_nodes, double t_max,
                         int n_times, const EvansOptions& opt = {});

// Real packet field 2 Re sum_j dk e^{sigma_j t} e^{i k_j y} U_j(x) sampled
// on an (nx, ny) grid of [-lx/2, lx/2) x [0, 2*pi/dk), one matrix (ny rows,
// nx columns) per component.
std::vector<RMat> packet_field(const PacketResult& packet, double t, int nx,
                               int ny, double lx);

struct CorrectorResult {
  std::vector<double> t;
  std::vector<double> norm;  // |u1|(t) over the periodic box
  double norm_at_zero = 0.0;
  double fitted_exponent = 0.0;
  double sigma0 = 0.0;
};

// First corrector of the weakly nonlinear expansion: the forced linearized
// equation with zero initial data, quadratic forcing from the eigenmode
// (transverse harmonics 0 and 2k0). gkp1 and zk only.
CorrectorResult first_corrector(const Model& model, const ModeResult& mode,
                                double t_max, double dt = 0.005,
                                bool zero_forcing = false);

}  // namespace solstab
