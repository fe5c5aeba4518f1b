#include "solstab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "solstab/fft.hpp"
#include "solstab/odecore.hpp"

namespace solstab {

namespace {

struct Grid2 {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  double hx = 0.0;
  double hy = 0.0;
  std::vector<double> xi;
  std::vector<double> eta;
  RVec x;
  RVec y;
};

Grid2 make_grid2(int nx, int ny, double lx, double ly) {
  Grid2 g;
  g.nx = nx;
  g.ny = ny;
  g.lx = lx;
  g.ly = ly;
  g.hx = lx / nx;
  g.hy = ly / ny;
  g.xi = fft::freq(nx, g.hx);
  g.eta = fft::freq(ny, g.hy);
  g.x.resize(nx);
  for (int i = 0; i < nx; ++i) g.x(i) = -0.5 * lx + g.hx * i;
  g.y.resize(ny);
  for (int j = 0; j < ny; ++j) g.y(j) = g.hy * j;
  return g;
}

int fold(int i, int n) { return (i <= (n - 1) / 2) ? i : i - n; }

// 2/3-rule mask: keep |m| strictly below n/3 in both directions.
std::vector<char> dealias_mask(int nx, int ny) {
  std::vector<char> mask(static_cast<size_t>(nx) * ny, 1);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int mx = std::abs(fold(ix, nx));
      const int my = std::abs(fold(iy, ny));
      if (3 * mx >= nx || 3 * my >= ny) {
        mask[static_cast<size_t>(iy) * nx + ix] = 0;
      }
    }
  }
  return mask;
}

struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int n = 0;
};

LinFit linear_fit(const std::vector<double>& t, const std::vector<double>& y) {
  LinFit f;
  f.n = static_cast<int>(t.size());
  if (f.n < 2) return f;
  double st = 0.0, sy = 0.0;
  for (int i = 0; i < f.n; ++i) {
    st += t[static_cast<size_t>(i)];
    sy += y[static_cast<size_t>(i)];
  }
  const double mt = st / f.n, my = sy / f.n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (int i = 0; i < f.n; ++i) {
    const double dt = t[static_cast<size_t>(i)] - mt;
    const double dy = y[static_cast<size_t>(i)] - my;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (stt == 0.0) return f;
  f.slope = sty / stt;
  f.intercept = my - f.slope * mt;
  f.r2 = (syy == 0.0) ? 1.0 : (sty * sty) / (stt * syy);
  return f;
}

using Field = std::vector<cplx>;

// Linear symbol of the moving-frame evolution; gkp1 treats xi = 0 as 0 and
// relies on the per-step zero-mode projection.
cplx evolution_symbol(ModelId id, double xi, double eta) {
  switch (id) {
    case ModelId::gkp1:
      if (xi == 0.0) return cplx(0.0, 0.0);
      return cplx(0.0, xi * xi * xi + xi + eta * eta / xi);
    case ModelId::zk:
      return cplx(0.0, xi + xi * xi * xi + xi * eta * eta);
    case ModelId::nls:
      return cplx(0.0, -(1.0 + xi * xi + eta * eta));
    default:
      throw parameter_error("model has no time evolution");
  }
}

struct Stepper {
  const Model* model = nullptr;
  Grid2 g;
  double dt = 0.0;
  bool dealias = true;
  bool linear_only = false;
  std::vector<char> mask;
  Field e_half;  // exp(dt/2 Lambda)
  Field e_full;
  RVec wpot;  // potential W on the x grid (gkp1/zk linear runs)
  RVec q2;    // Q^2 on the x grid (nls)
  Field buf_a, buf_b;

  void init(const Model& m, const Grid2& grid, double dt_in, bool deal,
            bool lin) {
    model = &m;
    g = grid;
    dt = dt_in;
    dealias = deal;
    linear_only = lin;
    mask = dealias_mask(g.nx, g.ny);
    const size_t sz = static_cast<size_t>(g.nx) * g.ny;
    e_half.resize(sz);
    e_full.resize(sz);
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        const cplx lam = evolution_symbol(
            m.id(), g.xi[static_cast<size_t>(ix)],
            g.eta[static_cast<size_t>(iy)]);
        const size_t idx = static_cast<size_t>(iy) * g.nx + ix;
        e_half[idx] = std::exp(0.5 * dt * lam);
        e_full[idx] = e_half[idx] * e_half[idx];
      }
    }
    if (m.id() == ModelId::nls) {
      q2.resize(g.nx);
      for (int i = 0; i < g.nx; ++i) {
        const double q = m.profile(g.x(i))(0);
        q2(i) = q * q;
      }
    } else if (lin) {
      wpot.resize(g.nx);
      for (int i = 0; i < g.nx; ++i) wpot(i) = m.potential(g.x(i))[0];
    }
    buf_a.resize(sz);
    buf_b.resize(sz);
  }

  void apply_mask(Field& f) const {
    if (!dealias) return;
    for (size_t i = 0; i < f.size(); ++i) {
      if (!mask[i]) f[i] = cplx(0.0, 0.0);
    }
  }

  // gkp1 zero-mode constraint: the x-mean per transverse mode is frozen;
  // drop everything on xi = 0 except the (0,0) background mean.
  void project(Field& f) const {
    if (model->id() != ModelId::gkp1) return;
    for (int iy = 1; iy < g.ny; ++iy) {
      f[static_cast<size_t>(iy) * g.nx] = cplx(0.0, 0.0);
    }
  }

  // Nonlinear (or linearized) tendency in spectral space, dealiased.
  void rhs(const Field& vhat, Field& out) {
    buf_a = vhat;
    fft::inverse2(buf_a.data(), g.ny, g.nx);
    const int p = model->power();
    if (model->id() == ModelId::nls) {
      for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
          const size_t idx = static_cast<size_t>(iy) * g.nx + ix;
          const cplx v = buf_a[idx];
          if (linear_only) {
            buf_b[idx] = cplx(0.0, 1.0) * q2(ix) * (2.0 * v + std::conj(v));
          } else {
            buf_b[idx] = cplx(0.0, 1.0) * std::norm(v) * v;
          }
        }
      }
    } else {
      for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
          const size_t idx = static_cast<size_t>(iy) * g.nx + ix;
          const cplx v = buf_a[idx];
          if (linear_only) {
            buf_b[idx] = wpot(ix) * v;
          } else {
            cplx w = v;
            for (int q = 1; q < p; ++q) w *= v;
            buf_b[idx] = w;
          }
        }
      }
    }
    fft::forward2(buf_b.data(), g.ny, g.nx);
    if (model->id() == ModelId::nls) {
      out = buf_b;
    } else {
      for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
          const size_t idx = static_cast<size_t>(iy) * g.nx + ix;
          out[idx] = cplx(0.0, -g.xi[static_cast<size_t>(ix)]) * buf_b[idx];
        }
      }
    }
    apply_mask(out);
  }

  // One integrating-factor RK4 step (stages carry the dt factor here).
  void step(Field& v, Field& k1, Field& k2, Field& k3, Field& k4,
            Field& tmp) {
    const size_t sz = v.size();
    rhs(v, k1);
    for (size_t i = 0; i < sz; ++i) {
      tmp[i] = e_half[i] * (v[i] + 0.5 * dt * k1[i]);
    }
    rhs(tmp, k2);
    for (size_t i = 0; i < sz; ++i) {
      tmp[i] = e_half[i] * v[i] + 0.5 * dt * k2[i];
    }
    rhs(tmp, k3);
    for (size_t i = 0; i < sz; ++i) {
      tmp[i] = e_full[i] * v[i] + e_half[i] * dt * k3[i];
    }
    rhs(tmp, k4);
    for (size_t i = 0; i < sz; ++i) {
      v[i] = e_full[i] * v[i] +
             dt *
                 (e_full[i] * k1[i] + 2.0 * e_half[i] * (k2[i] + k3[i]) +
                  k4[i]) /
                 6.0;
    }
    project(v);
  }
};

double spectral_norm_sq(const Field& vhat, const Grid2& g, bool perp_only) {
  double s = 0.0;
  for (int iy = perp_only ? 1 : 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      s += std::norm(vhat[static_cast<size_t>(iy) * g.nx + ix]);
    }
  }
  return s * g.hx * g.hy / (static_cast<double>(g.nx) * g.ny);
}

}  // namespace

Vec mode_interpolate(const RVec& mode_x, const Vec& mode_u,
                     const RVec& x_out) {
  const int n = static_cast<int>(mode_x.size());
  const double h = mode_x(1) - mode_x(0);
  const double x0 = mode_x(0);
  const double x_hi = x0 + n * h;  // one-sided: grid covers [x0, x_hi)
  std::vector<cplx> coef(mode_u.data(), mode_u.data() + n);
  fft::forward(coef.data(), n);
  const std::vector<double> xi = fft::freq(n, h);
  Vec out = Vec::Zero(x_out.size());
  for (Eigen::Index i = 0; i < x_out.size(); ++i) {
    const double x = x_out(i);
    if (x < x0 || x >= x_hi) continue;
    cplx s(0.0, 0.0);
    for (int m = 0; m < n; ++m) {
      s += coef[static_cast<size_t>(m)] *
           std::exp(cplx(0.0, xi[static_cast<size_t>(m)] * (x - x0)));
    }
    out(i) = s / static_cast<double>(n);
  }
  return out;
}

SimReport run_simulation(const Model& model, const SimConfig& cfg,
                         const ModeResult* mode,
                         const std::vector<RMat>* packet_init) {
  if (!model.simulatable()) {
    throw parameter_error("time evolution supports gkp1, zk, and nls only");
  }
  if (cfg.perturbation != PerturbationKind::none &&
      (cfg.delta <= 0.0 || cfg.delta > 0.1)) {
    throw parameter_error("perturbation amplitude must lie in (0, 0.1]");
  }
  if (cfg.nx < 8 || cfg.ny < 4 || cfg.dt <= 0.0 || cfg.t_max <= 0.0) {
    throw parameter_error("invalid grid or time parameters");
  }
  const double lx = (cfg.lx > 0.0) ? cfg.lx : 16.0 * pi;
  if (model.profile(0.5 * lx).cwiseAbs().maxCoeff() > 1e-8) {
    throw parameter_error("box too small: soliton tail above 1e-8 at the seam");
  }
  double ly = cfg.ly;
  if (cfg.perturbation == PerturbationKind::eigenmode) {
    if (mode == nullptr) {
      throw parameter_error("eigenmode perturbation needs a reconstructed mode");
    }
    if (ly <= 0.0) {
      ly = 2.0 * pi / mode->k;
    } else {
      const double m0 = mode->k * ly / (2.0 * pi);
      if (std::abs(m0 - std::round(m0)) > 1e-9) {
        throw parameter_error("box height incommensurate with the mode");
      }
    }
  } else if (cfg.perturbation == PerturbationKind::wave_packet) {
    if (packet_init == nullptr || ly <= 0.0) {
      throw parameter_error("wave-packet runs need packet fields and ly");
    }
  } else if (ly <= 0.0) {
    ly = 2.0 * pi;
  }
  const Grid2 g = make_grid2(cfg.nx, cfg.ny, lx, ly);
  const bool is_nls = (model.id() == ModelId::nls);

  // Assemble initial data in physical space.
  Field state(static_cast<size_t>(g.nx) * g.ny, cplx(0.0, 0.0));
  if (!cfg.linear_only) {
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        state[static_cast<size_t>(iy) * g.nx + ix] = model.profile(g.x(ix))(0);
      }
    }
  }
  if (cfg.perturbation != PerturbationKind::none) {
    Field pert(static_cast<size_t>(g.nx) * g.ny, cplx(0.0, 0.0));
    if (cfg.perturbation == PerturbationKind::eigenmode) {
      std::vector<Vec> uc;
      for (const Vec& comp : mode->u) {
        uc.push_back(mode_interpolate(mode->x, comp, g.x));
      }
      for (int iy = 0; iy < g.ny; ++iy) {
        const cplx phase = std::exp(cplx(0.0, mode->k * g.y(iy)));
        for (int ix = 0; ix < g.nx; ++ix) {
          const size_t idx = static_cast<size_t>(iy) * g.nx + ix;
          const double w0 = 2.0 * std::real(phase * uc[0](ix));
          if (is_nls) {
            const double w1 = 2.0 * std::real(phase * uc[1](ix));
            pert[idx] = cplx(w0, w1);
          } else {
            pert[idx] = w0;
          }
        }
      }
    } else {
      const auto& fields = *packet_init;
      if (fields.empty() || fields[0].rows() != g.ny ||
          fields[0].cols() != g.nx) {
        throw parameter_error("packet fields do not match the grid");
      }
      for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
          const size_t idx = static_cast<size_t>(iy) * g.nx + ix;
          if (is_nls) {
            pert[idx] = cplx(fields[0](iy, ix),
                             fields.size() > 1 ? fields[1](iy, ix) : 0.0);
          } else {
            pert[idx] = fields[0](iy, ix);
          }
        }
      }
    }
    fft::forward2(pert.data(), g.ny, g.nx);
    const double pnorm = std::sqrt(spectral_norm_sq(pert, g, true));
    if (pnorm <= 0.0) {
      throw parameter_error("perturbation has no transverse content");
    }
    const double scale = cfg.delta / pnorm;
    fft::inverse2(pert.data(), g.ny, g.nx);
    for (size_t i = 0; i < state.size(); ++i) state[i] += scale * pert[i];
  }

  // Stability diagnostic for the explicit nonlinear stage.
  double umax = 0.0;
  for (const cplx& v : state) umax = std::max(umax, std::abs(v));
  double ximax = 0.0;
  for (double v : g.xi) ximax = std::max(ximax, std::abs(v));
  double lip = 1.0;
  if (is_nls) {
    lip = 3.0 * umax * umax;
  } else if (cfg.linear_only) {
    double wmax = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      wmax = std::max(wmax, std::abs(model.potential(g.x(i))[0]));
    }
    lip = ximax * wmax;
  } else {
    lip = ximax * model.power() * std::pow(umax, model.power() - 1);
  }

  SimReport rep;
  rep.nx = g.nx;
  rep.ny = g.ny;
  rep.lx = g.lx;
  rep.ly = g.ly;
  rep.dt = cfg.dt;
  rep.dt_stability_bound = (lip > 0.0) ? 2.828 / lip : 1e300;
  if (cfg.dt > rep.dt_stability_bound) {
    rep.note += "dt exceeds the recorded stability bound; ";
  }

  fft::forward2(state.data(), g.ny, g.nx);
  Stepper st;
  st.init(model, g, cfg.dt, cfg.dealias, cfg.linear_only);
  st.apply_mask(state);
  st.project(state);

  Field k1(state.size()), k2(state.size()), k3(state.size()),
      k4(state.size()), tmp(state.size());

  const double mass0 = spectral_norm_sq(state, g, false);
  std::vector<double> ts, perps;
  auto record = [&](int step_idx, double t) {
    const double tot2 = spectral_norm_sq(state, g, false);
    const double perp2 = spectral_norm_sq(state, g, true);
    const double tot = std::sqrt(tot2);
    const double perp = std::sqrt(perp2);
    ts.push_back(t);
    perps.push_back(perp);
    if (step_idx % std::max(1, cfg.series_stride) == 0) {
      SimSeriesRow row;
      row.t = t;
      row.norm_total = tot;
      row.norm_perp = perp;
      row.hamiltonian_diag = (mass0 > 0.0) ? (tot2 - mass0) / mass0 : 0.0;
      rep.series.push_back(row);
    }
    return std::pair<double, double>(tot, perp);
  };
  auto snapshot = [&](int step_idx, double t) {
    if (cfg.snapshot_stride <= 0 || cfg.snapshot_prefix.empty()) return;
    if (step_idx % cfg.snapshot_stride != 0) return;
    Field phys = state;
    fft::inverse2(phys.data(), g.ny, g.nx);
    std::vector<RMat> fields;
    const int ncomp = is_nls ? 2 : 1;
    for (int c = 0; c < ncomp; ++c) fields.push_back(RMat::Zero(g.ny, g.nx));
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        const cplx v = phys[static_cast<size_t>(iy) * g.nx + ix];
        fields[0](iy, ix) = v.real();
        if (is_nls) fields[1](iy, ix) = v.imag();
      }
    }
    char name[32];
    std::snprintf(name, sizeof(name), "_%06d.bin", step_idx);
    const std::string path = cfg.snapshot_prefix + name;
    write_snapshot(path, g.nx, g.ny, g.lx, g.ly, t, fields);
    rep.snapshot_files.push_back(path);
  };

  record(0, 0.0);
  snapshot(0, 0.0);
  const int nsteps = static_cast<int>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
  double t = 0.0;
  for (int n = 1; n <= nsteps; ++n) {
    st.step(state, k1, k2, k3, k4, tmp);
    t = n * cfg.dt;
    const auto [tot, perp] = record(n, t);
    snapshot(n, t);
    if (!std::isfinite(tot)) {
      rep.blow_up = true;
      rep.blow_up_time = (n - 1) * cfg.dt;
      rep.note += "state lost finiteness (blow-up candidate); ";
      break;
    }
    if (cfg.perturbation != PerturbationKind::none && perp >= cfg.kappa) {
      rep.threshold_reached = true;
      const double p0 = perps[perps.size() - 2];
      const double t0 = ts[ts.size() - 2];
      if (p0 > 0.0 && p0 < cfg.kappa && perp > p0) {
        rep.t_delta = t0 + (t - t0) * (std::log(cfg.kappa) - std::log(p0)) /
                               (std::log(perp) - std::log(p0));
      } else {
        rep.t_delta = t;
      }
      rep.distance = perp;
      break;
    }
  }
  rep.t_end = t;

  for (const SimSeriesRow& row : rep.series) {
    rep.invariant_drift =
        std::max(rep.invariant_drift, std::abs(row.hamiltonian_diag));
  }

  if (cfg.perturbation != PerturbationKind::none) {
    const double fit_lo = cfg.fit_lo_factor * cfg.delta;
    std::vector<double> ft, fy;
    for (size_t i = 0; i < ts.size(); ++i) {
      if (perps[i] >= fit_lo && perps[i] <= cfg.fit_hi && perps[i] > 0.0) {
        ft.push_back(ts[i]);
        fy.push_back(std::log(perps[i]));
      }
    }
    if (ft.size() >= 3) {
      const LinFit fit = linear_fit(ft, fy);
      rep.growth_rate = fit.slope;
      rep.fit_r2 = fit.r2;
      rep.fit_t_lo = ft.front();
      rep.fit_t_hi = ft.back();
    } else {
      rep.note += "growth fit window too small; ";
    }
    if (!rep.threshold_reached && !rep.blow_up) {
      rep.note += "threshold not reached by t_max (inconclusive); ";
    }
  }
  return rep;
}

void write_snapshot(const std::string& path, int nx, int ny, double lx,
                    double ly, double t, const std::vector<RMat>& fields) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw parameter_error("cannot open snapshot file " + path);
  f.write("SSBIN001", 8);
  const int32_t inx = nx, iny = ny, ncomp = static_cast<int32_t>(fields.size());
  f.write(reinterpret_cast<const char*>(&inx), 4);
  f.write(reinterpret_cast<const char*>(&iny), 4);
  f.write(reinterpret_cast<const char*>(&lx), 8);
  f.write(reinterpret_cast<const char*>(&ly), 8);
  f.write(reinterpret_cast<const char*>(&t), 8);
  f.write(reinterpret_cast<const char*>(&ncomp), 4);
  std::vector<double> row(static_cast<size_t>(nx));
  for (const RMat& comp : fields) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) row[static_cast<size_t>(ix)] = comp(iy, ix);
      f.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(double) * row.size()));
    }
  }
  if (!f) throw parameter_error("failed writing snapshot file " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw parameter_error("cannot open snapshot file " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, "SSBIN001", 8) != 0) {
    throw parameter_error("not a snapshot file: " + path);
  }
  Snapshot s;
  int32_t inx = 0, iny = 0, ncomp = 0;
  f.read(reinterpret_cast<char*>(&inx), 4);
  f.read(reinterpret_cast<char*>(&iny), 4);
  f.read(reinterpret_cast<char*>(&s.lx), 8);
  f.read(reinterpret_cast<char*>(&s.ly), 8);
  f.read(reinterpret_cast<char*>(&s.t), 8);
  f.read(reinterpret_cast<char*>(&ncomp), 4);
  if (!f || inx <= 0 || iny <= 0 || ncomp <= 0 || ncomp > 16) {
    throw parameter_error("corrupt snapshot header: " + path);
  }
  s.nx = inx;
  s.ny = iny;
  std::vector<double> row(static_cast<size_t>(s.nx));
  for (int c = 0; c < ncomp; ++c) {
    RMat comp(s.ny, s.nx);
    for (int iy = 0; iy < s.ny; ++iy) {
      f.read(reinterpret_cast<char*>(row.data()),
             static_cast<std::streamsize>(sizeof(double) * row.size()));
      for (int ix = 0; ix < s.nx; ++ix) comp(iy, ix) = row[static_cast<size_t>(ix)];
    }
    s.fields.push_back(std::move(comp));
  }
  if (!f) throw parameter_error("truncated snapshot file: " + path);
  return s;
}

PacketResult wave_packet(const Model& model, const DispersionCurve& curve,
                         double k_lo, double k_hi, int n_nodes, double t_max,
                         int n_times, const EvansOptions& opt) {
  if (n_nodes < 3 || k_hi <= k_lo || k_lo <= 0.0) {
    throw parameter_error("packet needs k_hi > k_lo > 0 and >= 3 nodes");
  }
  if (curve.samples.empty()) {
    throw parameter_error("packet needs a traced dispersion curve");
  }
  PacketResult out;
  out.dk = (k_hi - k_lo) / (n_nodes - 1);
  const double snapped = std::max(1.0, std::round(k_lo / out.dk)) * out.dk;
  out.m = (curve.m > 0) ? curve.m : 2;
  out.sigma0 = curve.sigma0;
  // Predictor for sigma(k) by interpolation along the traced curve.
  auto predict = [&](double k) -> cplx {
    const auto& s = curve.samples;
    if (k <= s.front().k) return s.front().sigma;
    if (k >= s.back().k) return s.back().sigma;
    for (size_t i = 0; i + 1 < s.size(); ++i) {
      if (k >= s[i].k && k <= s[i + 1].k) {
        const double w = (k - s[i].k) / (s[i + 1].k - s[i].k);
        return s[i].sigma + w * (s[i + 1].sigma - s[i].sigma);
      }
    }
    return s.back().sigma;
  };
  // All nodes must share one sampling grid, so pin the span to the node
  // with the slowest spatial decay (the smallest k in the band).
  EvansOptions mode_opt = opt;
  if (mode_opt.x_inf <= 0.0) {
    double gap = 1e300;
    for (const double kq : {snapped, snapped + (n_nodes - 1) * out.dk}) {
      gap = std::min(gap,
                     spatial_eigenvalues(model, predict(kq), kq).spectral_gap);
    }
    mode_opt.x_inf =
        std::max(std::max(20.0, 12.0 / model.decay_rate()),
                 std::min(140.0, 18.0 / std::max(gap, 1e-8)));
  }
  for (int j = 0; j < n_nodes; ++j) {
    const double k = snapped + j * out.dk;
    const cplx pred = predict(k);
    RectSigma rect;
    rect.re_lo = std::max(0.002, 0.4 * pred.real());
    rect.re_hi = 1.8 * pred.real() + 0.02;
    rect.im_lo = pred.imag() - 0.1;
    rect.im_hi = pred.imag() + 0.1;
    const auto root = find_unstable_sigma(model, k, rect, opt);
    if (!root) {
      throw numerical_error("packet node " + std::to_string(k) +
                            " left the unstable band");
    }
    ModeResult mr = mode_reconstruct(model, root->sigma, k, 1024, mode_opt);
    if (j == 0) {
      out.mode_x = mr.x;
    } else {
      // Phase-align to the previous node for continuity in k.
      cplx ip(0.0, 0.0);
      const double h = out.mode_x(1) - out.mode_x(0);
      for (size_t c = 0; c < mr.u.size(); ++c) {
        ip += h * out.modes.back()[c].dot(mr.u[c]);
      }
      if (std::abs(ip) < 0.5) {
        throw numerical_error(
            "packet modes decohere between nodes; refine the quadrature");
      }
      const cplx phase = ip / std::abs(ip);
      for (Vec& comp : mr.u) comp *= std::conj(phase);
    }
    out.ks.push_back(k);
    out.sigmas.push_back(root->sigma);
    out.modes.push_back(mr.u);
  }
  // Analytic norms: y-orthogonality reduces the packet norm to a sum over
  // nodes, |u(t)|^2 = 4 pi dk sum_j e^{2 Re sigma_j t}.
  out.t.resize(static_cast<size_t>(n_times));
  out.norm.resize(static_cast<size_t>(n_times));
  out.ratio.resize(static_cast<size_t>(n_times));
  for (int i = 0; i < n_times; ++i) {
    const double t = t_max * i / (n_times - 1);
    double s = 0.0;
    for (const cplx sg : out.sigmas) s += std::exp(2.0 * sg.real() * t);
    out.t[static_cast<size_t>(i)] = t;
    out.norm[static_cast<size_t>(i)] = std::sqrt(4.0 * pi * out.dk * s);
  }
  for (int i = 0; i < n_times; ++i) {
    const double t = out.t[static_cast<size_t>(i)];
    out.ratio[static_cast<size_t>(i)] =
        out.norm[static_cast<size_t>(i)] *
        std::pow(1.0 + t, 1.0 / (2.0 * out.m)) * std::exp(-out.sigma0 * t) /
        out.norm[0];
  }
  // Parseval cross-check at t = 0 against an assembled grid field.
  {
    const int mmax = static_cast<int>(std::round(out.ks.back() / out.dk));
    int ny = 4;
    while (ny < 2 * mmax + 4) ny *= 2;
    const int nx = 512;
    const double lx = 16.0 * pi;
    const auto fields = packet_field(out, 0.0, nx, ny, lx);
    const double hx = lx / nx;
    const double hy = (2.0 * pi / out.dk) / ny;
    double grid2 = 0.0;
    for (const RMat& f : fields) grid2 += f.squaredNorm();
    grid2 *= hx * hy;
    const double ana = out.norm[0];
    out.parseval_error = std::abs(std::sqrt(grid2) - ana) / ana;
  }
  // Fitted exponent of log(norm (1+t)^{1/(2m)}) on [1/sigma0, 3/sigma0].
  {
    std::vector<double> ft, fy;
    for (size_t i = 0; i < out.t.size(); ++i) {
      const double t = out.t[i];
      if (t >= 1.0 / out.sigma0 && t <= 3.0 / out.sigma0) {
        ft.push_back(t);
        fy.push_back(std::log(out.norm[i] *
                              std::pow(1.0 + t, 1.0 / (2.0 * out.m))));
      }
    }
    const LinFit fit = linear_fit(ft, fy);
    out.fitted_exponent = fit.slope;
  }
  return out;
}

std::vector<RMat> packet_field(const PacketResult& packet, double t, int nx,
                               int ny, double lx) {
  if (packet.modes.empty()) throw parameter_error("empty packet");
  const double ly = 2.0 * pi / packet.dk;
  const double hy = ly / ny;
  RVec x(nx);
  for (int i = 0; i < nx; ++i) x(i) = -0.5 * lx + lx / nx * i;
  const size_t ncomp = packet.modes.front().size();
  std::vector<RMat> fields(ncomp, RMat::Zero(ny, nx));
  for (size_t j = 0; j < packet.ks.size(); ++j) {
    const cplx amp = packet.dk * std::exp(packet.sigmas[j] * t);
    for (size_t c = 0; c < ncomp; ++c) {
      const Vec uj = mode_interpolate(packet.mode_x, packet.modes[j][c], x);
      for (int iy = 0; iy < ny; ++iy) {
        const cplx ph =
            amp * std::exp(cplx(0.0, packet.ks[j] * hy * iy));
        for (int ix = 0; ix < nx; ++ix) {
          fields[c](iy, ix) += 2.0 * std::real(ph * uj(ix));
        }
      }
    }
  }
  return fields;
}

CorrectorResult first_corrector(const Model& model, const ModeResult& mode,
                                double t_max, double dt, bool zero_forcing) {
  if (!model.corrector_supported()) {
    throw parameter_error("first corrector supports gkp1 and zk only");
  }
  const int n = 512;
  const double half = 24.0;
  const double h = 2.0 * half / n;
  const std::vector<double> xi = fft::freq(n, h);
  RVec x(n);
  for (int i = 0; i < n; ++i) x(i) = -half + h * i;
  const double k0 = mode.k;
  const cplx sigma = mode.sigma;
  const double sigma0 = sigma.real();
  const int p = model.power();
  const double cp = 0.5 * p * (p - 1);

  const Vec u = mode_interpolate(mode.x, mode.u[0], x);
  RVec w(n), qpm2(n);
  for (int i = 0; i < n; ++i) {
    w(i) = model.potential(x(i))[0];
    const double q = model.profile(x(i))(0);
    qpm2(i) = (p == 2) ? 1.0 : std::pow(q, p - 2);
  }
  // Spectral forcing profiles f_m = -dx(cp Q^{p-2} pair), pair = U^2 or
  // 2|U|^2 for the transverse harmonics 2k0 and 0.
  auto forcing = [&](bool squared) {
    std::vector<cplx> f(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const cplx pair = squared ? u(i) * u(i) : cplx(2.0 * std::norm(u(i)), 0.0);
      f[static_cast<size_t>(i)] = cp * qpm2(i) * pair;
    }
    fft::forward(f.data(), n);
    for (int i = 0; i < n; ++i) {
      f[static_cast<size_t>(i)] *= cplx(0.0, -xi[static_cast<size_t>(i)]);
      if (zero_forcing) f[static_cast<size_t>(i)] = cplx(0.0, 0.0);
    }
    return f;
  };
  const std::vector<cplx> f2 = forcing(true);
  const std::vector<cplx> f0 = forcing(false);

  struct Harmonic {
    std::vector<cplx> v, e_half, e_full;
    const std::vector<cplx>* f;
    cplx rate;  // forcing exponent
  };
  std::vector<Harmonic> hs(2);
  for (int m = 0; m < 2; ++m) {
    Harmonic& hh = hs[static_cast<size_t>(m)];
    hh.v.assign(static_cast<size_t>(n), cplx(0.0, 0.0));
    hh.e_half.resize(static_cast<size_t>(n));
    const double eta = (m == 0) ? 0.0 : 2.0 * k0;
    for (int i = 0; i < n; ++i) {
      const cplx lam =
          evolution_symbol(model.id(), xi[static_cast<size_t>(i)], eta);
      hh.e_half[static_cast<size_t>(i)] = std::exp(0.5 * dt * lam);
    }
    hh.e_full.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      hh.e_full[static_cast<size_t>(i)] =
          hh.e_half[static_cast<size_t>(i)] * hh.e_half[static_cast<size_t>(i)];
    }
    hh.f = (m == 0) ? &f0 : &f2;
    hh.rate = (m == 0) ? cplx(2.0 * sigma.real(), 0.0) : 2.0 * sigma;
  }

  std::vector<cplx> buf(static_cast<size_t>(n)), rhs_out(static_cast<size_t>(n));
  auto rhs = [&](const Harmonic& hh, const std::vector<cplx>& v, double t,
                 std::vector<cplx>& out) {
    buf = v;
    fft::inverse(buf.data(), n);
    for (int i = 0; i < n; ++i) {
      buf[static_cast<size_t>(i)] *= w(i);
    }
    fft::forward(buf.data(), n);
    const cplx tf = std::exp(hh.rate * t);
    for (int i = 0; i < n; ++i) {
      out[static_cast<size_t>(i)] =
          cplx(0.0, -xi[static_cast<size_t>(i)]) * buf[static_cast<size_t>(i)] +
          tf * (*hh.f)[static_cast<size_t>(i)];
    }
    if (model.id() == ModelId::gkp1) out[0] = cplx(0.0, 0.0);
  };

  CorrectorResult out;
  out.sigma0 = sigma0;
  const double ly = 2.0 * pi / k0;
  auto total_norm = [&]() {
    double s0 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      s0 += std::norm(hs[0].v[static_cast<size_t>(i)]);
      s2 += std::norm(hs[1].v[static_cast<size_t>(i)]);
    }
    const double par = h / n;
    return std::sqrt(ly * par * (s0 + 2.0 * s2));
  };
  out.t.push_back(0.0);
  out.norm.push_back(total_norm());
  out.norm_at_zero = out.norm.front();

  const int nsteps = static_cast<int>(std::ceil(t_max / dt - 1e-9));
  std::vector<cplx> k1(static_cast<size_t>(n)), k2(static_cast<size_t>(n)),
      k3(static_cast<size_t>(n)), k4(static_cast<size_t>(n)),
      tmp(static_cast<size_t>(n));
  for (int step = 1; step <= nsteps; ++step) {
    const double t = (step - 1) * dt;
    for (Harmonic& hh : hs) {
      rhs(hh, hh.v, t, k1);
      for (int i = 0; i < n; ++i) {
        tmp[static_cast<size_t>(i)] =
            hh.e_half[static_cast<size_t>(i)] *
            (hh.v[static_cast<size_t>(i)] + 0.5 * dt * k1[static_cast<size_t>(i)]);
      }
      rhs(hh, tmp, t + 0.5 * dt, k2);
      for (int i = 0; i < n; ++i) {
        tmp[static_cast<size_t>(i)] =
            hh.e_half[static_cast<size_t>(i)] * hh.v[static_cast<size_t>(i)] +
            0.5 * dt * k2[static_cast<size_t>(i)];
      }
      rhs(hh, tmp, t + 0.5 * dt, k3);
      for (int i = 0; i < n; ++i) {
        tmp[static_cast<size_t>(i)] =
            hh.e_full[static_cast<size_t>(i)] * hh.v[static_cast<size_t>(i)] +
            hh.e_half[static_cast<size_t>(i)] * dt * k3[static_cast<size_t>(i)];
      }
      rhs(hh, tmp, t + dt, k4);
      for (int i = 0; i < n; ++i) {
        hh.v[static_cast<size_t>(i)] =
            hh.e_full[static_cast<size_t>(i)] * hh.v[static_cast<size_t>(i)] +
            dt *
                (hh.e_full[static_cast<size_t>(i)] * k1[static_cast<size_t>(i)] +
                 2.0 * hh.e_half[static_cast<size_t>(i)] *
                     (k2[static_cast<size_t>(i)] + k3[static_cast<size_t>(i)]) +
                 k4[static_cast<size_t>(i)]) /
                6.0;
      }
      if (model.id() == ModelId::gkp1) hh.v[0] = cplx(0.0, 0.0);
    }
    out.t.push_back(step * dt);
    out.norm.push_back(total_norm());
  }
  std::vector<double> ft, fy;
  for (size_t i = 0; i < out.t.size(); ++i) {
    const double t = out.t[i];
    if (t >= 1.0 / sigma0 && t <= 3.0 / sigma0 && out.norm[i] > 0.0) {
      ft.push_back(t);
      fy.push_back(std::log(out.norm[i]));
    }
  }
  const LinFit fit = linear_fit(ft, fy);
  out.fitted_exponent = fit.slope;
  return out;
}

}  // namespace solstab
