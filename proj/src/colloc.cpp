#include "solstab/colloc.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "solstab/fft.hpp"

namespace solstab {

CollocGrid make_grid(int n, double half_length) {
  if (n < 8 || half_length <= 0.0) throw parameter_error("invalid grid");
  CollocGrid g;
  g.n = n;
  g.half_length = half_length;
  g.h = 2.0 * half_length / n;
  g.x.resize(n);
  for (int j = 0; j < n; ++j) g.x(j) = -half_length + g.h * j;
  g.xi = fft::freq(n, g.h);
  return g;
}

RMat multiplier_matrix(const CollocGrid& grid,
                       const std::function<cplx(double)>& symbol) {
  const int n = grid.n;
  std::vector<cplx> col(static_cast<size_t>(n));
  for (int m = 0; m < n; ++m) col[static_cast<size_t>(m)] = symbol(grid.xi[static_cast<size_t>(m)]);
  fft::inverse(col.data(), n);
  RMat out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      out(j, l) = col[static_cast<size_t>(((j - l) % n + n) % n)].real();
    }
  }
  return out;
}

RMat zero_mean_basis(int n) {
  RMat a = RMat::Zero(n, n);
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) a(i, 0) = inv;
  for (int j = 1; j < n; ++j) a(j, j) = 1.0;
  Eigen::HouseholderQR<RMat> qr(a);
  RMat q = qr.householderQ() * RMat::Identity(n, n);
  return q.rightCols(n - 1);
}

namespace {

RVec grid_potential(const Model& model, const CollocGrid& grid) {
  RVec w(grid.n);
  for (int j = 0; j < grid.n; ++j) w(j) = model.potential(grid.x(j))[0];
  return w;
}

RVec grid_profile(const Model& model, const CollocGrid& grid) {
  RVec q(grid.n);
  for (int j = 0; j < grid.n; ++j) q(j) = model.profile(grid.x(j))(0);
  return q;
}

RMat restrict_op(const RMat& big, const RMat& v) {
  return v.transpose() * big * v;
}

}  // namespace

CollocOps build_operators(const Model& model, double k, int n,
                          double half_length) {
  CollocOps ops{.model = model,
                .grid = make_grid(n, half_length),
                .k = k,
                .d = model.components()};
  const CollocGrid& g = ops.grid;
  const double k2 = k * k;
  const double c = model.speed();

  switch (model.id()) {
    case ModelId::gkp1:
    case ModelId::zk:
    case ModelId::kpbbm: {
      ops.mean_excluded = true;
      ops.basis = zero_mean_basis(n);
      const RVec w = grid_potential(model, g);
      RMat lmat = multiplier_matrix(
          g, [&](double xi) { return model.l0_symbol(xi)(0, 0); });
      lmat -= RMat(w.asDiagonal());
      const RMat smat = multiplier_matrix(
          g, [&](double xi) { return model.s_symbol(xi, k)(0, 0); });
      const RMat dx =
          multiplier_matrix(g, [](double xi) { return cplx(0.0, xi); });
      RMat jls_big, mk_big;
      if (model.id() == ModelId::kpbbm) {
        const RMat jm = multiplier_matrix(
            g, [](double xi) { return cplx(0.0, xi / (1.0 + xi * xi)); });
        const RMat pm = multiplier_matrix(
            g, [](double xi) { return cplx(1.0 / (1.0 + xi * xi), 0.0); });
        jls_big = jm * (lmat + smat);
        mk_big = pm * (dx * lmat * dx - k2 * RMat::Identity(n, n)) * pm;
      } else {
        jls_big = dx * (lmat + smat);
        if (model.id() == ModelId::gkp1) {
          mk_big = dx * lmat * dx;
        } else {
          const RMat dxx = multiplier_matrix(
              g, [](double xi) { return cplx(-xi * xi, 0.0); });
          mk_big = dx * lmat * dx + k2 * dxx;
        }
      }
      ops.jls = restrict_op(jls_big, ops.basis);
      ops.mk = restrict_op(mk_big, ops.basis);
      if (model.id() == ModelId::gkp1) {
        ops.mk -= k2 * RMat::Identity(n - 1, n - 1);
      }
      break;
    }
    case ModelId::nls: {
      ops.mean_excluded = false;
      ops.basis = RMat::Identity(n, n);
      const RVec q = grid_profile(model, g);
      const RMat base = multiplier_matrix(
          g, [&](double xi) { return cplx(xi * xi + 1.0 + k2, 0.0); });
      RMat l1 = base, l2 = base;
      for (int j = 0; j < n; ++j) {
        l1(j, j) -= 3.0 * q(j) * q(j);
        l2(j, j) -= q(j) * q(j);
      }
      ops.l1k = l1;
      ops.l2k = l2;
      ops.jls = RMat::Zero(2 * n, 2 * n);
      ops.jls.topRightCorner(n, n) = l2;
      ops.jls.bottomLeftCorner(n, n) = -l1;
      ops.mk = RMat::Zero(2 * n, 2 * n);
      ops.mk.topLeftCorner(n, n) = -l2;
      ops.mk.bottomRightCorner(n, n) = -l1;
      break;
    }
    case ModelId::boussinesq: {
      ops.mean_excluded = true;
      ops.basis = zero_mean_basis(n);
      const RVec q = grid_profile(model, g);
      auto bsym = [&](double xi) {
        return 1.0 + xi * xi + k2 / (xi * xi);
      };
      const RMat dx =
          multiplier_matrix(g, [](double xi) { return cplx(0.0, xi); });
      const RMat dxx = multiplier_matrix(
          g, [](double xi) { return cplx(-xi * xi, 0.0); });
      const RMat bh = multiplier_matrix(g, [&](double xi) {
        return (xi == 0.0) ? cplx(0.0, 0.0) : cplx(std::sqrt(bsym(xi)), 0.0);
      });
      const RMat bih = multiplier_matrix(g, [&](double xi) {
        return (xi == 0.0) ? cplx(0.0, 0.0)
                           : cplx(1.0 / std::sqrt(bsym(xi)), 0.0);
      });
      const RMat gg = multiplier_matrix(g, [&](double xi) {
        return (xi == 0.0) ? cplx(0.0, 0.0)
                           : cplx(0.0, xi / std::sqrt(bsym(xi)));
      });
      const RMat dq = RMat(q.asDiagonal());
      const int nb = n - 1;
      ops.jls = RMat::Zero(2 * nb, 2 * nb);
      ops.mk = RMat::Zero(2 * nb, 2 * nb);
      ops.jls.topLeftCorner(nb, nb) = restrict_op(c * dx, ops.basis);
      ops.jls.topRightCorner(nb, nb) = restrict_op(dx * bh, ops.basis);
      ops.jls.bottomLeftCorner(nb, nb) =
          restrict_op(dx * bh - 2.0 * gg * dq, ops.basis);
      ops.jls.bottomRightCorner(nb, nb) = restrict_op(c * dx, ops.basis);
      ops.mk.topLeftCorner(nb, nb) = restrict_op(dxx, ops.basis);
      ops.mk.topRightCorner(nb, nb) = restrict_op(c * dxx * bih, ops.basis);
      ops.mk.bottomLeftCorner(nb, nb) = ops.mk.topRightCorner(nb, nb);
      ops.mk.bottomRightCorner(nb, nb) =
          restrict_op(dxx - 2.0 * gg * dq * gg, ops.basis);
      break;
    }
  }
  return ops;
}

namespace {

struct Candidate {
  cplx sigma;
  Vec vec;  // restricted stacked coordinates
};

double localization_fraction(const CollocOps& ops,
                             const std::vector<Vec>& lifted) {
  double inside = 0.0, total = 0.0;
  const double lim = 0.5 * ops.grid.half_length;
  for (const Vec& u : lifted) {
    for (int j = 0; j < ops.grid.n; ++j) {
      const double m = std::norm(u(j));
      total += m;
      if (std::abs(ops.grid.x(j)) <= lim) inside += m;
    }
  }
  return (total > 0.0) ? inside / total : 0.0;
}

std::vector<Vec> lift(const CollocOps& ops, const Vec& w) {
  const int nb = static_cast<int>(ops.basis.cols());
  std::vector<Vec> out;
  for (int comp = 0; comp < ops.d; ++comp) {
    Vec seg = w.segment(comp * nb, nb);
    Vec u = ops.basis.cast<cplx>() * seg;
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace

std::optional<CollocEig> unstable_eigenvalue(const CollocOps& ops) {
  std::vector<Candidate> cands;
  const int n = ops.grid.n;
  if (ops.model.id() == ModelId::nls) {
    const RMat quad = -(ops.l2k * ops.l1k);
    Eigen::EigenSolver<RMat> es(quad);
    for (int i = 0; i < quad.rows(); ++i) {
      const cplx sigma = std::sqrt(es.eigenvalues()(i));
      if (!(sigma.real() > 0.02)) continue;
      Vec u1 = es.eigenvectors().col(i);
      Vec u2 = -(ops.l1k.cast<cplx>() * u1) / sigma;
      Vec w(2 * n);
      w << u1, u2;
      cands.push_back({sigma, std::move(w)});
    }
  } else {
    Eigen::EigenSolver<RMat> es(ops.jls);
    for (int i = 0; i < ops.jls.rows(); ++i) {
      const cplx sigma = es.eigenvalues()(i);
      if (!(sigma.real() > 0.02)) continue;
      cands.push_back({sigma, es.eigenvectors().col(i)});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.sigma.real() > b.sigma.real();
                   });
  for (const Candidate& cand : cands) {
    const auto lifted = lift(ops, cand.vec);
    const double frac = localization_fraction(ops, lifted);
    if (frac < 0.99) continue;
    CollocEig out;
    out.sigma = cand.sigma;
    out.localization = frac;
    const Vec resid =
        ops.jls.cast<cplx>() * cand.vec - cand.sigma * cand.vec;
    out.residual = resid.norm() / cand.vec.norm();
    out.u = lifted;
    return out;
  }
  return std::nullopt;
}

double max_eig_mk(const CollocOps& ops) {
  const RMat sym = 0.5 * (ops.mk + ops.mk.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

std::pair<double, RVec> max_eigpair_mk(const CollocOps& ops) {
  const RMat sym = 0.5 * (ops.mk + ops.mk.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(sym);
  const Eigen::Index last = es.eigenvalues().size() - 1;
  return {es.eigenvalues()(last), es.eigenvectors().col(last)};
}

RVec spectrum_l(const Model& model, int component, int n_lowest, int n,
                double half_length) {
  const CollocGrid g = make_grid(n, half_length);
  RMat op;
  if (model.id() == ModelId::boussinesq) {
    const RVec q = grid_profile(model, g);
    const RMat b0 = multiplier_matrix(
        g, [](double xi) { return cplx(1.0 + xi * xi, 0.0); });
    const RMat b0h = multiplier_matrix(
        g, [](double xi) { return cplx(std::sqrt(1.0 + xi * xi), 0.0); });
    op = RMat::Zero(2 * n, 2 * n);
    op.topLeftCorner(n, n) = b0 - 2.0 * RMat(q.asDiagonal());
    op.topRightCorner(n, n) = model.speed() * b0h;
    op.bottomLeftCorner(n, n) = op.topRightCorner(n, n);
    op.bottomRightCorner(n, n) = b0;
  } else {
    op = multiplier_matrix(
        g, [&](double xi) { return model.l0_symbol(xi)(0, 0); });
    const int comp = (model.id() == ModelId::nls) ? component : 0;
    for (int j = 0; j < n; ++j) {
      op(j, j) += model.potential_matrix(g.x(j))(comp, comp);
    }
  }
  const RMat sym = 0.5 * (op + op.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(n_lowest);
}

namespace {

RVec spectral_second_derivative(const CollocGrid& g, const RVec& f) {
  std::vector<cplx> buf(static_cast<size_t>(g.n));
  for (int j = 0; j < g.n; ++j) buf[static_cast<size_t>(j)] = f(j);
  fft::forward(buf.data(), g.n);
  for (int j = 0; j < g.n; ++j) {
    const double xi = g.xi[static_cast<size_t>(j)];
    buf[static_cast<size_t>(j)] *= -xi * xi;
  }
  fft::inverse(buf.data(), g.n);
  RVec out(g.n);
  for (int j = 0; j < g.n; ++j) out(j) = buf[static_cast<size_t>(j)].real();
  return out;
}

}  // namespace

double profile_residual(const Model& model, int n, double half_length) {
  const CollocGrid g = make_grid(n, half_length);
  const RVec q = grid_profile(model, g);
  const RVec qxx = spectral_second_derivative(g, q);
  RVec r(n);
  const double c = model.speed();
  for (int j = 0; j < n; ++j) {
    const double qp = std::pow(q(j), model.power());
    switch (model.id()) {
      case ModelId::gkp1:
      case ModelId::zk:
      case ModelId::nls:
        r(j) = -qxx(j) + q(j) - qp;
        break;
      case ModelId::boussinesq:
        r(j) = -qxx(j) + (1.0 - c * c) * q(j) - q(j) * q(j);
        break;
      case ModelId::kpbbm:
        r(j) = -c * qxx(j) + (c - 1.0) * q(j) - qp;
        break;
    }
  }
  return r.cwiseAbs().maxCoeff();
}

double translational_residual(const Model& model, int n, double half_length) {
  const CollocGrid g = make_grid(n, half_length);
  if (model.id() == ModelId::boussinesq) {
    // L(0) applied to the derivative of the two-component profile.
    RVec q1p(n), q2p(n), q2(n);
    for (int j = 0; j < n; ++j) {
      q1p(j) = model.profile_derivative(g.x(j));
      q2(j) = model.profile(g.x(j))(1);
    }
    std::vector<cplx> buf(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) buf[static_cast<size_t>(j)] = q2(j);
    fft::forward(buf.data(), n);
    for (int j = 0; j < n; ++j) {
      buf[static_cast<size_t>(j)] *= cplx(0.0, g.xi[static_cast<size_t>(j)]);
    }
    fft::inverse(buf.data(), n);
    for (int j = 0; j < n; ++j) q2p(j) = buf[static_cast<size_t>(j)].real();
    const RMat b0 = multiplier_matrix(
        g, [](double xi) { return cplx(1.0 + xi * xi, 0.0); });
    const RMat b0h = multiplier_matrix(
        g, [](double xi) { return cplx(std::sqrt(1.0 + xi * xi), 0.0); });
    const RVec q = grid_profile(model, g);
    const RVec r1 = b0 * q1p - 2.0 * q.cwiseProduct(q1p) +
                    model.speed() * (b0h * q2p);
    const RVec r2 = model.speed() * (b0h * q1p) + b0 * q2p;
    return std::max(r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff());
  }
  RVec qp(n);
  for (int j = 0; j < n; ++j) qp(j) = model.profile_derivative(g.x(j));
  RMat l = multiplier_matrix(
      g, [&](double xi) { return model.l0_symbol(xi)(0, 0); });
  const int comp = 0;
  for (int j = 0; j < n; ++j) {
    l(j, j) += model.potential_matrix(g.x(j))(comp, comp);
  }
  const RVec r = l * qp;
  return r.cwiseAbs().maxCoeff();
}

CriterionResult find_k0_criterion(const Model& model, double k_lo, double k_hi,
                                  int n, double half_length, double tol_k) {
  auto mu_max = [&](double k) {
    return max_eig_mk(build_operators(model, k, n, half_length));
  };
  double g_lo = mu_max(k_lo);
  if (g_lo <= 0.0) {
    throw parameter_error("criterion bracket: max eig M_k not positive at k_lo");
  }
  double g_hi = mu_max(k_hi);
  while (g_hi > 0.0 && k_hi < model.k_exclusion()) {
    k_hi = std::min(1.4 * k_hi, model.k_exclusion());
    g_hi = mu_max(k_hi);
  }
  if (g_hi > 0.0) {
    throw numerical_error("criterion bracket: no sign change up to the exclusion bound");
  }
  while (k_hi - k_lo > tol_k) {
    const double mid = 0.5 * (k_lo + k_hi);
    if (mu_max(mid) > 0.0) {
      k_lo = mid;
    } else {
      k_hi = mid;
    }
  }
  CriterionResult out;
  out.k0 = 0.5 * (k_lo + k_hi);
  const double h = 1e-3;
  const auto pair0 = max_eigpair_mk(build_operators(model, out.k0, n, half_length));
  const RMat mk_p = build_operators(model, out.k0 + h, n, half_length).mk;
  const RMat mk_m = build_operators(model, out.k0 - h, n, half_length).mk;
  const RVec phi = pair0.second / pair0.second.norm();
  out.derivative_pairing =
      phi.dot(((mk_p - mk_m) / (2.0 * h)) * phi);
  if (model.id() == ModelId::zk) {
    out.valid = false;
    out.note =
        "criterion Fredholm hypothesis fails: the transverse shift law does "
        "not hold for this symplectic form; mean mode excluded";
  } else {
    out.valid = true;
    out.note = (model.id() == ModelId::nls) ? "" : "mean mode excluded";
  }
  return out;
}

SpectralApplier make_applier(const Model& model, double k, int n,
                             double half_length) {
  SpectralApplier ap{.model = model, .grid = make_grid(n, half_length), .k = k};
  if (model.id() == ModelId::nls) {
    ap.q2.resize(n);
    for (int j = 0; j < n; ++j) {
      const double q = model.profile(ap.grid.x(j))(0);
      ap.q2(j) = q * q;
    }
  } else {
    ap.w = grid_potential(model, ap.grid);
  }
  return ap;
}

namespace {

Vec apply_symbol(const CollocGrid& g, const Vec& u,
                 const std::function<cplx(double)>& sym) {
  std::vector<cplx> buf(u.data(), u.data() + u.size());
  fft::forward(buf.data(), g.n);
  for (int j = 0; j < g.n; ++j) {
    buf[static_cast<size_t>(j)] *= sym(g.xi[static_cast<size_t>(j)]);
  }
  fft::inverse(buf.data(), g.n);
  return Eigen::Map<Vec>(buf.data(), g.n);
}

double bou_b(double xi, double k) {
  return 1.0 + xi * xi + k * k / (xi * xi);
}

}  // namespace

std::vector<Vec> SpectralApplier::apply_ls(const std::vector<Vec>& u) const {
  const double k2 = k * k;
  std::vector<Vec> out;
  switch (model.id()) {
    case ModelId::gkp1:
    case ModelId::kpbbm: {
      Vec v = apply_symbol(grid, u[0], [&](double xi) {
        const double l0 = model.l0_symbol(xi)(0, 0).real();
        return cplx(l0 + ((xi == 0.0) ? 0.0 : k2 / (xi * xi)), 0.0);
      });
      for (int j = 0; j < grid.n; ++j) v(j) -= w(j) * u[0](j);
      out.push_back(std::move(v));
      break;
    }
    case ModelId::zk: {
      Vec v = apply_symbol(grid, u[0], [&](double xi) {
        return cplx(xi * xi + 1.0 + k2, 0.0);
      });
      for (int j = 0; j < grid.n; ++j) v(j) -= w(j) * u[0](j);
      out.push_back(std::move(v));
      break;
    }
    case ModelId::nls: {
      for (int comp = 0; comp < 2; ++comp) {
        Vec v = apply_symbol(grid, u[static_cast<size_t>(comp)], [&](double xi) {
          return cplx(xi * xi + 1.0 + k2, 0.0);
        });
        const double fac = (comp == 0) ? 3.0 : 1.0;
        for (int j = 0; j < grid.n; ++j) {
          v(j) -= fac * q2(j) * u[static_cast<size_t>(comp)](j);
        }
        out.push_back(std::move(v));
      }
      break;
    }
    case ModelId::boussinesq: {
      const double c = model.speed();
      auto bfull = [&](double xi) {
        return (xi == 0.0) ? cplx(0.0, 0.0) : cplx(bou_b(xi, k), 0.0);
      };
      auto bhalf = [&](double xi) {
        return (xi == 0.0) ? cplx(0.0, 0.0)
                           : cplx(std::sqrt(bou_b(xi, k)), 0.0);
      };
      Vec b_u0 = apply_symbol(grid, u[0], bfull);
      Vec b_u1 = apply_symbol(grid, u[1], bfull);
      Vec bh_u0 = apply_symbol(grid, u[0], bhalf);
      Vec bh_u1 = apply_symbol(grid, u[1], bhalf);
      Vec v0 = b_u0 + c * bh_u1;
      for (int j = 0; j < grid.n; ++j) v0(j) -= w(j) * u[0](j);
      Vec v1 = c * bh_u0 + b_u1;
      out.push_back(std::move(v0));
      out.push_back(std::move(v1));
      break;
    }
  }
  return out;
}

std::vector<Vec> SpectralApplier::apply_s(const std::vector<Vec>& u) const {
  const double k2 = k * k;
  std::vector<Vec> out;
  switch (model.id()) {
    case ModelId::gkp1:
    case ModelId::kpbbm:
      out.push_back(apply_symbol(grid, u[0], [&](double xi) {
        return cplx((xi == 0.0) ? 0.0 : k2 / (xi * xi), 0.0);
      }));
      break;
    case ModelId::zk:
      out.push_back(k2 * u[0]);
      break;
    case ModelId::nls:
      out.push_back(k2 * u[0]);
      out.push_back(k2 * u[1]);
      break;
    case ModelId::boussinesq: {
      const double c = model.speed();
      auto sdiag = [&](double xi) {
        if (xi == 0.0) return cplx(0.0, 0.0);
        return cplx(bou_b(xi, k) - bou_b(xi, 0.0), 0.0);
      };
      auto soff = [&](double xi) {
        if (xi == 0.0) return cplx(0.0, 0.0);
        return cplx(c * (std::sqrt(bou_b(xi, k)) - std::sqrt(bou_b(xi, 0.0))),
                    0.0);
      };
      Vec v0 = apply_symbol(grid, u[0], sdiag) + apply_symbol(grid, u[1], soff);
      Vec v1 = apply_symbol(grid, u[0], soff) + apply_symbol(grid, u[1], sdiag);
      out.push_back(std::move(v0));
      out.push_back(std::move(v1));
      break;
    }
  }
  return out;
}

std::vector<Vec> SpectralApplier::apply_j(const std::vector<Vec>& u) const {
  std::vector<Vec> out;
  switch (model.id()) {
    case ModelId::gkp1:
    case ModelId::zk:
      out.push_back(apply_symbol(
          grid, u[0], [](double xi) { return cplx(0.0, xi); }));
      break;
    case ModelId::kpbbm:
      out.push_back(apply_symbol(grid, u[0], [](double xi) {
        return cplx(0.0, xi / (1.0 + xi * xi));
      }));
      break;
    case ModelId::nls:
      out.push_back(u[1]);
      out.push_back(-u[0]);
      break;
    case ModelId::boussinesq: {
      auto gsym = [&](double xi) {
        return (xi == 0.0) ? cplx(0.0, 0.0)
                           : cplx(0.0, xi / std::sqrt(bou_b(xi, k)));
      };
      out.push_back(apply_symbol(grid, u[1], gsym));
      out.push_back(apply_symbol(grid, u[0], gsym));
      break;
    }
  }
  return out;
}

std::vector<Vec> SpectralApplier::apply_jls(const std::vector<Vec>& u) const {
  return apply_j(apply_ls(u));
}

Vec SpectralApplier::derivative(const Vec& u) const {
  return apply_symbol(grid, u, [](double xi) { return cplx(0.0, xi); });
}

cplx SpectralApplier::inner(const std::vector<Vec>& a,
                            const std::vector<Vec>& b) const {
  cplx acc(0.0, 0.0);
  for (size_t comp = 0; comp < a.size(); ++comp) {
    acc += a[comp].dot(b[comp]);
  }
  return acc * grid.h;
}

double SpectralApplier::h1_norm_sq(const std::vector<Vec>& u) const {
  double acc = 0.0;
  for (const Vec& comp : u) {
    acc += comp.squaredNorm() + derivative(comp).squaredNorm();
  }
  return acc * grid.h;
}

}  // namespace solstab
