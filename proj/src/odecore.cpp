#include "solstab/odecore.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace solstab {

std::vector<cplx> poly_roots(const std::vector<cplx>& coeffs) {
  if (coeffs.size() < 2) throw parameter_error("polynomial must have degree >= 1");
  const int deg = static_cast<int>(coeffs.size()) - 1;
  const cplx lead = coeffs[0];
  if (std::abs(lead) < 1e-300) throw parameter_error("vanishing leading coefficient");
  Mat comp = Mat::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) {
    comp(0, i) = -coeffs[static_cast<size_t>(i + 1)] / lead;
  }
  Eigen::ComplexEigenSolver<Mat> es(comp, false);
  std::vector<cplx> roots(static_cast<size_t>(deg));
  for (int i = 0; i < deg; ++i) roots[static_cast<size_t>(i)] = es.eigenvalues()(i);
  for (auto& r : roots) {
    for (int it = 0; it < 2; ++it) {
      cplx p = coeffs[0], dp = 0.0;
      for (size_t j = 1; j < coeffs.size(); ++j) {
        dp = dp * r + p;
        p = p * r + coeffs[j];
      }
      if (std::abs(dp) > 1e-100) r -= p / dp;
    }
  }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

SplittingInfo spatial_eigenvalues(const Model& model, cplx sigma, double k,
                                  double tol_split) {
  const auto roots = poly_roots(model.char_poly(sigma, k));
  SplittingInfo info;
  std::vector<cplx> stable, unstable;
  double gap = 1e300;
  for (const cplx& r : roots) {
    gap = std::min(gap, std::abs(r.real()));
    if (r.real() < 0.0) {
      stable.push_back(r);
    } else {
      unstable.push_back(r);
    }
  }
  info.n_stable = static_cast<int>(stable.size());
  info.n_unstable = static_cast<int>(unstable.size());
  info.spectral_gap = gap;
  info.degenerate = gap < tol_split;
  info.roots = std::move(stable);
  info.roots.insert(info.roots.end(), unstable.begin(), unstable.end());
  return info;
}

Mat dunford_projector(const Mat& a, const std::vector<cplx>& group,
                      const std::vector<cplx>& rest, int n_nodes) {
  if (group.empty()) throw parameter_error("empty root group");
  const int n = static_cast<int>(a.rows());
  cplx center(0.0, 0.0);
  for (const cplx& g : group) center += g;
  center /= static_cast<double>(group.size());
  double r_in = 0.0;
  for (const cplx& g : group) r_in = std::max(r_in, std::abs(g - center));
  double r_out = r_in + 1.0;
  if (!rest.empty()) {
    r_out = 1e300;
    for (const cplx& g : rest) r_out = std::min(r_out, std::abs(g - center));
  }
  if (r_out <= r_in * (1.0 + 1e-9) + 1e-12) {
    throw numerical_error("resolvent contour cannot separate the root groups");
  }
  const double radius = 0.5 * (r_in + r_out);
  Mat p = Mat::Zero(n, n);
  const Mat eye = Mat::Identity(n, n);
  for (int j = 0; j < n_nodes; ++j) {
    const double theta = 2.0 * pi * j / n_nodes;
    const cplx w = std::polar(radius, theta);
    const Mat res = (((center + w) * eye) - a).partialPivLu().solve(eye);
    p += w * res;
  }
  p /= static_cast<double>(n_nodes);
  return p;
}

namespace {

Mat phase_fixed_basis(const Mat& p, int m) {
  const int n = static_cast<int>(p.rows());
  const auto sets = wedge_index_sets(n, m);
  for (const auto& cols : sets) {
    Mat b(n, m);
    for (int j = 0; j < m; ++j) b.col(j) = p.col(cols[static_cast<size_t>(j)]);
    Eigen::JacobiSVD<Mat> svd(b);
    if (svd.singularValues()(m - 1) < 1e-6) continue;
    Eigen::HouseholderQR<Mat> qr(b);
    Mat q = qr.householderQ() * Mat::Identity(n, m);
    Mat r = qr.matrixQR().topRows(m);
    for (int j = 0; j < m; ++j) {
      const cplx d = r(j, j);
      if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return q;
  }
  throw numerical_error("projector is rank deficient on all pivot column sets");
}

}  // namespace

Subspaces asymptotic_subspaces(const Model& model, cplx sigma, double k) {
  Subspaces out;
  out.split = spatial_eigenvalues(model, sigma, k);
  const auto& roots = out.split.roots;
  std::vector<cplx> stable(roots.begin(), roots.begin() + out.split.n_stable);
  std::vector<cplx> unstable(roots.begin() + out.split.n_stable, roots.end());
  if (stable.empty() || unstable.empty()) {
    throw splitting_error("freestream spectrum does not split", roots.front());
  }
  const Mat a = model.ode_matrix_freestream(sigma, k);
  const Mat ps = dunford_projector(a, stable, unstable);
  const Mat pu = dunford_projector(a, unstable, stable);
  out.stable = phase_fixed_basis(ps, out.split.n_stable);
  out.unstable = phase_fixed_basis(pu, out.split.n_unstable);
  return out;
}

std::vector<std::vector<int>> wedge_index_sets(int n, int m) {
  std::vector<std::vector<int>> sets;
  if (m == 1) {
    for (int i = 0; i < n; ++i) sets.push_back({i});
    return sets;
  }
  if (m == 2) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) sets.push_back({i, j});
    }
    return sets;
  }
  throw parameter_error("wedge order must be 1 or 2");
}

void wedge_lift(const Mat& a, const std::vector<std::vector<int>>& sets,
                Mat& out) {
  const int nsets = static_cast<int>(sets.size());
  out.setZero(nsets, nsets);
  if (!sets.empty() && sets.front().size() == 1) {
    out = a;
    return;
  }
  for (int r = 0; r < nsets; ++r) {
    const int i = sets[static_cast<size_t>(r)][0];
    const int j = sets[static_cast<size_t>(r)][1];
    for (int c = 0; c < nsets; ++c) {
      const int k = sets[static_cast<size_t>(c)][0];
      const int l = sets[static_cast<size_t>(c)][1];
      cplx v(0.0, 0.0);
      if (j == l) v += a(i, k);
      if (j == k) v -= a(i, l);
      if (i == k) v += a(j, l);
      if (i == l) v -= a(j, k);
      out(r, c) = v;
    }
  }
}

int pairing_sign(const std::vector<int>& set, int n) {
  std::vector<int> perm(set);
  std::vector<bool> used(static_cast<size_t>(n), false);
  for (int s : set) used[static_cast<size_t>(s)] = true;
  for (int i = 0; i < n; ++i) {
    if (!used[static_cast<size_t>(i)]) perm.push_back(i);
  }
  int inversions = 0;
  for (size_t i = 0; i < perm.size(); ++i) {
    for (size_t j = i + 1; j < perm.size(); ++j) {
      if (perm[i] > perm[j]) ++inversions;
    }
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

Vec companion_wedge(const std::vector<cplx>& group, int n) {
  const int m = static_cast<int>(group.size());
  if (m == 1) {
    Vec w(n);
    cplx p = 1.0;
    for (int i = 0; i < n; ++i) {
      w(i) = p;
      p *= group[0];
    }
    return w;
  }
  if (m != 2) throw parameter_error("wedge order must be 1 or 2");
  const cplx e1 = group[0] + group[1];
  const cplx e2 = group[0] * group[1];
  // Complete homogeneous symmetric polynomials of the pair.
  std::vector<cplx> h(static_cast<size_t>(n), 0.0);
  h[0] = 1.0;
  if (n > 1) h[1] = e1;
  for (int t = 2; t < n; ++t) {
    h[static_cast<size_t>(t)] =
        e1 * h[static_cast<size_t>(t - 1)] - e2 * h[static_cast<size_t>(t - 2)];
  }
  const auto sets = wedge_index_sets(n, 2);
  Vec w(static_cast<Eigen::Index>(sets.size()));
  std::vector<cplx> e2pow(static_cast<size_t>(n), 1.0);
  for (int i = 1; i < n; ++i) e2pow[static_cast<size_t>(i)] = e2pow[static_cast<size_t>(i - 1)] * e2;
  for (size_t a = 0; a < sets.size(); ++a) {
    const int i = sets[a][0];
    const int j = sets[a][1];
    w(static_cast<Eigen::Index>(a)) =
        e2pow[static_cast<size_t>(i)] * h[static_cast<size_t>(j - i - 1)];
  }
  return w;
}

Vec companion_wedge_raw(cplx r1, cplx r2, int n) {
  Vec v1(n), v2(n);
  cplx p1 = 1.0, p2 = 1.0;
  for (int i = 0; i < n; ++i) {
    v1(i) = p1;
    v2(i) = p2;
    p1 *= r1;
    p2 *= r2;
  }
  const auto sets = wedge_index_sets(n, 2);
  Vec w(static_cast<Eigen::Index>(sets.size()));
  for (size_t a = 0; a < sets.size(); ++a) {
    const int i = sets[a][0];
    const int j = sets[a][1];
    w(static_cast<Eigen::Index>(a)) = v1(i) * v2(j) - v1(j) * v2(i);
  }
  return w;
}

OdeState integrate_ode(const RhsFn& rhs, const Vec& y0, double x0, double x1,
                       const OdeOptions& opt) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 35.0 / 384 - 5179.0 / 57600,
                      e3 = 500.0 / 1113 - 7571.0 / 16695,
                      e4 = 125.0 / 192 - 393.0 / 640,
                      e5 = -2187.0 / 6784 + 92097.0 / 339200,
                      e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  // The requested accuracy of the final wedge direction maps cubically to
  // the per-step controller tolerance; calibrated so halving `tol` improves
  // the measured direction error by at least 4x away from the floor.
  const double tol_step =
      std::clamp(opt.tol * opt.tol * opt.tol, 3e-14, 1e-6);

  OdeState st;
  st.y = y0;
  const double dir = (x1 >= x0) ? 1.0 : -1.0;
  double x = x0;
  double h = dir * std::min(opt.h_init, opt.h_max);
  const Eigen::Index n = y0.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), ynew(n), err(n);
  rhs(x, st.y, k1);
  while (dir * (x1 - x) > 1e-14) {
    if (st.steps++ > opt.max_steps) {
      throw numerical_error("step limit exceeded in compound integration");
    }
    if (dir * (x + h - x1) > 0.0) h = x1 - x;
    yt = st.y + h * a21 * k1;
    rhs(x + c2 * h, yt, k2);
    yt = st.y + h * (a31 * k1 + a32 * k2);
    rhs(x + c3 * h, yt, k3);
    yt = st.y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(x + c4 * h, yt, k4);
    yt = st.y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(x + c5 * h, yt, k5);
    yt = st.y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(x + h, yt, k6);
    ynew = st.y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(x + h, ynew, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double scale = tol_step * std::max(1.0, std::max(st.y.norm(), ynew.norm()));
    const double err_norm = err.norm() / scale;
    if (err_norm <= 1.0) {
      x += h;
      st.y.swap(ynew);
      k1.swap(k7);
      st.err_accum += err.norm();
      if (opt.renormalize) {
        const double mag = st.y.norm();
        if (mag > 1.62754791419e5 || mag < 6.14421235333e-6) {
          st.log_scale += std::log(mag);
          st.y /= mag;
          st.err_accum /= mag;
          k1 /= mag;
        }
      }
    }
    const double factor =
        std::clamp(0.9 * std::pow(std::max(err_norm, 1e-12), -0.2), 0.2, 5.0);
    h *= factor;
    if (std::abs(h) > opt.h_max) h = dir * opt.h_max;
    if (std::abs(h) < 1e-12) {
      throw numerical_error("step size underflow in compound integration");
    }
  }
  return st;
}

}  // namespace solstab
