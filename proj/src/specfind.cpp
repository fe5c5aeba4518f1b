#include "solstab/specfind.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>

#include "solstab/colloc.hpp"
#include "solstab/fft.hpp"

namespace solstab {

namespace {

struct PathNode {
  double t;
  EvansValue v;
};

// Total argument change of D along the straight segment between two sigma
// values, subdividing until each piece turns by less than pi/2.
double segment_arg_change(const Model& model, double k, cplx za, cplx zb,
                          const EvansValue& va, const EvansValue& vb,
                          const EvansOptions& opt, int* budget) {
  // Seed interior nodes so a full phase turn inside the segment cannot
  // alias to a small endpoint difference.
  constexpr int n_seed = 8;
  std::deque<PathNode> nodes;
  nodes.push_back({0.0, va});
  for (int j = 1; j < n_seed; ++j) {
    if (--(*budget) < 0) {
      throw numerical_error("winding evaluation budget exceeded");
    }
    const double t = static_cast<double>(j) / n_seed;
    nodes.push_back({t, evans_eval(model, za + t * (zb - za), k, opt)});
  }
  nodes.push_back({1.0, vb});
  double total = 0.0;
  size_t i = 0;
  while (i + 1 < nodes.size()) {
    const cplx ma = nodes[i].v.mantissa;
    const cplx mb = nodes[i + 1].v.mantissa;
    if (ma == cplx(0.0, 0.0) || mb == cplx(0.0, 0.0)) {
      throw numerical_error("evans function vanishes on the contour");
    }
    const double dphi = std::arg(mb / ma);
    if (std::abs(dphi) < 0.5 * pi ||
        nodes[i + 1].t - nodes[i].t < 1e-7) {
      if (nodes[i + 1].t - nodes[i].t < 1e-7 && std::abs(dphi) >= 0.5 * pi) {
        throw numerical_error("phase marching stalled near the contour");
      }
      total += dphi;
      ++i;
      continue;
    }
    if (--(*budget) < 0) {
      throw numerical_error("winding evaluation budget exceeded");
    }
    const double tm = 0.5 * (nodes[i].t + nodes[i + 1].t);
    const cplx zm = za + tm * (zb - za);
    nodes.insert(nodes.begin() + static_cast<long>(i) + 1,
                 {tm, evans_eval(model, zm, k, opt)});
  }
  return total;
}

RectSigma shrink(const RectSigma& r, double re_lo, double re_hi, double im_lo,
                 double im_hi) {
  RectSigma out = r;
  out.re_lo = re_lo;
  out.re_hi = re_hi;
  out.im_lo = im_lo;
  out.im_hi = im_hi;
  return out;
}

}  // namespace

int winding_number(const Model& model, double k, const RectSigma& rect,
                   const EvansOptions& opt) {
  if (!(rect.re_lo > 0.0) || rect.re_hi <= rect.re_lo ||
      rect.im_hi <= rect.im_lo) {
    throw parameter_error("winding rectangle must lie in Re sigma > 0");
  }
  const std::array<cplx, 4> corners = {
      cplx(rect.re_lo, rect.im_lo), cplx(rect.re_hi, rect.im_lo),
      cplx(rect.re_hi, rect.im_hi), cplx(rect.re_lo, rect.im_hi)};
  std::array<EvansValue, 4> vals;
  for (int i = 0; i < 4; ++i) vals[i] = evans_eval(model, corners[i], k, opt);
  int budget = 16000;
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    total += segment_arg_change(model, k, corners[i], corners[j], vals[i],
                                vals[j], opt, &budget);
  }
  const double w = total / (2.0 * pi);
  const long rounded = std::lround(w);
  if (std::abs(w - static_cast<double>(rounded)) > 0.15) {
    throw numerical_error("winding number failed to converge to an integer");
  }
  return static_cast<int>(rounded);
}

std::optional<UnstableRoot> find_unstable_sigma(const Model& model, double k,
                                                const RectSigma& rect,
                                                const EvansOptions& opt) {
  const int w = winding_number(model, k, rect, opt);
  if (w == 0) return std::nullopt;
  if (w >= 2) {
    throw numerical_error(
        "winding number " + std::to_string(w) +
        " in the search rectangle: multiple unstable roots, which breaks "
        "the expected simplicity; subdivide and inspect");
  }
  // Corner scale for the relative residual.
  double corner_log = -1e300;
  for (const cplx z : {cplx(rect.re_lo, rect.im_lo), cplx(rect.re_hi, rect.im_lo),
                       cplx(rect.re_hi, rect.im_hi), cplx(rect.re_lo, rect.im_hi)}) {
    corner_log = std::max(corner_log, evans_eval(model, z, k, opt).log_abs());
  }
  RectSigma box = rect;
  while (std::max(box.re_hi - box.re_lo, box.im_hi - box.im_lo) > 0.05) {
    const bool split_re = (box.re_hi - box.re_lo) >= (box.im_hi - box.im_lo);
    for (int attempt = 0;; ++attempt) {
      const double frac = 0.5 + 0.13 * attempt;
      RectSigma half = split_re
          ? shrink(box, box.re_lo, box.re_lo + frac * (box.re_hi - box.re_lo),
                   box.im_lo, box.im_hi)
          : shrink(box, box.re_lo, box.re_hi, box.im_lo,
                   box.im_lo + frac * (box.im_hi - box.im_lo));
      try {
        const int wh = winding_number(model, k, half, opt);
        if (wh == 1) {
          box = half;
        } else if (split_re) {
          box.re_lo = half.re_hi;
        } else {
          box.im_lo = half.im_hi;
        }
        break;
      } catch (const numerical_error&) {
        if (attempt >= 2) throw;
      }
    }
  }
  // Complex secant from the box center.
  cplx s0(0.5 * (box.re_lo + box.re_hi), 0.5 * (box.im_lo + box.im_hi));
  cplx s1 = s0 + cplx(1e-3 * (1.0 + std::abs(s0)), 1e-4);
  auto fval = [&](cplx s) {
    const EvansValue v = evans_eval(model, s, k, opt);
    return v.mantissa * std::exp(v.log_scale - corner_log);
  };
  cplx f0 = fval(s0), f1 = fval(s1);
  double step = 1e300;
  for (int it = 0; it < 80 && step > 1e-12 * std::max(1.0, std::abs(s1));
       ++it) {
    if (f1 == f0) break;
    cplx s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
    if (s2.real() <= 1e-6) s2 = cplx(1e-6, s2.imag());
    step = std::abs(s2 - s1);
    s0 = s1;
    f0 = f1;
    s1 = s2;
    f1 = fval(s1);
  }
  UnstableRoot root;
  root.sigma = s1;
  root.residual = std::abs(f1);
  root.verify_box = std::max(0.005, 1e3 * step);
  RectSigma verify = shrink({}, std::max(1e-4, s1.real() - root.verify_box),
                            s1.real() + root.verify_box,
                            s1.imag() - root.verify_box,
                            s1.imag() + root.verify_box);
  if (winding_number(model, k, verify, opt) != 1) {
    throw numerical_error("root verification box does not enclose a zero");
  }
  return root;
}

namespace {

RectSigma predictor_rect(cplx pred) {
  RectSigma r;
  r.re_lo = std::max(0.002, 0.5 * pred.real());
  r.re_hi = 1.6 * pred.real() + 0.02;
  const double imw = std::max(0.05, 0.8 * std::abs(pred.imag()));
  r.im_lo = pred.imag() - imw;
  r.im_hi = pred.imag() + imw;
  return r;
}

RectSigma edge_rect() {
  RectSigma r;
  r.re_lo = 0.002;
  r.re_hi = 0.1;
  r.im_lo = -0.05;
  r.im_hi = 0.05;
  return r;
}

}  // namespace

DispersionCurve trace_dispersion(const Model& model, double kmin, double kmax,
                                 int nk, const EvansOptions& opt) {
  if (!(kmin > 0.0) || kmax <= kmin || nk < 4) {
    throw parameter_error("dispersion scan needs 0 < kmin < kmax and nk >= 4");
  }
  DispersionCurve curve;
  EvansOptions scan_opt = opt;
  std::vector<double> ks(static_cast<size_t>(nk));
  for (int i = 0; i < nk; ++i) {
    ks[static_cast<size_t>(i)] = kmin + (kmax - kmin) * i / (nk - 1);
  }
  std::optional<cplx> pred;
  std::vector<char> found(static_cast<size_t>(nk), 0);
  auto solve_at = [&](double k, std::optional<cplx> hint)
      -> std::optional<UnstableRoot> {
    if (hint) {
      try {
        auto r = find_unstable_sigma(model, k, predictor_rect(*hint), scan_opt);
        if (r) return r;
      } catch (const numerical_error&) {
      }
    }
    try {
      auto r = find_unstable_sigma(model, k, RectSigma{}, scan_opt);
      if (r) return r;
    } catch (const numerical_error&) {
    }
    // Near the band edge the root sits below the default rectangle.
    try {
      return find_unstable_sigma(model, k, edge_rect(), scan_opt);
    } catch (const numerical_error&) {
      return std::nullopt;
    }
  };
  for (int i = 0; i < nk; ++i) {
    const double k = ks[static_cast<size_t>(i)];
    const auto r = solve_at(k, pred);
    if (r) {
      curve.samples.push_back({k, r->sigma, r->residual});
      found[static_cast<size_t>(i)] = 1;
      pred = r->sigma;
    } else {
      pred.reset();
    }
  }
  if (curve.samples.empty()) {
    curve.note = "no unstable band in the scanned range";
    return curve;
  }
  // Band edges: bisect each found/not-found transition to width 1e-4.
  auto in_band = [&](double k) {
    try {
      return winding_number(model, k, edge_rect(), scan_opt) >= 1 ||
             winding_number(model, k, RectSigma{}, scan_opt) >= 1;
    } catch (const numerical_error&) {
      return false;
    }
  };
  double lo = curve.samples.front().k;
  double hi = curve.samples.back().k;
  int first_found = 0;
  while (!found[static_cast<size_t>(first_found)]) ++first_found;
  int last_found = nk - 1;
  while (!found[static_cast<size_t>(last_found)]) --last_found;
  if (first_found > 0) {
    double a = ks[static_cast<size_t>(first_found - 1)];
    double b = ks[static_cast<size_t>(first_found)];
    while (b - a > 1e-4) {
      const double mid = 0.5 * (a + b);
      (in_band(mid) ? b : a) = mid;
    }
    lo = 0.5 * (a + b);
  } else {
    curve.note += "band clipped at kmin; ";
  }
  if (last_found < nk - 1) {
    double a = ks[static_cast<size_t>(last_found)];
    double b = ks[static_cast<size_t>(last_found + 1)];
    while (b - a > 1e-4) {
      const double mid = 0.5 * (a + b);
      (in_band(mid) ? a : b) = mid;
    }
    hi = 0.5 * (a + b);
  } else {
    curve.note += "band clipped at kmax; ";
  }
  curve.band_lo = lo;
  curve.band_hi = hi;
  // Maximizer: parabola vertex through the best sample and neighbors.
  size_t best = 0;
  for (size_t i = 0; i < curve.samples.size(); ++i) {
    if (curve.samples[i].sigma.real() > curve.samples[best].sigma.real()) {
      best = i;
    }
  }
  double k0 = curve.samples[best].k;
  double sigma0 = curve.samples[best].sigma.real();
  if (best > 0 && best + 1 < curve.samples.size()) {
    for (int refine = 0; refine < 2; ++refine) {
      const auto& sm = curve.samples[best - 1];
      const auto& s0 = curve.samples[best];
      const auto& sp = curve.samples[best + 1];
      const double d1 = (s0.sigma.real() - sm.sigma.real()) / (s0.k - sm.k);
      const double d2 = (sp.sigma.real() - s0.sigma.real()) / (sp.k - s0.k);
      const double curv = (d2 - d1) / (0.5 * (sp.k - sm.k));
      if (curv >= 0.0) break;
      const double kv =
          0.5 * (sm.k + s0.k) - d1 / curv;
      if (!(kv > lo && kv < hi)) break;
      const auto rv = solve_at(kv, cplx(sigma0, 0.0));
      if (!rv) break;
      if (rv->sigma.real() > sigma0) {
        k0 = kv;
        sigma0 = rv->sigma.real();
        // Insert so the refinement can use the new point.
        DispersionSample ns{kv, rv->sigma, rv->residual};
        auto pos = std::upper_bound(
            curve.samples.begin(), curve.samples.end(), kv,
            [](double a, const DispersionSample& b) { return a < b.k; });
        best = static_cast<size_t>(pos - curve.samples.begin());
        curve.samples.insert(pos, ns);
        if (best == 0 || best + 1 >= curve.samples.size()) break;
      } else {
        break;
      }
    }
  }
  curve.k0 = k0;
  curve.sigma0 = sigma0;
  // Flatness order from an even least-squares fit around k0.
  double win = 0.2;
  double wlo = std::max(lo, k0 - win);
  double whi = std::min(hi, k0 + win);
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : curve.samples) {
    if (s.k >= wlo && s.k <= whi) pts.push_back({s.k, s.sigma.real()});
  }
  const int want = 9;
  if (static_cast<int>(pts.size()) < want) {
    for (int i = 0; i < want; ++i) {
      const double k = wlo + (whi - wlo) * i / (want - 1);
      bool close = false;
      for (const auto& p : pts) {
        if (std::abs(p.first - k) < 0.02 * (whi - wlo)) close = true;
      }
      if (close) continue;
      const auto r = solve_at(k, cplx(sigma0, 0.0));
      if (r) pts.push_back({k, r->sigma.real()});
    }
  }
  if (pts.size() >= 5) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), 4);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(pts.size()));
    for (size_t i = 0; i < pts.size(); ++i) {
      const double dk = pts[i].first - k0;
      a(static_cast<Eigen::Index>(i), 0) = 1.0;
      a(static_cast<Eigen::Index>(i), 1) = dk * dk;
      a(static_cast<Eigen::Index>(i), 2) = dk * dk * dk * dk;
      a(static_cast<Eigen::Index>(i), 3) = dk * dk * dk * dk * dk * dk;
      rhs(static_cast<Eigen::Index>(i)) = pts[i].second;
    }
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(rhs);
    curve.m = 0;
    for (int j = 1; j <= 3; ++j) {
      if (std::abs(coef(j)) > 1e-4) {
        curve.m = 2 * j;
        break;
      }
    }
    if (curve.m == 0) curve.note += "flatness fit found no resolved even derivative; ";
  } else {
    curve.note += "too few samples for the flatness fit; ";
  }
  return curve;
}

namespace {

struct BundlePass {
  std::vector<Mat> q;       // checkpoint orthonormal frames
  std::vector<Mat> rtilde;  // m x m transition factors (log-free)
  std::vector<double> xs;   // checkpoint positions, from the far end to 0
};

// Integrate the matrix bundle Y' = A(x) Y between checkpoints with QR
// renormalization, recording the frames and transition factors.
BundlePass bundle_pass(const Model& model, cplx sigma, double k, const Mat& y0,
                       double x_start, double seg, double tol) {
  const int n = static_cast<int>(y0.rows());
  const int m = static_cast<int>(y0.cols());
  BundlePass pass;
  pass.xs.push_back(x_start);
  pass.q.push_back(y0);
  Mat a(n, n);
  const RhsFn rhs = [&](double x, const Vec& y, Vec& dy) {
    a = model.ode_matrix(x, sigma, k);
    const Eigen::Map<const Mat> ym(y.data(), n, m);
    Eigen::Map<Mat> dym(dy.data(), n, m);
    dym.noalias() = a * ym;
  };
  const int nseg = static_cast<int>(std::ceil(std::abs(x_start) / seg));
  Mat q = y0;
  for (int s = 0; s < nseg; ++s) {
    const double xa = x_start - (x_start / nseg) * s;
    const double xb = x_start - (x_start / nseg) * (s + 1);
    Vec flat(n * m);
    Eigen::Map<Mat>(flat.data(), n, m) = q;
    OdeOptions opt;
    opt.tol = tol;
    opt.renormalize = false;
    const OdeState st = integrate_ode(rhs, flat, xa, xb, opt);
    Mat yend = Eigen::Map<const Mat>(st.y.data(), n, m);
    Eigen::HouseholderQR<Mat> qr(yend);
    q = qr.householderQ() * Mat::Identity(n, m);
    Mat r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j) {
      const cplx d = r(j, j);
      if (std::abs(d) > 0.0) {
        q.col(j) *= d / std::abs(d);
        r.row(j) *= std::abs(d) / d;
      }
    }
    pass.q.push_back(q);
    pass.rtilde.push_back(r);
    pass.xs.push_back(xb);
  }
  return pass;
}

}  // namespace

ModeResult mode_reconstruct(const Model& model, cplx sigma, double k,
                            int n_grid, const EvansOptions& opt) {
  // The sampling box must also contain the slowest spatial tail of the
  // mode, or the periodized residual check sees the seam.
  const SplittingInfo sp = spatial_eigenvalues(model, sigma, k);
  const double x_auto = std::max(
      std::max(20.0, 12.0 / model.decay_rate()),
      std::min(140.0, 18.0 / std::max(sp.spectral_gap, 1e-8)));
  const double x_inf = (opt.x_inf > 0.0) ? opt.x_inf : x_auto;
  const Subspaces sub = asymptotic_subspaces(model, sigma, k);
  const int n = static_cast<int>(sub.stable.rows());
  const int ms = static_cast<int>(sub.stable.cols());
  const int mu = static_cast<int>(sub.unstable.cols());
  const double seg = 0.5;
  const double tol = std::min(opt.tol, 1e-4);
  BundlePass plus = bundle_pass(model, sigma, k, sub.stable, x_inf, seg, tol);
  BundlePass minus =
      bundle_pass(model, sigma, k, sub.unstable, -x_inf, seg, tol);
  // Glue: smallest singular vector of [Q+(0) | -Q-(0)].
  Mat glue(n, ms + mu);
  glue.leftCols(ms) = plus.q.back();
  glue.rightCols(mu) = -minus.q.back();
  Eigen::JacobiSVD<Mat> svd(glue, Eigen::ComputeFullV);
  const Eigen::Index last = svd.singularValues().size() - 1;
  ModeResult out;
  out.sigma = sigma;
  out.k = k;
  out.glue_sv = svd.singularValues()(last);
  const Vec coeff = svd.matrixV().col(last);
  const Vec a_plus = coeff.head(ms);
  const Vec a_minus = coeff.tail(mu);
  // Backward substitution through the transition factors gives the bundle
  // coordinates of the mode at every checkpoint.
  auto checkpoint_values = [](const BundlePass& pass, const Vec& a_end) {
    std::vector<Vec> b(pass.q.size());
    b.back() = a_end;
    for (int j = static_cast<int>(pass.rtilde.size()) - 1; j >= 0; --j) {
      b[static_cast<size_t>(j)] =
          pass.rtilde[static_cast<size_t>(j)]
              .triangularView<Eigen::Upper>()
              .solve(b[static_cast<size_t>(j + 1)]);
    }
    return b;
  };
  const auto b_plus = checkpoint_values(plus, a_plus);
  const auto b_minus = checkpoint_values(minus, a_minus);
  // Second pass: sample the mode on the uniform grid segment by segment.
  out.x.resize(n_grid);
  const double hg = 2.0 * x_inf / n_grid;
  for (int i = 0; i < n_grid; ++i) out.x(i) = -x_inf + hg * i;
  Mat state = Mat::Zero(n_grid, n);
  Mat a(n, n);
  const RhsFn rhs_vec = [&](double x, const Vec& y, Vec& dy) {
    a = model.ode_matrix(x, sigma, k);
    dy.noalias() = a * y;
  };
  auto sample_side = [&](const BundlePass& pass, const std::vector<Vec>& b,
                         bool plus_side) {
    for (size_t s = 0; s + 1 < pass.xs.size(); ++s) {
      const double xa = pass.xs[s];
      const double xb = pass.xs[s + 1];
      const bool last_seg = (s + 2 == pass.xs.size());
      Vec u = pass.q[s] * b[s];
      double xcur = xa;
      // Grid points inside (xb, xa] for the plus side, [xa, xb) for the
      // minus side; the final minus segment also claims x = 0.
      std::vector<int> idx;
      for (int i = 0; i < n_grid; ++i) {
        const double xg = out.x(i);
        const bool inside =
            plus_side
                ? (xg <= xa && xg > xb)
                : (xg >= xa && (xg < xb || (last_seg && xg <= xb + 1e-12)));
        if (inside) idx.push_back(i);
      }
      std::sort(idx.begin(), idx.end(), [&](int p, int q2) {
        return plus_side ? out.x(p) > out.x(q2) : out.x(p) < out.x(q2);
      });
      OdeOptions oo;
      oo.tol = tol;
      oo.renormalize = false;
      for (int i : idx) {
        const double xg = out.x(i);
        if (std::abs(xg - xcur) > 1e-13) {
          const OdeState st = integrate_ode(rhs_vec, u, xcur, xg, oo);
          u = st.y;
          xcur = xg;
        }
        state.row(i) = u.transpose();
      }
    }
  };
  sample_side(plus, b_plus, true);
  sample_side(minus, b_minus, false);
  // Physical components.
  const int d = model.components();
  std::vector<Vec> phys;
  if (model.id() == ModelId::nls) {
    phys.push_back(state.col(0));
    phys.push_back(state.col(1));
  } else {
    phys.push_back(state.col(0));
  }
  SpectralApplier ap = make_applier(model, k, n_grid, x_inf);
  if (model.id() == ModelId::boussinesq) {
    // Second component recovered through (sigma - c dx)^{-1}.
    const double c = model.speed();
    Vec u1 = phys[0];
    std::vector<cplx> buf(u1.data(), u1.data() + u1.size());
    fft::forward(buf.data(), n_grid);
    std::vector<cplx> qu(static_cast<size_t>(n_grid));
    for (int j = 0; j < n_grid; ++j) {
      qu[static_cast<size_t>(j)] =
          model.profile(out.x(j))(0) * u1(j);
    }
    fft::forward(qu.data(), n_grid);
    for (int j = 0; j < n_grid; ++j) {
      const double xi = ap.grid.xi[static_cast<size_t>(j)];
      cplx num(0.0, 0.0);
      if (xi != 0.0) {
        const double b = 1.0 + xi * xi + k * k / (xi * xi);
        const cplx dxbh = cplx(0.0, xi * std::sqrt(b));
        const cplx gsym = cplx(0.0, xi / std::sqrt(b));
        num = dxbh * buf[static_cast<size_t>(j)] -
              2.0 * gsym * qu[static_cast<size_t>(j)];
      }
      buf[static_cast<size_t>(j)] = num / (sigma - cplx(0.0, c * xi));
    }
    fft::inverse(buf.data(), n_grid);
    phys.push_back(Eigen::Map<Vec>(buf.data(), n_grid));
  }
  (void)d;
  // L2 normalization over all physical components.
  double nrm2 = 0.0;
  for (const Vec& comp : phys) nrm2 += comp.squaredNorm();
  nrm2 *= hg;
  const double nrm = std::sqrt(nrm2);
  for (Vec& comp : phys) comp /= nrm;
  out.u = phys;
  // Residual and conservation via the spectral applier.
  const auto jls = ap.apply_jls(out.u);
  double rnum = 0.0, rden = 0.0;
  for (size_t comp = 0; comp < out.u.size(); ++comp) {
    rnum += (jls[comp] - sigma * out.u[comp]).squaredNorm();
    rden += out.u[comp].squaredNorm();
  }
  out.residual = std::sqrt(rnum / rden);
  const auto ls_u = ap.apply_ls(out.u);
  const cplx q_ls = ap.inner(out.u, ls_u);
  out.conservation = std::abs(q_ls) / ap.h1_norm_sq(out.u);
  return out;
}

}  // namespace solstab
