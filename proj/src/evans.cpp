#include "solstab/evans.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace solstab {

namespace {

struct SideResult {
  Vec wedge;
  double log_scale = 0.0;
  double err = 0.0;
};

// Integrate the exterior-power system from x0 = side * X to 0 with the
// neutralizing tilt theta (sum of the target root group).
SideResult integrate_side(const Model& model, cplx sigma, double k,
                          bool full_form, int n, int m, const Vec& w0,
                          cplx theta, double x_inf, int side, double tol) {
  const auto sets = wedge_index_sets(n, m);
  Mat a(n, n), lifted(static_cast<Eigen::Index>(sets.size()),
                      static_cast<Eigen::Index>(sets.size()));
  const RhsFn rhs = [&](double x, const Vec& y, Vec& dy) {
    a = full_form ? model.ode_matrix_full(x, sigma, k)
                  : model.ode_matrix(x, sigma, k);
    wedge_lift(a, sets, lifted);
    dy.noalias() = lifted * y;
    dy -= theta * y;
  };
  SideResult out;
  const double nrm = w0.norm();
  OdeOptions opt;
  opt.tol = tol;
  OdeState st = integrate_ode(rhs, Vec(w0 / nrm), side * x_inf, 0.0, opt);
  out.wedge = st.y;
  out.log_scale = st.log_scale + std::log(nrm);
  out.err = st.err_accum;
  return out;
}

EvansValue assemble(const Model& model, cplx sigma, double k, double x_inf,
                    double tol, const std::string& branch, int n, int m_u,
                    const SideResult& minus, const SideResult& plus) {
  const auto sets_u = wedge_index_sets(n, m_u);
  const auto sets_s = wedge_index_sets(n, n - m_u);
  std::map<std::vector<int>, int> index_s;
  for (size_t i = 0; i < sets_s.size(); ++i) {
    index_s[sets_s[i]] = static_cast<int>(i);
  }
  cplx dsum(0.0, 0.0);
  for (size_t a = 0; a < sets_u.size(); ++a) {
    std::vector<int> comp;
    std::vector<bool> used(static_cast<size_t>(n), false);
    for (int s : sets_u[a]) used[static_cast<size_t>(s)] = true;
    for (int i = 0; i < n; ++i) {
      if (!used[static_cast<size_t>(i)]) comp.push_back(i);
    }
    const double sgn = pairing_sign(sets_u[a], n);
    dsum += sgn * minus.wedge(static_cast<Eigen::Index>(a)) *
            plus.wedge(index_s.at(comp));
  }
  EvansValue v;
  v.sigma = sigma;
  v.k = k;
  v.x_inf = x_inf;
  v.tol = tol;
  v.branch = branch;
  v.err_estimate = minus.err + plus.err + 1e-14;
  v.log_scale = minus.log_scale + plus.log_scale;
  if (dsum == cplx(0.0, 0.0)) {
    v.mantissa = 0.0;
    return v;
  }
  const double g = std::floor(std::log(std::abs(dsum)));
  v.mantissa = dsum * std::exp(-g);
  v.log_scale += g;
  return v;
}

cplx worst_root(const std::vector<cplx>& roots) {
  cplx w = roots.front();
  for (const cplx& r : roots) {
    if (std::abs(r.real()) < std::abs(w.real())) w = r;
  }
  return w;
}

EvansValue eval_standard_or_reduced(const Model& model, cplx sigma, double k,
                                    const EvansOptions& opt, double x_inf,
                                    bool reduced) {
  const int n = reduced ? 3 : (model.id() == ModelId::zk ? 3 : 4);
  const int ms_expected = (reduced || model.id() == ModelId::zk) ? 1 : 2;
  const int mu_expected = n - ms_expected;
  const auto poly =
      reduced ? model.char_poly(sigma, 0.0) : model.char_poly_full(sigma, k);
  const auto roots = poly_roots(poly);
  std::vector<cplx> stable, unstable;
  double gap = 1e300;
  for (const cplx& r : roots) {
    gap = std::min(gap, std::abs(r.real()));
    (r.real() < 0.0 ? stable : unstable).push_back(r);
  }
  if (gap < opt.tol_split) {
    throw splitting_error(
        "freestream spectrum degenerate at sigma = (" +
            std::to_string(sigma.real()) + ", " + std::to_string(sigma.imag()) +
            "), k = " + std::to_string(k),
        worst_root(roots));
  }
  if (static_cast<int>(stable.size()) != ms_expected) {
    throw splitting_error("freestream splitting violated: expected " +
                              std::to_string(ms_expected) + " stable roots, got " +
                              std::to_string(stable.size()),
                          worst_root(roots));
  }
  Vec wp0, wm0;
  if (model.id() == ModelId::nls) {
    // Block eigenvectors (1, tau, lambda, lambda tau) with
    // tau = (lambda^2 - k^2 - 1) / sigma; closed-form roots keep the
    // initialization analytic in sigma.
    const cplx a = k * k + 1.0;
    const cplx l1 = -std::sqrt(a + cplx(0.0, 1.0) * sigma);
    const cplx l2 = -std::sqrt(a - cplx(0.0, 1.0) * sigma);
    auto block_vec = [&](cplx lam) {
      Vec v(4);
      const cplx tau = (lam * lam - a) / sigma;
      v << 1.0, tau, lam, lam * tau;
      return v;
    };
    auto wedge2 = [&](const Vec& u, const Vec& v) {
      const auto sets = wedge_index_sets(4, 2);
      Vec w(static_cast<Eigen::Index>(sets.size()));
      for (size_t s = 0; s < sets.size(); ++s) {
        w(static_cast<Eigen::Index>(s)) =
            u(sets[s][0]) * v(sets[s][1]) - u(sets[s][1]) * v(sets[s][0]);
      }
      return w;
    };
    wp0 = wedge2(block_vec(l1), block_vec(l2));
    wm0 = wedge2(block_vec(-l1), block_vec(-l2));
    stable = {l1, l2};
    unstable = {-l1, -l2};
  } else {
    wp0 = companion_wedge(stable, n);
    wm0 = companion_wedge(unstable, n);
  }
  cplx theta_p(0.0, 0.0), theta_m(0.0, 0.0);
  for (const cplx& r : stable) theta_p += r;
  for (const cplx& r : unstable) theta_m += r;
  const std::string branch = reduced ? "reduced" : "standard";
  const SideResult plus =
      integrate_side(model, sigma, reduced ? 0.0 : k, !reduced, n,
                     ms_expected, wp0, theta_p, x_inf, +1, opt.tol);
  const SideResult minus =
      integrate_side(model, sigma, reduced ? 0.0 : k, !reduced, n,
                     mu_expected, wm0, theta_m, x_inf, -1, opt.tol);
  return assemble(model, sigma, k, x_inf, opt.tol, branch, n, mu_expected,
                  minus, plus);
}

EvansValue eval_tilde(const Model& model, cplx sigma, double k,
                      const EvansOptions& opt, double x_inf) {
  if (!model.has_reduced_branch()) {
    throw parameter_error("slow-split branch only applies to gkp1 and kpbbm");
  }
  const int n = 4;
  const auto roots = poly_roots(model.char_poly_full(sigma, k));
  // Slow root: the one tracking -k^2 / sigma.
  const cplx slow_target = -(k * k) / sigma;
  size_t slow_idx = 0;
  double best = 1e300;
  for (size_t i = 0; i < roots.size(); ++i) {
    const double d = std::abs(roots[i] - slow_target);
    if (d < best) {
      best = d;
      slow_idx = i;
    }
  }
  const cplx mu = roots[slow_idx];
  std::vector<cplx> stable, unstable;
  double gap = 1e300;
  for (size_t i = 0; i < roots.size(); ++i) {
    if (i == slow_idx) continue;
    gap = std::min(gap, std::abs(roots[i].real()));
    (roots[i].real() < 0.0 ? stable : unstable).push_back(roots[i]);
  }
  if (stable.size() != 1 || unstable.size() != 2 || gap < opt.tol_split) {
    throw splitting_error("slow-split branch: fast roots fail to split 1/2",
                          worst_root(roots));
  }
  const cplx lam_fast = stable[0];
  // Slow root kept explicitly: no in-group Vandermonde normalization.
  const Vec wp0 = companion_wedge_raw(mu, lam_fast, n);
  const Vec wm0 = companion_wedge(unstable, n);
  const cplx theta_p = mu + lam_fast;
  const cplx theta_m = unstable[0] + unstable[1];
  const SideResult plus = integrate_side(model, sigma, k, true, n, 2, wp0,
                                         theta_p, x_inf, +1, opt.tol);
  const SideResult minus = integrate_side(model, sigma, k, true, n, 2, wm0,
                                          theta_m, x_inf, -1, opt.tol);
  return assemble(model, sigma, k, x_inf, opt.tol, "tilde", n, 2, minus, plus);
}

}  // namespace

cplx EvansValue::ratio(const EvansValue& a, const EvansValue& b) {
  return (a.mantissa / b.mantissa) * std::exp(a.log_scale - b.log_scale);
}

EvansValue evans_eval(const Model& model, cplx sigma, double k,
                      const EvansOptions& opt) {
  if (!(sigma.real() > 0.0)) {
    throw parameter_error("evans evaluation requires Re sigma > 0");
  }
  const double x_inf =
      (opt.x_inf > 0.0) ? opt.x_inf : std::max(20.0, 12.0 / model.decay_rate());
  std::string branch = opt.branch;
  if (branch == "auto") {
    if (model.has_reduced_branch() && k == 0.0) {
      branch = "reduced";
    } else if (model.has_reduced_branch() &&
               std::abs(k * k / sigma) < 1e-6) {
      branch = "tilde";
    } else {
      branch = "standard";
    }
  }
  if (branch == "reduced") {
    if (!model.has_reduced_branch()) {
      throw parameter_error("reduced branch only applies to gkp1 and kpbbm");
    }
    if (k != 0.0) {
      throw parameter_error("reduced branch requires k = 0");
    }
    return eval_standard_or_reduced(model, sigma, k, opt, x_inf, true);
  }
  if (branch == "tilde") return eval_tilde(model, sigma, k, opt, x_inf);
  if (branch != "standard") {
    throw parameter_error("unknown evans branch '" + branch + "'");
  }
  return eval_standard_or_reduced(model, sigma, k, opt, x_inf, false);
}

double analyticity_check(const Model& model, cplx center, double radius,
                         double k, int n_nodes, const EvansOptions& opt) {
  std::vector<cplx> mant(static_cast<size_t>(n_nodes));
  std::vector<double> ls(static_cast<size_t>(n_nodes));
  double ls_max = -1e300;
  for (int j = 0; j < n_nodes; ++j) {
    const double theta = 2.0 * pi * j / n_nodes;
    const cplx sigma = center + std::polar(radius, theta);
    const EvansValue v = evans_eval(model, sigma, k, opt);
    mant[static_cast<size_t>(j)] = v.mantissa;
    ls[static_cast<size_t>(j)] = v.log_scale;
    ls_max = std::max(ls_max, v.log_abs());
  }
  cplx acc(0.0, 0.0);
  double vmax = 0.0;
  for (int j = 0; j < n_nodes; ++j) {
    const double theta = 2.0 * pi * j / n_nodes;
    const cplx val = mant[static_cast<size_t>(j)] *
                     std::exp(ls[static_cast<size_t>(j)] - ls_max);
    acc += val * std::polar(1.0, theta);
    vmax = std::max(vmax, std::abs(val));
  }
  return std::abs(acc) / (n_nodes * vmax);
}

ContinuationRatio continuation_ratio(const Model& model,
                                     const std::vector<cplx>& sigmas,
                                     const std::vector<double>& ks,
                                     const EvansOptions& opt) {
  if (!model.has_reduced_branch()) {
    throw parameter_error("continuation ratio only applies to gkp1 and kpbbm");
  }
  if (ks.size() < 2) {
    throw parameter_error("continuation ratio needs at least two wavenumbers");
  }
  ContinuationRatio out;
  out.sigmas = sigmas;
  out.ks = ks;
  EvansOptions ered = opt;
  ered.branch = "reduced";
  EvansOptions etil = opt;
  etil.branch = "tilde";
  for (const cplx& sigma : sigmas) {
    const EvansValue d1 = evans_eval(model, sigma, 0.0, ered);
    std::vector<cplx> row;
    for (double k : ks) {
      const EvansValue dt = evans_eval(model, sigma, k, etil);
      row.push_back(EvansValue::ratio(dt, d1) / sigma);
    }
    // Richardson in k^2 assuming the last entry halves the one before it.
    const cplx r_fine = row[row.size() - 1];
    const cplx r_coarse = row[row.size() - 2];
    out.r_extrapolated.push_back(r_fine + (r_fine - r_coarse) / 3.0);
    out.r.push_back(std::move(row));
  }
  cplx mean(0.0, 0.0);
  for (const cplx& r : out.r_extrapolated) mean += r;
  mean /= static_cast<double>(out.r_extrapolated.size());
  double spread = 0.0;
  for (const cplx& r : out.r_extrapolated) {
    spread = std::max(spread, std::abs(r - mean) / std::abs(mean));
  }
  out.spread = spread;
  return out;
}

}  // namespace solstab
