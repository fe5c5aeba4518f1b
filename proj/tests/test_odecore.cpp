#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "solstab/models.hpp"
#include "solstab/odecore.hpp"

using namespace solstab;

namespace {

double nearest_root_gap(const std::vector<cplx>& roots, cplx target) {
  double best = 1e300;
  for (const cplx& r : roots) best = std::min(best, std::abs(r - target));
  return best;
}

// w_I = v_i w_j - v_j w_i over the lexicographic pair sets.
Vec wedge_of(const Vec& v, const Vec& w,
             const std::vector<std::vector<int>>& sets) {
  Vec out(static_cast<Eigen::Index>(sets.size()));
  for (size_t a = 0; a < sets.size(); ++a) {
    out(static_cast<Eigen::Index>(a)) =
        v(sets[a][0]) * w(sets[a][1]) - v(sets[a][1]) * w(sets[a][0]);
  }
  return out;
}

// Final unit direction of the decaying gkp1 bundle transported to x = 0.
Vec transported_direction(const Model& m, double tol) {
  const cplx sigma(0.6, 0.2);
  const double k = 0.3;
  const SplittingInfo sp = spatial_eigenvalues(m, sigma, k);
  std::vector<cplx> unstable(sp.roots.begin() + sp.n_stable, sp.roots.end());
  const auto sets = wedge_index_sets(4, 2);
  const Vec w0 = companion_wedge(unstable, 4);
  cplx theta = 0.0;
  for (const cplx& r : unstable) theta += r;
  const RhsFn rhs = [&](double x, const Vec& y, Vec& dy) {
    Mat lifted(sets.size(), sets.size());
    wedge_lift(m.ode_matrix(x, sigma, k), sets, lifted);
    dy = lifted * y - theta * y;
  };
  OdeOptions opt;
  opt.tol = tol;
  OdeState st = integrate_ode(rhs, Vec(w0 / w0.norm()), -20.0, 0.0, opt);
  Vec dir = st.y / st.y.norm();
  // Fix the phase on the largest entry so directions are comparable.
  Eigen::Index imax = 0;
  dir.cwiseAbs().maxCoeff(&imax);
  return dir * (std::abs(dir(imax)) / dir(imax));
}

}  // namespace

TEST_CASE("poly_roots factors simple polynomials") {
  const std::vector<cplx> cubic = {1.0, -6.0, 11.0, -6.0};
  const std::vector<cplx> roots = poly_roots(cubic);
  REQUIRE(roots.size() == 3);
  for (const double r : {1.0, 2.0, 3.0}) {
    CHECK(nearest_root_gap(roots, r) < 1e-12);
  }
  const std::vector<cplx> quad = {1.0, 0.0, 1.0};
  CHECK(nearest_root_gap(poly_roots(quad), cplx(0.0, 1.0)) < 1e-13);
  CHECK(nearest_root_gap(poly_roots(quad), cplx(0.0, -1.0)) < 1e-13);
}

TEST_CASE("freestream roots match the frozen references") {
  // Frozen root values: tools/oracles/poly_roots.py
  {
    const Model m = Model::make("zk");
    const SplittingInfo sp = spatial_eigenvalues(m, 1.0, 0.0);
    REQUIRE(sp.roots.size() == 3);
    CHECK(nearest_root_gap(sp.roots, -1.324717957244745) < 1e-9);
    CHECK(nearest_root_gap(sp.roots,
                           cplx(0.662358978622373, 0.562279512062301)) < 1e-9);
    CHECK(nearest_root_gap(sp.roots,
                           cplx(0.662358978622373, -0.562279512062301)) <
          1e-9);
    CHECK(sp.n_stable == 1);
    CHECK(sp.n_unstable == 2);
  }
  {
    const Model m = Model::make("nls");
    const SplittingInfo sp = spatial_eigenvalues(m, 1.0, 0.0);
    REQUIRE(sp.roots.size() == 4);
    for (const double sr : {-1.0, 1.0}) {
      for (const double si : {-1.0, 1.0}) {
        CHECK(nearest_root_gap(sp.roots,
                               cplx(sr * 1.098684113467809,
                                    si * 0.455089860562227)) < 1e-9);
      }
    }
    CHECK(sp.n_stable == 2);
  }
  {
    const Model m = Model::make("kpbbm", {{"c", 2.0}, {"p", 2.0}});
    const SplittingInfo sp = spatial_eigenvalues(m, 1.0, 1.0);
    CHECK(nearest_root_gap(sp.roots,
                           cplx(-0.600052101625370, 0.323901283166925)) <
          1e-9);
    CHECK(nearest_root_gap(sp.roots,
                           cplx(0.850052101625370, 0.593918394146495)) < 1e-9);
  }
  {
    // Slow root of the gap-lemma branch: mu ~ -k^2/sigma.
    const Model m = Model::make("gkp1");
    const SplittingInfo sp = spatial_eigenvalues(m, 1.0, 0.01);
    CHECK(nearest_root_gap(sp.roots, -9.99900019996e-5) < 1e-12);
  }
}

TEST_CASE("splitting counts and signs hold off the essential spectrum") {
  const cplx sigma(0.9, 0.3);
  for (const std::string& name : Model::names()) {
    CAPTURE(name);
    const Model m = Model::make(name);
    const SplittingInfo sp = spatial_eigenvalues(m, sigma, 0.5);
    CHECK(sp.n_stable + sp.n_unstable == m.ode_dim(0.5));
    CHECK(sp.spectral_gap > 0.0);
    CHECK_FALSE(sp.degenerate);
    for (int i = 0; i < sp.n_stable; ++i) {
      CHECK(sp.roots[static_cast<size_t>(i)].real() < 0.0);
    }
    for (int i = sp.n_stable; i < sp.n_stable + sp.n_unstable; ++i) {
      CHECK(sp.roots[static_cast<size_t>(i)].real() > 0.0);
    }
  }
}

TEST_CASE("imaginary sigma on the freestream dispersion set is degenerate") {
  const Model m = Model::make("nls");
  const SplittingInfo sp = spatial_eigenvalues(m, cplx(0.0, 3.0), 0.0);
  CHECK(sp.degenerate);
}

TEST_CASE("dunford projector is idempotent and commutes") {
  const Model m = Model::make("boussinesq");
  const cplx sigma(0.8, 0.1);
  const double k = 0.6;
  const Mat a = m.ode_matrix_freestream(sigma, k);
  const SplittingInfo sp = spatial_eigenvalues(m, sigma, k);
  const std::vector<cplx> stable(sp.roots.begin(),
                                 sp.roots.begin() + sp.n_stable);
  const std::vector<cplx> unstable(sp.roots.begin() + sp.n_stable,
                                   sp.roots.end());
  const Mat p = dunford_projector(a, unstable, stable);
  CHECK((p * p - p).norm() <= 1e-10 * std::max(1.0, p.norm()));
  CHECK((p * a - a * p).norm() <= 1e-9 * std::max(1.0, a.norm()));
  CHECK(std::abs(p.trace() - cplx(sp.n_unstable, 0.0)) < 1e-9);
  const Mat q = dunford_projector(a, stable, unstable);
  CHECK((p + q - Mat::Identity(4, 4)).norm() < 1e-9);
}

TEST_CASE("asymptotic subspaces are orthonormal, invariant, and continuous") {
  const Model m = Model::make("gkp1");
  const double k = 0.4;
  Mat prev_stable, prev_unstable;
  double max_step = 0.0;
  for (int j = 0; j <= 64; ++j) {
    const cplx sigma(0.5 + j * (1.0 / 64.0), 0.2);
    const Subspaces sub = asymptotic_subspaces(m, sigma, k);
    const Mat& bs = sub.stable;
    CHECK((bs.adjoint() * bs - Mat::Identity(bs.cols(), bs.cols())).norm() <
          1e-10);
    const Mat a = m.ode_matrix_freestream(sigma, k);
    // Invariance: A maps the span into itself.
    const Mat img = a * bs;
    CHECK((img - bs * (bs.adjoint() * img)).norm() <= 1e-8 * img.norm());
    if (j > 0) {
      max_step = std::max(max_step, (bs - prev_stable).norm());
      max_step = std::max(max_step, (sub.unstable - prev_unstable).norm());
    }
    prev_stable = bs;
    prev_unstable = sub.unstable;
  }
  // Phase fixing keeps the bases continuous along the arc.
  CHECK(max_step < 0.1);
}

TEST_CASE("wedge index sets, pairing signs, and lifted action") {
  const auto sets = wedge_index_sets(4, 2);
  REQUIRE(sets.size() == 6);
  CHECK(sets[0] == std::vector<int>{0, 1});
  CHECK(sets[1] == std::vector<int>{0, 2});
  CHECK(sets[5] == std::vector<int>{2, 3});
  CHECK(pairing_sign({0, 1}, 4) == 1);
  CHECK(pairing_sign({0, 2}, 4) == -1);
  CHECK(pairing_sign({1, 3}, 4) == -1);
  CHECK(pairing_sign({2, 3}, 4) == 1);

  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat a(4, 4);
  Vec v(4), w(4);
  for (int i = 0; i < 4; ++i) {
    v(i) = cplx(u(gen), u(gen));
    w(i) = cplx(u(gen), u(gen));
    for (int j = 0; j < 4; ++j) a(i, j) = cplx(u(gen), u(gen));
  }
  Mat lifted(6, 6);
  wedge_lift(a, sets, lifted);
  // Generator property: d/dt (e^{tA} v ^ e^{tA} w) = lift(A)(v ^ w) at t = 0.
  const Vec lhs = lifted * wedge_of(v, w, sets);
  const Vec gen_rhs =
      wedge_of(Vec(a * v), w, sets) + wedge_of(v, Vec(a * w), sets);
  CHECK((lhs - gen_rhs).norm() <= 1e-12 * std::max(1.0, gen_rhs.norm()));
}

TEST_CASE("companion wedge is the Vandermonde-normalized pair wedge") {
  const cplx r1(0.4, 0.9), r2(-1.1, 0.3);
  const int n = 4;
  const Vec canon = companion_wedge({r1, r2}, n);
  const Vec swapped = companion_wedge({r2, r1}, n);
  CHECK((canon - swapped).norm() <= 1e-14 * canon.norm());
  const Vec raw = companion_wedge_raw(r1, r2, n);
  CHECK((raw - (r2 - r1) * canon).norm() <= 1e-13 * raw.norm());
  // Analytic at root collision: the canonical wedge stays finite and
  // matches the nearby-pair value.
  const Vec near = companion_wedge({r1, r1 + 1e-9}, n);
  const Vec coincident = companion_wedge({r1, r1}, n);
  CHECK((near - coincident).norm() < 1e-7 * coincident.norm());
  const Vec single = companion_wedge({r1}, n);
  CHECK(std::abs(single(0) - 1.0) < 1e-15);
  CHECK(std::abs(single(3) - r1 * r1 * r1) < 1e-14);
}

TEST_CASE("integrator reproduces a rotation and tracks exponential scale") {
  const RhsFn rot = [](double, const Vec& y, Vec& dy) {
    dy.resize(2);
    dy(0) = y(1);
    dy(1) = -y(0);
  };
  Vec y0(2);
  y0 << 1.0, 0.0;
  OdeOptions opt;
  opt.tol = 1e-10;
  const OdeState st = integrate_ode(rot, y0, 0.0, pi / 2.0, opt);
  CHECK(std::abs(st.y(0) * std::exp(st.log_scale)) < 1e-8);
  CHECK(std::abs(st.y(1) * std::exp(st.log_scale) + 1.0) < 1e-8);

  const RhsFn grow = [](double, const Vec& y, Vec& dy) {
    dy.resize(2);
    dy(0) = 3.0 * y(0);
    dy(1) = -y(1);
  };
  Vec z0(2);
  z0 << 1.0, 1.0;
  OdeOptions gopt;
  gopt.tol = 1e-9;
  const OdeState gs = integrate_ode(grow, z0, 0.0, 10.0, gopt);
  CHECK(gs.y.norm() <= std::exp(12.0) + 1.0);
  CHECK(std::log(std::abs(gs.y(0))) + gs.log_scale ==
        doctest::Approx(30.0).epsilon(1e-6));
}

TEST_CASE("step budget violations raise a numerical error") {
  const RhsFn rot = [](double, const Vec& y, Vec& dy) {
    dy.resize(2);
    dy(0) = y(1);
    dy(1) = -y(0);
  };
  Vec y0(2);
  y0 << 1.0, 0.0;
  OdeOptions opt;
  opt.max_steps = 3;
  CHECK_THROWS_AS(integrate_ode(rot, y0, 0.0, 100.0, opt), numerical_error);
}

TEST_CASE("halving the tolerance contracts the transport error") {
  const Model m = Model::make("gkp1");
  const Vec ref = transported_direction(m, 1e-8);
  const double err_coarse = (transported_direction(m, 2e-3) - ref).norm();
  const double err_fine = (transported_direction(m, 1e-3) - ref).norm();
  CAPTURE(err_coarse);
  CAPTURE(err_fine);
  CHECK(err_coarse < 1e-2);
  CHECK(err_fine * 4.0 <= err_coarse);
}
