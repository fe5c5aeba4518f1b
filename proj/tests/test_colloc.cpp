#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "doctest.h"
#include "solstab/colloc.hpp"
#include "solstab/models.hpp"

using namespace solstab;

namespace {

bool spectrum_contains(const RVec& eigs, double value, double tol) {
  for (int i = 0; i < eigs.size(); ++i) {
    if (std::abs(eigs(i) - value) < tol) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("grid layout and spectral differentiation") {
  const CollocGrid g = make_grid(32, pi);
  CHECK(g.n == 32);
  CHECK(g.h == doctest::Approx(2.0 * pi / 32.0));
  CHECK(g.x(0) == doctest::Approx(-pi));
  CHECK(g.x(31) == doctest::Approx(pi - g.h));
  const RMat d1 = multiplier_matrix(g, [](double xi) {
    return cplx(0.0, xi);
  });
  RVec f(32), fp(32);
  for (int i = 0; i < 32; ++i) {
    f(i) = std::sin(3.0 * g.x(i));
    fp(i) = 3.0 * std::cos(3.0 * g.x(i));
  }
  CHECK((d1 * f - fp).norm() < 1e-11 * fp.norm());
}

TEST_CASE("zero mean basis is orthonormal and annihilates constants") {
  const RMat b = zero_mean_basis(24);
  CHECK(b.rows() == 24);
  CHECK(b.cols() == 23);
  CHECK((b.transpose() * b - RMat::Identity(23, 23)).norm() < 1e-12);
  CHECK((RVec::Ones(24).transpose() * b).norm() < 1e-12);
}

TEST_CASE("operator restriction follows the symplectic form") {
  const CollocOps deriv_form = build_operators(Model::make("gkp1"), 0.3, 64, 30.0);
  CHECK(deriv_form.mean_excluded);
  CHECK(deriv_form.basis.cols() == 63);
  const CollocOps nls_form = build_operators(Model::make("nls"), 0.3, 64, 30.0);
  CHECK_FALSE(nls_form.mean_excluded);
  CHECK(nls_form.basis.cols() == 64);
  CHECK(nls_form.l1k.rows() == 64);
  CHECK((nls_form.mk - nls_form.mk.transpose()).norm() <
        1e-10 * nls_form.mk.norm());
}

TEST_CASE("scalar line operators reproduce the frozen low spectrum") {
  // Frozen eigenvalues: tools/oracles/colloc_reference.out
  const RVec nls_l1 = spectrum_l(Model::make("nls"), 0, 4);
  CHECK(spectrum_contains(nls_l1, -3.0, 1e-3));
  CHECK(spectrum_contains(nls_l1, 0.0, 1e-3));
  CHECK(spectrum_contains(nls_l1, 1.0, 2e-3));
  const RVec nls_l2 = spectrum_l(Model::make("nls"), 1, 3);
  CHECK(spectrum_contains(nls_l2, 0.0, 1e-3));
  CHECK(nls_l2(0) > -1e-3);
  const RVec gkp_l = spectrum_l(Model::make("gkp1"), 0, 3);
  CHECK(spectrum_contains(gkp_l, -1.25, 1e-3));
  CHECK(spectrum_contains(gkp_l, 0.0, 1e-3));
  CHECK(spectrum_contains(gkp_l, 0.75, 2e-3));
}

TEST_CASE("kernel pencil maxima at k = 0 match the frozen values") {
  // Frozen values: tools/oracles/colloc_reference.out
  struct Row {
    const char* name;
    double mu;
  };
  for (const Row& r : {Row{"nls", 3.0}, Row{"gkp1", 0.1875}, Row{"zk", 0.1875},
                       Row{"kpbbm", 0.068162398}, Row{"boussinesq", 0.023035917}}) {
    CAPTURE(r.name);
    const CollocOps ops = build_operators(Model::make(r.name), 0.0);
    CHECK(max_eig_mk(ops) == doctest::Approx(r.mu).epsilon(1e-5));
  }
}

TEST_CASE("nls kernel pencil obeys the exact quadratic shift") {
  // mu_max(k) = mu_max(0) - k^2; tools/oracles/colloc_reference.py
  for (const double k : {0.8, 1.2}) {
    const CollocOps ops = build_operators(Model::make("nls"), k);
    CHECK(max_eig_mk(ops) == doctest::Approx(3.0 - k * k).epsilon(1e-8));
  }
  const auto [mu, vec] = max_eigpair_mk(build_operators(Model::make("nls"), 0.8));
  CHECK(mu == doctest::Approx(3.0 - 0.64).epsilon(1e-8));
  CHECK(vec.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("criterion crossings match the frozen values") {
  // Frozen crossings: tools/oracles/colloc_reference.out
  struct Row {
    const char* name;
    double k0;
    bool pairing_law;
  };
  for (const Row& r : {Row{"nls", 1.732053, true},
                       Row{"gkp1", 0.433012702, true},
                       Row{"zk", 1.058926, false},
                       Row{"kpbbm", 0.306189, false},
                       Row{"boussinesq", 0.189440, false}}) {
    CAPTURE(r.name);
    const Model m = Model::make(r.name);
    const CriterionResult cr = find_k0_criterion(m, 0.02, m.kmax_hint());
    CHECK(cr.k0 == doctest::Approx(r.k0).epsilon(2e-3));
    CHECK(cr.valid == (std::string(r.name) != "zk"));
    if (r.pairing_law) {
      // Where the transverse symbol enters as +k^2 against the identity
      // the derivative pairs with -2 k0 at the crossing.
      CHECK(cr.derivative_pairing ==
            doctest::Approx(-2.0 * cr.k0).epsilon(5e-2));
    }
  }
  // The zk symplectic form breaks the pairing hypothesis even though the
  // crossing itself exists; the result carries the explanation.
  const CriterionResult zk_cr =
      find_k0_criterion(Model::make("zk"), 0.02, 1.3);
  CHECK_FALSE(zk_cr.valid);
  CHECK_FALSE(zk_cr.note.empty());
}

TEST_CASE("localized unstable eigenvalues inside the band") {
  // Frozen eigenvalues: tools/oracles/colloc_reference.out
  {
    const CollocOps ops = build_operators(Model::make("nls"), 1.0);
    const std::optional<CollocEig> e = unstable_eigenvalue(ops);
    REQUIRE(e.has_value());
    CHECK(e->sigma.real() == doctest::Approx(1.468809897).epsilon(1e-6));
    CHECK(std::abs(e->sigma.imag()) < 1e-8);
    CHECK(e->residual < 1e-8);
    CHECK(e->localization > 0.99);
    CHECK(static_cast<int>(e->u.size()) == 2);
  }
  {
    const CollocOps ops = build_operators(Model::make("gkp1"), 0.25);
    const std::optional<CollocEig> e = unstable_eigenvalue(ops);
    REQUIRE(e.has_value());
    CHECK(e->sigma.real() == doctest::Approx(0.187671802).epsilon(1e-6));
  }
}

TEST_CASE("no localized unstable eigenvalue outside the band") {
  CHECK_FALSE(unstable_eigenvalue(build_operators(Model::make("nls"), 1.8))
                  .has_value());
  CHECK_FALSE(unstable_eigenvalue(build_operators(Model::make("gkp1"), 0.5))
                  .has_value());
}

TEST_CASE("matrix-free applier agrees with spectral calculus") {
  const Model m = Model::make("gkp1");
  const SpectralApplier ap = make_applier(m, 0.3, 256, 30.0);
  RVec xs = ap.grid.x;
  Vec u(256), v(256);
  for (int i = 0; i < 256; ++i) {
    u(i) = std::exp(-0.25 * xs(i) * xs(i));
    v(i) = (xs(i) + 0.7) * std::exp(-0.2 * (xs(i) - 0.4) * (xs(i) - 0.4));
  }
  // d/dx of a resolved periodic function.
  Vec s(256);
  for (int i = 0; i < 256; ++i) s(i) = std::sin(2.0 * pi * xs(i) / 30.0);
  const Vec sp = ap.derivative(s);
  for (int i = 0; i < 256; ++i) {
    const double expect = (2.0 * pi / 30.0) * std::cos(2.0 * pi * xs(i) / 30.0);
    CHECK(std::abs(sp(i) - expect) < 1e-10);
  }
  // L + S is self adjoint, J is skew.
  const cplx lsuv = ap.inner({u}, ap.apply_ls({v}));
  const cplx lsvu = ap.inner({v}, ap.apply_ls({u}));
  CHECK(std::abs(lsuv - std::conj(lsvu)) < 1e-10 * std::abs(lsuv));
  const cplx juu = ap.inner({u}, ap.apply_j({u}));
  CHECK(std::abs(juu.real()) < 1e-10);
  CHECK(ap.h1_norm_sq({u}) > 0.0);
  // apply_jls is the composition.
  const auto jls = ap.apply_jls({u});
  const auto j_of_ls = ap.apply_j(ap.apply_ls({u}));
  CHECK((jls[0] - j_of_ls[0]).norm() < 1e-12 * jls[0].norm());
}
