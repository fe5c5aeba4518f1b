#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "doctest.h"
#include "solstab/models.hpp"
#include "solstab/specfind.hpp"

using namespace solstab;

TEST_CASE("winding counts the localized eigenvalues inside the rectangle") {
  const Model gkp = Model::make("gkp1");
  CHECK(winding_number(gkp, 0.25, {}) == 1);
  CHECK(winding_number(gkp, 3.5, {}) == 0);
  const Model nls = Model::make("nls");
  CHECK(winding_number(nls, 1.0, {}) == 1);
  CHECK(winding_number(nls, 1.8, {}) == 0);
  // A box strictly above the real axis misses the real root.
  RectSigma high;
  high.re_lo = 0.02;
  high.re_hi = 3.0;
  high.im_lo = 3.0;
  high.im_hi = 6.0;
  CHECK(winding_number(gkp, 0.25, high) == 0);
  // A tight box around the known root still sees it.
  RectSigma tight;
  tight.re_lo = 0.15;
  tight.re_hi = 0.22;
  tight.im_lo = -0.04;
  tight.im_hi = 0.04;
  CHECK(winding_number(gkp, 0.25, tight) == 1);
}

TEST_CASE("located eigenvalues match the frozen references") {
  // Frozen eigenvalues: tools/oracles/colloc_reference.out. The looser
  // small-k rows absorb the collocation truncation error, which dominates
  // there.
  struct Row {
    const char* name;
    double k;
    double sigma;
    double tol;
  };
  for (const Row& r : {Row{"gkp1", 0.2, 0.169405719, 2e-5},
                       Row{"gkp1", 0.25, 0.187671802, 2e-5},
                       Row{"gkp1", 0.3, 0.191993638, 2e-5},
                       Row{"gkp1", 0.1, 0.101018366, 1e-3},
                       Row{"nls", 0.5, 0.898018211, 2e-5},
                       Row{"nls", 1.0, 1.468809897, 2e-5},
                       Row{"nls", 1.5, 1.326501095, 2e-5},
                       Row{"zk", 0.6, 0.208019967, 2e-5},
                       Row{"kpbbm", 0.2, 0.109212172, 2e-5},
                       Row{"boussinesq", 0.1, 0.035840385, 1e-3},
                       Row{"boussinesq", 0.15, 0.033968536, 1e-3}}) {
    CAPTURE(r.name);
    CAPTURE(r.k);
    const Model m = Model::make(r.name);
    const std::optional<UnstableRoot> root = find_unstable_sigma(m, r.k);
    REQUIRE(root.has_value());
    CHECK(std::abs(root->sigma.real() - r.sigma) <=
          r.tol * (1.0 + std::abs(r.sigma)));
    CHECK(std::abs(root->sigma.imag()) < 1e-8);
    CHECK(root->residual < 1e-6);
    CHECK(root->verify_box > 0.0);
  }
}

TEST_CASE("no root is reported outside the band") {
  CHECK_FALSE(find_unstable_sigma(Model::make("gkp1"), 0.5).has_value());
  CHECK_FALSE(find_unstable_sigma(Model::make("nls"), 1.8).has_value());
  RectSigma high;
  high.re_lo = 0.02;
  high.re_hi = 3.0;
  high.im_lo = 3.0;
  high.im_hi = 6.0;
  CHECK_FALSE(
      find_unstable_sigma(Model::make("gkp1"), 0.25, high).has_value());
}

TEST_CASE("dispersion curve shape for gkp1") {
  const Model m = Model::make("gkp1");
  const DispersionCurve c = trace_dispersion(m, 0.05, 0.6, 12);
  CHECK(c.band_hi == doctest::Approx(0.433).epsilon(2e-3));
  CHECK(c.k0 == doctest::Approx(0.2883).epsilon(2e-3));
  CHECK(c.sigma0 == doctest::Approx(0.19245).epsilon(1e-3));
  CHECK(c.m == 2);
  // Samples cover the in-band scan points plus the maximizer refinements.
  CHECK(c.samples.size() >= 8);
  for (const DispersionSample& s : c.samples) {
    CHECK(s.k <= c.band_hi + 1e-9);
    CHECK(s.sigma.real() > 0.0);
  }
  // sigma rises to the maximizer and falls to the band edge.
  double prev = 0.0;
  bool monotone_up = true;
  for (const DispersionSample& s : c.samples) {
    if (s.k <= c.k0) {
      if (s.sigma.real() < prev - 1e-12) monotone_up = false;
      prev = s.sigma.real();
    }
  }
  CHECK(monotone_up);
  for (const DispersionSample& s : c.samples) {
    if (s.k > c.band_hi) continue;
    CHECK(s.sigma.real() <= c.sigma0 + 1e-12);
  }
}

TEST_CASE("dispersion band edge for nls sits at the criterion crossing") {
  const Model m = Model::make("nls");
  const DispersionCurve c = trace_dispersion(m, 0.4, 1.9, 7);
  CHECK(c.band_hi == doctest::Approx(std::sqrt(3.0)).epsilon(2e-3));
  CHECK(c.sigma0 > 1.46);
  CHECK(c.k0 > 0.9);
  CHECK(c.k0 < 1.4);
  CHECK(c.m == 2);
}

TEST_CASE("mode reconstruction satisfies the eigenvalue problem") {
  struct Probe {
    const char* name;
    double k;
  };
  for (const Probe& p :
       {Probe{"gkp1", 0.25}, Probe{"nls", 1.0}, Probe{"boussinesq", 0.1}}) {
    CAPTURE(p.name);
    const Model m = Model::make(p.name);
    const std::optional<UnstableRoot> root = find_unstable_sigma(m, p.k);
    REQUIRE(root.has_value());
    const ModeResult mr = mode_reconstruct(m, root->sigma, p.k);
    CHECK(static_cast<int>(mr.u.size()) == m.components());
    CHECK(mr.x.size() == 1024);
    CHECK(mr.residual < 1e-5);
    CHECK(mr.conservation < 1e-6);
    CHECK(mr.glue_sv < 1e-8);
    // L2 normalization on the sampling grid.
    const double h = mr.x(1) - mr.x(0);
    double mass = 0.0;
    for (const Vec& comp : mr.u) mass += comp.squaredNorm();
    CHECK(h * mass == doctest::Approx(1.0).epsilon(1e-10));
    // The grid is uniform and symmetric.
    CHECK(mr.x(0) == doctest::Approx(-mr.x(mr.x.size() - 1) - h).epsilon(1e-12));
  }
}

TEST_CASE("mode decays into both tails") {
  const Model m = Model::make("gkp1");
  const std::optional<UnstableRoot> root = find_unstable_sigma(m, 0.25);
  REQUIRE(root.has_value());
  const ModeResult mr = mode_reconstruct(m, root->sigma, 0.25);
  const Eigen::Index n = mr.x.size();
  double edge = 0.0, center = 0.0;
  for (const Vec& comp : mr.u) {
    edge = std::max(edge, std::abs(comp(0)));
    edge = std::max(edge, std::abs(comp(n - 1)));
    for (Eigen::Index i = 0; i < n; ++i) {
      center = std::max(center, std::abs(comp(i)));
    }
  }
  CHECK(edge < 1e-6 * center);
}
