#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "doctest.h"
#include "solstab/evans.hpp"
#include "solstab/models.hpp"

using namespace solstab;

namespace {

const double kGrid[] = {0.55, 0.3, 0.25, 0.2, 0.3};

double model_k(const std::string& name) {
  const std::vector<std::string>& names = Model::names();
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return kGrid[i];
  }
  return 0.3;
}

}  // namespace

TEST_CASE("conjugate symmetry of the Evans function") {
  for (const std::string& name : Model::names()) {
    CAPTURE(name);
    const Model m = Model::make(name);
    const double k = model_k(name);
    for (const cplx sigma : {cplx(0.8, 0.3), cplx(0.4, -0.7), cplx(1.2, 1.5)}) {
      const EvansValue up = evans_eval(m, sigma, k);
      const EvansValue dn = evans_eval(m, std::conj(sigma), k);
      CHECK(std::abs(dn.log_abs() - up.log_abs()) < 1e-10);
      const double darg =
          std::remainder(dn.arg() + up.arg(), 2.0 * pi);
      CHECK(std::abs(darg) < 1e-10);
    }
  }
}

TEST_CASE("the value does not depend on the truncation point") {
  const Model m = Model::make("gkp1");
  const cplx sigma(0.6, 0.2);
  EvansOptions o20, o40, o80;
  o20.x_inf = 20.0;
  o40.x_inf = 40.0;
  o80.x_inf = 80.0;
  const EvansValue a = evans_eval(m, sigma, 0.3, o20);
  const EvansValue b = evans_eval(m, sigma, 0.3, o40);
  const EvansValue c = evans_eval(m, sigma, 0.3, o80);
  CHECK(std::abs(EvansValue::ratio(b, a) - 1.0) < 1e-6);
  CHECK(std::abs(EvansValue::ratio(c, b) - 1e0) < 1e-6);
}

TEST_CASE("mantissa normalization and ratio arithmetic") {
  const Model m = Model::make("zk");
  const EvansValue v = evans_eval(m, cplx(0.7, 0.4), 0.6);
  const double ma = std::abs(v.mantissa);
  CHECK(ma >= 1.0);
  CHECK(ma < std::exp(1.0));
  CHECK(std::abs(v.value() - v.mantissa * std::exp(v.log_scale)) <=
        1e-15 * std::abs(v.value()));
  const EvansValue w = evans_eval(m, cplx(0.7, 0.4), 0.6);
  CHECK(std::abs(EvansValue::ratio(w, v) - 1.0) < 1e-12);
}

TEST_CASE("analyticity on zero-free circles") {
  const cplx center(0.9, 0.4);
  for (const std::string& name : Model::names()) {
    CAPTURE(name);
    const Model m = Model::make(name);
    const double res = analyticity_check(m, center, 0.25, model_k(name), 32);
    CHECK(res < 1e-8);
  }
}

TEST_CASE("branch dispatch follows the wavenumber") {
  const Model gkp = Model::make("gkp1");
  CHECK(evans_eval(gkp, 1.0, 0.0).branch == "reduced");
  CHECK(evans_eval(gkp, 1.0, 5e-4).branch == "tilde");
  CHECK(evans_eval(gkp, 1.0, 0.3).branch == "standard");
  EvansOptions forced;
  forced.branch = "tilde";
  CHECK(evans_eval(gkp, 1.0, 0.01, forced).branch == "tilde");
  const Model nls = Model::make("nls");
  CHECK(evans_eval(nls, 1.0, 0.0).branch == "standard");
  CHECK(evans_eval(nls, 1.0, 0.5).branch == "standard");
}

TEST_CASE("the right half plane is required") {
  const Model m = Model::make("gkp1");
  CHECK_THROWS_AS(evans_eval(m, cplx(-0.5, 0.0), 0.3), parameter_error);
  CHECK_THROWS_AS(evans_eval(m, cplx(0.0, 0.5), 0.3), parameter_error);
}

TEST_CASE("degenerate freestream splitting is rejected") {
  const Model m = Model::make("nls");
  CHECK_THROWS_AS(evans_eval(m, cplx(1e-9, 3.0), 0.0), numerical_error);
}

TEST_CASE("the Evans function dips at the collocation eigenvalue") {
  // Frozen eigenvalues: tools/oracles/colloc_reference.out
  struct Probe {
    const char* name;
    double k;
    double sigma;
  };
  for (const Probe& pr : {Probe{"nls", 1.0, 1.468809897},
                          Probe{"gkp1", 0.25, 0.187671802},
                          Probe{"zk", 0.6, 0.208019967}}) {
    CAPTURE(pr.name);
    const Model m = Model::make(pr.name);
    const EvansValue at = evans_eval(m, pr.sigma, pr.k);
    const EvansValue off = evans_eval(m, pr.sigma + 0.1, pr.k);
    CHECK(at.log_abs() <= off.log_abs() + std::log(1e-3));
  }
}

TEST_CASE("tightening the tolerance does not move the value") {
  const Model m = Model::make("kpbbm");
  EvansOptions loose, tight;
  loose.tol = 1e-3;
  tight.tol = 1e-6;
  const EvansValue a = evans_eval(m, cplx(0.5, 0.2), 0.2, loose);
  const EvansValue b = evans_eval(m, cplx(0.5, 0.2), 0.2, tight);
  CHECK(std::abs(EvansValue::ratio(a, b) - 1.0) < 1e-3);
  CHECK(a.err_estimate >= 0.0);
  CHECK(b.err_estimate <= a.err_estimate + 1e-12);
}

TEST_CASE("slow-split continuation ratio is sigma independent") {
  // Reference behavior: tools/oracles/ratio_prototype.py
  const Model m = Model::make("gkp1");
  const ContinuationRatio cr = continuation_ratio(
      m, {cplx(0.5, 0.0), cplx(1.0, 0.0)}, {0.04, 0.02, 0.01});
  REQUIRE(cr.r_extrapolated.size() == 2);
  for (const cplx& r : cr.r_extrapolated) {
    CHECK(std::abs(r - cplx(-1.0, 0.0)) < 1e-3);
  }
  CHECK(cr.spread < 1e-3);
}
