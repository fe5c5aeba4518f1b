#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "solstab/colloc.hpp"
#include "solstab/models.hpp"

using namespace solstab;

namespace {

cplx horner(const std::vector<cplx>& coeffs, cplx z) {
  cplx acc = 0.0;
  for (const cplx& c : coeffs) acc = acc * z + c;
  return acc;
}

double coeff_scale(const std::vector<cplx>& coeffs, cplx z) {
  double m = 0.0;
  for (const cplx& c : coeffs) m = std::max(m, std::abs(c));
  return m * std::pow(std::max(1.0, std::abs(z)),
                      static_cast<double>(coeffs.size() - 1));
}

}  // namespace

TEST_CASE("registry lists the five families with their defaults") {
  const std::vector<std::string>& names = Model::names();
  REQUIRE(names.size() == 5);
  for (const char* n : {"gkp1", "nls", "boussinesq", "zk", "kpbbm"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
    CHECK(Model::make(n).name() == n);
  }
  CHECK(Model::make("gkp1").power() == 2);
  CHECK(Model::make("kpbbm").power() == 2);
  CHECK(Model::make("kpbbm").speed() == doctest::Approx(2.0));
  CHECK(Model::make("boussinesq").speed() == doctest::Approx(0.75));
}

TEST_CASE("parameter validation rejects out-of-range and unknown keys") {
  CHECK_THROWS_AS(Model::make("gkp1", {{"p", 5.0}}), parameter_error);
  CHECK_THROWS_AS(Model::make("gkp1", {{"p", 2.5}}), parameter_error);
  CHECK_THROWS_AS(Model::make("boussinesq", {{"c", 1.2}}), parameter_error);
  CHECK_THROWS_AS(Model::make("boussinesq", {{"c", 0.0}}), parameter_error);
  CHECK_THROWS_AS(Model::make("kpbbm", {{"c", 1.0}}), parameter_error);
  CHECK_THROWS_AS(Model::make("nls", {{"p", 3.0}}), parameter_error);
  CHECK_THROWS_AS(Model::make("zk", {{"c", 2.0}}), parameter_error);
  CHECK_THROWS_AS(Model::make("kdv"), parameter_error);
  CHECK_NOTHROW(Model::make("gkp1", {{"p", 3.0}}));
  CHECK_NOTHROW(Model::make("kpbbm", {{"c", 1.5}, {"p", 2.0}}));
}

TEST_CASE("dimensions and capability flags per family") {
  struct Row {
    const char* name;
    int comps, dim, dim_k0;
    bool reduced, sim, corr;
  };
  const Row rows[] = {
      {"gkp1", 1, 4, 3, true, true, true},
      {"nls", 2, 4, 4, false, true, false},
      {"boussinesq", 2, 4, 4, false, false, false},
      {"zk", 1, 3, 3, false, true, true},
      {"kpbbm", 1, 4, 3, true, false, false},
  };
  for (const Row& r : rows) {
    CAPTURE(r.name);
    const Model m = Model::make(r.name);
    CHECK(m.components() == r.comps);
    CHECK(m.ode_dim(0.5) == r.dim);
    CHECK(m.ode_dim(0.0) == r.dim_k0);
    CHECK(m.has_reduced_branch() == r.reduced);
    CHECK(m.simulatable() == r.sim);
    CHECK(m.corrector_supported() == r.corr);
    CHECK(m.k_exclusion() > 0.0);
    CHECK(m.kmax_hint() <= m.k_exclusion());
  }
  CHECK(Model::make("gkp1").k_exclusion() == doctest::Approx(3.0));
  CHECK(Model::make("nls").k_exclusion() == doctest::Approx(std::sqrt(5.0)));
  CHECK(Model::make("zk").k_exclusion() == doctest::Approx(std::sqrt(2.0)));
  CHECK(Model::make("kpbbm").k_exclusion() == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("profiles satisfy the stationary equations") {
  for (const std::string& name : Model::names()) {
    CAPTURE(name);
    const Model m = Model::make(name);
    CHECK(profile_residual(m) < 1e-8);
    CHECK(translational_residual(m) < 1e-6);
  }
}

TEST_CASE("profiles decay at the advertised exponential rate") {
  for (const std::string& name : Model::names()) {
    CAPTURE(name);
    const Model m = Model::make(name);
    const double a = m.profile_decay_rate();
    const double r = m.profile(10.0).norm() / m.profile(8.0).norm();
    CHECK(r == doctest::Approx(std::exp(-2.0 * a)).epsilon(0.05));
    CHECK(m.profile(0.0).norm() > 0.1);
  }
}

TEST_CASE("profile derivative matches a central difference") {
  const double h = 1e-5;
  for (const std::string& name : Model::names()) {
    CAPTURE(name);
    const Model m = Model::make(name);
    for (const double x : {-3.1, 0.4, 1.7}) {
      const double fd = (m.profile(x + h)(0) - m.profile(x - h)(0)) / (2 * h);
      CHECK(m.profile_derivative(x) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("potential triple is an exact derivative chain") {
  const double h = 1e-5;
  for (const char* name : {"gkp1", "boussinesq", "zk", "kpbbm"}) {
    CAPTURE(name);
    const Model m = Model::make(name);
    for (const double x : {-2.3, 0.0, 1.1}) {
      const auto [w, wp, wpp] = m.potential(x);
      const double wp_fd =
          (m.potential(x + h)[0] - m.potential(x - h)[0]) / (2 * h);
      const double wpp_fd =
          (m.potential(x + h)[1] - m.potential(x - h)[1]) / (2 * h);
      CHECK(wp == doctest::Approx(wp_fd).epsilon(1e-7));
      CHECK(wpp == doctest::Approx(wpp_fd).epsilon(1e-7));
      (void)w;
    }
  }
  CHECK_THROWS_AS(Model::make("nls").potential(1.0), parameter_error);
  const RMat pm = Model::make("nls").potential_matrix(0.7);
  CHECK(pm.rows() == 2);
  CHECK(pm.cols() == 2);
}

TEST_CASE("symbols are skew in J, Hermitian in S, and S vanishes at k = 0") {
  for (const std::string& name : Model::names()) {
    CAPTURE(name);
    const Model m = Model::make(name);
    for (const double xi : {0.3, 1.1, 2.7}) {
      const Mat j = m.j_symbol(xi, 0.4);
      const double js = std::max(1.0, j.norm());
      CHECK((j + j.adjoint()).norm() <= 1e-12 * js);
      CHECK((m.j_symbol(-xi, 0.4) - j.conjugate()).norm() <= 1e-12 * js);
      const Mat s = m.s_symbol(xi, 0.8);
      CHECK((s - s.adjoint()).norm() <= 1e-12 * std::max(1.0, s.norm()));
      CHECK(m.s_symbol(xi, 0.0).norm() <= 1e-12);
      const Mat l0 = m.l0_symbol(xi);
      CHECK((l0 - l0.adjoint()).norm() <= 1e-12 * std::max(1.0, l0.norm()));
    }
  }
}

TEST_CASE("characteristic polynomial matches the freestream matrix") {
  const cplx pts[][2] = {{cplx(0.7, 0.2), cplx(0.4, 0.0)},
                         {cplx(1.1, -0.3), cplx(0.8, 0.0)}};
  for (const std::string& name : Model::names()) {
    CAPTURE(name);
    const Model m = Model::make(name);
    for (const auto& pt : pts) {
      const cplx sigma = pt[0];
      const double k = pt[1].real();
      const Mat a = m.ode_matrix_freestream(sigma, k);
      const std::vector<cplx> coeffs = m.char_poly(sigma, k);
      REQUIRE(static_cast<int>(coeffs.size()) == m.ode_dim(k) + 1);
      const Eigen::ComplexEigenSolver<Mat> es(a);
      for (int i = 0; i < a.rows(); ++i) {
        const cplx ev = es.eigenvalues()(i);
        CHECK(std::abs(horner(coeffs, ev)) <= 1e-8 * coeff_scale(coeffs, ev));
      }
    }
  }
}

TEST_CASE("k = 0 dispatches to the reduced system where one exists") {
  const cplx sigma(0.6, 0.1);
  for (const char* name : {"gkp1", "kpbbm"}) {
    CAPTURE(name);
    const Model m = Model::make(name);
    CHECK(m.ode_matrix(0.5, sigma, 0.0).rows() == 3);
    CHECK(m.ode_matrix_full(0.5, sigma, 0.0).rows() == 4);
    CHECK(m.char_poly(sigma, 0.0).size() == 4);
    CHECK(m.char_poly_full(sigma, 0.0).size() == 5);
    const Mat a = m.ode_matrix(0.5, sigma, 0.3);
    const Mat af = m.ode_matrix_full(0.5, sigma, 0.3);
    CHECK((a - af).norm() == 0.0);
  }
  const Model nls = Model::make("nls");
  CHECK(nls.ode_matrix(0.5, sigma, 0.0).rows() == 4);
}

TEST_CASE("ode matrix settles to the freestream limit") {
  const cplx sigma(0.9, 0.4);
  for (const std::string& name : Model::names()) {
    CAPTURE(name);
    const Model m = Model::make(name);
    const double far = 12.0 / m.decay_rate() + 18.0;
    const Mat diff = m.ode_matrix(far, sigma, 0.45) -
                     m.ode_matrix_freestream(sigma, 0.45);
    CHECK(diff.norm() <= 1e-9);
  }
}

TEST_CASE("ode source map is machine-readable") {
  for (const std::string& name : Model::names()) {
    CAPTURE(name);
    const nlohmann::json j =
        nlohmann::json::parse(Model::make(name).ode_source_map());
    CHECK(j.contains("pencil"));
    CHECK(j.contains("variables"));
  }
}
