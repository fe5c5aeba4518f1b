#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "doctest.h"
#include "solstab/models.hpp"
#include "solstab/simulate.hpp"
#include "solstab/specfind.hpp"

using namespace solstab;

namespace {

struct GkpMode {
  cplx sigma;
  ModeResult mode;
};

// One shared eigenmode solve near the gkp1 growth maximizer.
const GkpMode& gkp_mode() {
  static const GkpMode gm = [] {
    const Model m = Model::make("gkp1");
    const std::optional<UnstableRoot> root = find_unstable_sigma(m, 0.29);
    REQUIRE(root.has_value());
    return GkpMode{root->sigma, mode_reconstruct(m, root->sigma, 0.29)};
  }();
  return gm;
}

double series_value_at(const SimReport& rep, double t,
                       double SimSeriesRow::*field) {
  double best_gap = 1e300;
  double val = 0.0;
  for (const SimSeriesRow& row : rep.series) {
    if (std::abs(row.t - t) < best_gap) {
      best_gap = std::abs(row.t - t);
      val = row.*field;
    }
  }
  REQUIRE(best_gap < 1e-6);
  return val;
}

}  // namespace

TEST_CASE("snapshot files round trip exactly") {
  const std::string path = "/tmp/solstab_test_snap.bin";
  std::vector<RMat> fields;
  fields.push_back(RMat::Random(4, 6));
  fields.push_back(RMat::Random(4, 6));
  write_snapshot(path, 6, 4, 12.5, 3.25, 1.75, fields);
  std::ifstream f(path, std::ios::binary);
  char magic[8];
  f.read(magic, 8);
  CHECK(std::string(magic, 8) == "SSBIN001");
  f.close();
  const Snapshot s = read_snapshot(path);
  CHECK(s.nx == 6);
  CHECK(s.ny == 4);
  CHECK(s.lx == 12.5);
  CHECK(s.ly == 3.25);
  CHECK(s.t == 1.75);
  REQUIRE(s.fields.size() == 2);
  CHECK((s.fields[0] - fields[0]).norm() == 0.0);
  CHECK((s.fields[1] - fields[1]).norm() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("mode interpolation is exact on resolved trigonometry") {
  const int n = 64;
  const double half = 8.0;
  RVec grid(n);
  Vec mode(n);
  const double kx = 2.0 * pi / (2.0 * half);
  for (int i = 0; i < n; ++i) {
    grid(i) = -half + i * (2.0 * half / n);
    mode(i) = cplx(std::sin(3.0 * kx * grid(i)),
                   std::cos(5.0 * kx * grid(i)));
  }
  RVec probe(3);
  probe << -2.31, 0.17, 4.89;
  const Vec out = mode_interpolate(grid, mode, probe);
  for (int i = 0; i < 3; ++i) {
    const cplx expect(std::sin(3.0 * kx * probe(i)),
                      std::cos(5.0 * kx * probe(i)));
    CHECK(std::abs(out(i) - expect) < 1e-11);
  }
  RVec outside(1);
  outside << 55.0;
  CHECK(std::abs(mode_interpolate(grid, mode, outside)(0)) == 0.0);
}

TEST_CASE("pure soliton stays put") {
  const Model m = Model::make("gkp1");
  SimConfig cfg;
  cfg.nx = 128;
  cfg.ny = 8;
  cfg.dt = 0.02;
  cfg.t_max = 2.0;
  cfg.perturbation = PerturbationKind::none;
  const SimReport rep = run_simulation(m, cfg);
  CHECK_FALSE(rep.blow_up);
  CHECK(rep.invariant_drift < 1e-6);
  CHECK(rep.dt_stability_bound > cfg.dt);
  const double n0 = rep.series.front().norm_total;
  for (const SimSeriesRow& row : rep.series) {
    CHECK(std::abs(row.norm_total - n0) < 1e-6 * n0);
  }
  CHECK(rep.series.size() == 101);
  CHECK(rep.t_end == doctest::Approx(2.0));
}

TEST_CASE("linearized eigenmode grows at exactly its eigenvalue rate") {
  const Model m = Model::make("gkp1");
  const GkpMode& gm = gkp_mode();
  SimConfig cfg;
  cfg.nx = 256;
  cfg.ny = 16;
  cfg.dt = 0.01;
  cfg.t_max = 10.0;
  cfg.delta = 1e-4;
  cfg.linear_only = true;
  const SimReport rep = run_simulation(m, cfg, &gm.mode);
  CHECK_FALSE(rep.blow_up);
  const double p1 = series_value_at(rep, 2.0, &SimSeriesRow::norm_perp);
  const double p2 = series_value_at(rep, 10.0, &SimSeriesRow::norm_perp);
  const double rate = std::log(p2 / p1) / 8.0;
  CHECK(rate == doctest::Approx(gm.sigma.real()).epsilon(0.01));
}

TEST_CASE("nonlinear growth, threshold time, and mass conservation") {
  const Model m = Model::make("gkp1");
  const GkpMode& gm = gkp_mode();
  SimConfig cfg;
  cfg.nx = 256;
  cfg.ny = 32;
  cfg.dt = 0.01;
  cfg.t_max = 40.0;
  cfg.delta = 1e-4;
  const SimReport rep = run_simulation(m, cfg, &gm.mode);
  CHECK_FALSE(rep.blow_up);
  CHECK(rep.invariant_drift < 1e-6);
  CHECK(std::isfinite(rep.growth_rate));
  CHECK(rep.growth_rate ==
        doctest::Approx(gm.sigma.real()).epsilon(0.10));
  CHECK(rep.fit_r2 > 0.999);
  CHECK(rep.threshold_reached);
  // T_delta = ln(kappa e / delta) / sigma up to the O(1) prefactor locked
  // by the eigenmode normalization.
  CHECK(rep.t_delta > 30.0);
  CHECK(rep.t_delta < 40.0);
  CHECK(rep.distance == doctest::Approx(0.1).epsilon(0.25));
  // The perturbation enters with size delta exactly.
  CHECK(rep.series.front().norm_perp ==
        doctest::Approx(1e-4).epsilon(1e-4));
}

TEST_CASE("time stepping is fourth order in dt") {
  const Model m = Model::make("gkp1");
  const GkpMode& gm = gkp_mode();
  auto final_field = [&](double dt, const std::string& tag) {
    SimConfig cfg;
    cfg.nx = 128;
    cfg.ny = 16;
    cfg.dt = dt;
    cfg.t_max = 2.0;
    cfg.delta = 1e-2;
    cfg.series_stride = 1000000;
    cfg.snapshot_stride = static_cast<int>(std::lround(2.0 / dt));
    cfg.snapshot_prefix = "/tmp/solstab_conv_" + tag;
    const SimReport rep = run_simulation(m, cfg, &gm.mode);
    REQUIRE_FALSE(rep.blow_up);
    REQUIRE_FALSE(rep.snapshot_files.empty());
    const Snapshot s = read_snapshot(rep.snapshot_files.back());
    REQUIRE(s.t == doctest::Approx(2.0));
    for (const std::string& p : rep.snapshot_files) std::remove(p.c_str());
    return s.fields[0];
  };
  const RMat ref = final_field(0.0025, "ref");
  const double e_coarse = (final_field(0.04, "c") - ref).norm();
  const double e_fine = (final_field(0.02, "f") - ref).norm();
  CAPTURE(e_coarse);
  CAPTURE(e_fine);
  // Halving dt contracts the error by ~2^4; accept anything clearly
  // super-cubic.
  CHECK(e_fine * 10.0 < e_coarse);
  CHECK(e_coarse < 1e-4);
}

TEST_CASE("transverse mean modes stay projected out") {
  const Model m = Model::make("gkp1");
  const GkpMode& gm = gkp_mode();
  SimConfig cfg;
  cfg.nx = 128;
  cfg.ny = 16;
  cfg.dt = 0.02;
  cfg.t_max = 1.0;
  cfg.delta = 1e-3;
  cfg.series_stride = 1000000;
  cfg.snapshot_stride = 50;
  cfg.snapshot_prefix = "/tmp/solstab_proj";
  const SimReport rep = run_simulation(m, cfg, &gm.mode);
  REQUIRE_FALSE(rep.snapshot_files.empty());
  const Snapshot s = read_snapshot(rep.snapshot_files.back());
  for (const std::string& p : rep.snapshot_files) std::remove(p.c_str());
  // The x-mean of every transverse row matches the global mean: no mass
  // leaks into the eta != 0 zero modes.
  const RMat& f = s.fields[0];
  const double global_mean = f.mean();
  for (int iy = 0; iy < s.ny; ++iy) {
    CHECK(std::abs(f.row(iy).mean() - global_mean) < 1e-10);
  }
}

TEST_CASE("oversized steps are reported as blow-up, not a crash") {
  const Model m = Model::make("gkp1");
  const GkpMode& gm = gkp_mode();
  SimConfig cfg;
  cfg.nx = 128;
  cfg.ny = 8;
  cfg.dt = 0.5;
  cfg.t_max = 20.0;
  cfg.delta = 0.05;
  const SimReport rep = run_simulation(m, cfg, &gm.mode);
  CHECK(rep.blow_up);
  CHECK(std::isfinite(rep.blow_up_time));
  CHECK(rep.dt_stability_bound < 0.5);
  CHECK(rep.note.find("blow-up") != std::string::npos);
}

TEST_CASE("configuration errors are rejected up front") {
  SimConfig cfg;
  CHECK_THROWS_AS(run_simulation(Model::make("boussinesq"), cfg),
                  parameter_error);
  CHECK_THROWS_AS(run_simulation(Model::make("kpbbm"), cfg), parameter_error);
  // Eigenmode perturbations require a mode.
  CHECK_THROWS_AS(run_simulation(Model::make("gkp1"), cfg), parameter_error);
  SimConfig bad = cfg;
  bad.delta = 0.5;
  CHECK_THROWS_AS(run_simulation(Model::make("gkp1"), bad, &gkp_mode().mode),
                  parameter_error);
}

TEST_CASE("wave packet assembles phase-aligned nodes on one grid") {
  const Model m = Model::make("gkp1");
  const DispersionCurve curve = trace_dispersion(m, 0.05, 0.6, 12);
  const PacketResult pk = wave_packet(m, curve, 0.22, 0.33, 5, 10.0, 21);
  REQUIRE(pk.ks.size() == 5);
  REQUIRE(pk.sigmas.size() == 5);
  REQUIRE(pk.modes.size() == 5);
  for (size_t j = 1; j < pk.ks.size(); ++j) {
    CHECK(pk.ks[j] - pk.ks[j - 1] == doctest::Approx(pk.dk).epsilon(1e-12));
  }
  for (const cplx& s : pk.sigmas) CHECK(s.real() > 0.17);
  // Neighboring modes overlap positively after phase alignment.
  const double h = pk.mode_x(1) - pk.mode_x(0);
  for (size_t j = 1; j < pk.modes.size(); ++j) {
    cplx ip = 0.0;
    for (size_t c = 0; c < pk.modes[j].size(); ++c) {
      ip += h * pk.modes[j - 1][c].dot(pk.modes[j][c]);
    }
    CHECK(ip.real() > 0.5);
  }
  REQUIRE(pk.t.size() == 21);
  CHECK(pk.t.front() == 0.0);
  CHECK(pk.t.back() == doctest::Approx(10.0));
  CHECK(pk.ratio[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (const double r : pk.ratio) {
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
  }
  CHECK(pk.parseval_error < 1e-4);
  CHECK(pk.sigma0 == doctest::Approx(curve.sigma0).epsilon(1e-12));
  const std::vector<RMat> field = packet_field(pk, 0.0, 64, 16, 16.0 * pi);
  REQUIRE(field.size() == 1);
  CHECK(field[0].rows() == 16);
  CHECK(field[0].cols() == 64);
  CHECK(field[0].norm() > 0.0);
  CHECK(std::isfinite(field[0].norm()));
}

TEST_CASE("first corrector grows from zero data at twice the rate") {
  const Model m = Model::make("gkp1");
  const GkpMode& gm = gkp_mode();
  const CorrectorResult cr = first_corrector(m, gm.mode, 8.0, 0.01);
  CHECK(cr.norm_at_zero == 0.0);
  CHECK(cr.norm.front() == 0.0);
  CHECK(cr.norm.back() > 0.0);
  CHECK(cr.sigma0 == doctest::Approx(gm.sigma.real()).epsilon(1e-9));
  CHECK(cr.fitted_exponent > 1.5 * cr.sigma0);
  CHECK(cr.fitted_exponent < 2.5 * cr.sigma0);
  // Switching the forcing off leaves the zero solution.
  const CorrectorResult zero = first_corrector(m, gm.mode, 2.0, 0.01, true);
  for (const double n : zero.norm) CHECK(n <= 1e-14);
  CHECK_THROWS_AS(first_corrector(Model::make("kpbbm"), gm.mode, 1.0),
                  parameter_error);
}
