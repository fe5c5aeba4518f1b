#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "solstab/colloc.hpp"
#include "solstab/evans.hpp"
#include "solstab/io.hpp"
#include "solstab/models.hpp"
#include "solstab/odecore.hpp"
#include "solstab/simulate.hpp"
#include "solstab/specfind.hpp"

using json = nlohmann::ordered_json;
using namespace solstab;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Ctx {
  std::string outdir = ".";
  std::string prefix;
  std::string config_path;
  Config cfg;
  std::string config_text;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  std::vector<std::pair<std::string, std::string>> outputs;

  std::string path_for(const std::string& name) const {
    std::filesystem::create_directories(outdir);
    return outdir + "/" + prefix + name;
  }
  void save(const std::string& name, const std::string& content) {
    const std::string path = path_for(name);
    write_file(path, content);
    outputs.emplace_back(path, fnv1a_hex(content));
  }
  void record_external(const std::string& path) {
    outputs.emplace_back(path, fnv1a_hex(read_file(path)));
  }
  void write_manifest(const std::string& command, const json& model_info,
                      const json& options) {
    json m;
    m["tool"] = "solstab";
    m["version"] = kVersion;
    m["command"] = command;
    m["model"] = model_info;
    m["options"] = options;
    m["config_hash"] =
        config_text.empty() ? std::string() : fnv1a_hex(config_text);
    json outs = json::array();
    for (const auto& [path, hash] : outputs) {
      outs.push_back(json{{"path", path}, {"hash", hash}});
    }
    m["outputs"] = outs;
    m["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    write_file(path_for(command + "_manifest.json"), m.dump(2) + "\n");
  }
};

// Config keys may be spelled with underscores or hyphens; section-scoped
// entries win over bare ones.
std::string scoped_key(const Config& c, const std::string& sec,
                       const std::string& key) {
  std::string alt = key;
  for (char& ch : alt) {
    if (ch == '_') ch = '-';
  }
  for (const std::string& cand : {sec + "." + key, sec + "." + alt, key, alt}) {
    if (c.has(cand)) return cand;
  }
  return key;
}
double scoped_d(const Config& c, const std::string& sec, const std::string& key,
                double fb) {
  return c.get_double(scoped_key(c, sec, key), fb);
}
int scoped_i(const Config& c, const std::string& sec, const std::string& key,
             int fb) {
  return c.get_int(scoped_key(c, sec, key), fb);
}
bool scoped_b(const Config& c, const std::string& sec, const std::string& key,
              bool fb) {
  return c.get_bool(scoped_key(c, sec, key), fb);
}
std::string scoped_s(const Config& c, const std::string& sec,
                     const std::string& key, const std::string& fb) {
  return c.get(scoped_key(c, sec, key), fb);
}

std::string trim_note(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == ';')) s.pop_back();
  return s;
}

// Assemble the parameter map for a model, taking only the parameters that
// family uses; flags win over config keys.
Model make_model(const std::string& name, const Ctx& ctx,
                 const std::string& sec, bool p_set, int p_val, bool c_set,
                 double c_val) {
  std::map<std::string, double> params;
  const bool uses_p = (name == "gkp1" || name == "kpbbm");
  const bool uses_c = (name == "boussinesq" || name == "kpbbm");
  if (p_set && !uses_p) {
    throw parameter_error("model " + name + " does not take parameter p");
  }
  if (c_set && !uses_c) {
    throw parameter_error("model " + name + " does not take parameter c");
  }
  if (uses_p) {
    double p = p_set ? p_val : scoped_d(ctx.cfg, sec, "p", 2.0);
    params["p"] = p;
  }
  if (uses_c) {
    const double c_def = (name == "kpbbm") ? 2.0 : 0.75;
    params["c"] = c_set ? c_val : scoped_d(ctx.cfg, sec, "c", c_def);
  }
  return Model::make(name, params);
}

json model_info_json(const Model& m) {
  json j;
  j["name"] = m.name();
  json params = json::object();
  for (const auto& [key, value] : m.params()) params[key] = value;
  j["params"] = params;
  return j;
}

json evans_value_json(const EvansValue& v) {
  json j;
  j["sigma_re"] = v.sigma.real();
  j["sigma_im"] = v.sigma.imag();
  j["k"] = v.k;
  j["mantissa_re"] = v.mantissa.real();
  j["mantissa_im"] = v.mantissa.imag();
  j["log_scale"] = v.log_scale;
  j["log_abs"] = v.log_abs();
  j["arg"] = v.arg();
  j["value_re"] = v.value().real();
  j["value_im"] = v.value().imag();
  j["branch"] = v.branch;
  j["x_inf"] = v.x_inf;
  j["tol"] = v.tol;
  j["err_estimate"] = v.err_estimate;
  return j;
}

int run_models_cmd() {
  json out = json::array();
  for (const std::string& name : Model::names()) {
    const Model m = Model::make(name, {});
    json j = model_info_json(m);
    j["components"] = m.components();
    j["ode_dim"] = m.ode_dim(0.5);
    j["ode_dim_k0"] = m.ode_dim(0.0);
    j["reduced_branch"] = m.has_reduced_branch();
    j["simulatable"] = m.simulatable();
    j["corrector_supported"] = m.corrector_supported();
    j["decay_rate"] = m.decay_rate();
    j["profile_decay_rate"] = m.profile_decay_rate();
    j["k_exclusion"] = m.k_exclusion();
    j["kmax_hint"] = m.kmax_hint();
    j["ode_source_map"] = json::parse(m.ode_source_map());
    out.push_back(j);
  }
  std::printf("%s\n", out.dump(2).c_str());
  return 0;
}

// Shared sigma solve for subcommands that accept either an explicit sigma
// or an automatic in-band search.
UnstableRoot solve_sigma(const Model& model, double k,
                         const EvansOptions& opt) {
  try {
    auto r = find_unstable_sigma(model, k, RectSigma{}, opt);
    if (r) return *r;
  } catch (const numerical_error&) {
  }
  RectSigma edge;
  edge.re_lo = 0.002;
  edge.re_hi = 0.1;
  edge.im_lo = -0.05;
  edge.im_hi = 0.05;
  auto r = find_unstable_sigma(model, k, edge, opt);
  if (!r) {
    throw numerical_error("no unstable eigenvalue found at k = " +
                          std::to_string(k));
  }
  return *r;
}

struct VerifyTable {
  int failures = 0;
  void check(const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %-42s %s\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    if (!ok) ++failures;
  }
};

std::string fmt_d(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

int verify_suite() {
  VerifyTable t;

  {
    bool ok = true;
    std::string detail;
    for (const std::string& name : Model::names()) {
      const Model m = Model::make(name, {});
      const double r = profile_residual(m);
      if (!(r < 1e-8)) {
        ok = false;
        detail += name + "=" + fmt_d(r) + " ";
      }
    }
    if (ok) detail = "max stationary residual < 1e-8";
    t.check("profile residual", ok, detail);
  }

  {
    bool ok = true;
    std::string detail = "skew J, symmetric S, S(xi,0)=0";
    for (const std::string& name : Model::names()) {
      const Model m = Model::make(name, {});
      for (double xi : {0.3, 1.1, 2.7}) {
        const Mat j0 = m.j_symbol(xi, 0.4);
        if ((j0 + j0.adjoint()).norm() > 1e-12) {
          ok = false;
          detail = name + ": J symbol not skew at xi=" + fmt_d(xi);
        }
        const Mat jm = m.j_symbol(-xi, 0.4);
        if ((jm - j0.conjugate()).norm() > 1e-12) {
          ok = false;
          detail = name + ": J symbol not real-operator symmetric";
        }
        const Mat s1 = m.s_symbol(xi, 0.8);
        if ((s1 - s1.adjoint()).norm() > 1e-12) {
          ok = false;
          detail = name + ": S symbol not Hermitian";
        }
        if (m.s_symbol(xi, 0.0).norm() > 1e-12) {
          ok = false;
          detail = name + ": S(xi,0) != 0";
        }
      }
    }
    t.check("symbol structure", ok, detail);
  }

  {
    bool ok = true;
    std::string detail = "det(A - r I) matches stored coefficients";
    for (const std::string& name : Model::names()) {
      const Model m = Model::make(name, {});
      const cplx sigma(0.7, 0.2);
      const double k = 0.4;
      const Mat a = m.ode_matrix_freestream(sigma, k);
      const auto poly = m.char_poly(sigma, k);
      Eigen::ComplexEigenSolver<Mat> es(a);
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const cplx r = es.eigenvalues()(i);
        cplx val = poly[0];
        double scale = 1.0;
        for (size_t j = 1; j < poly.size(); ++j) {
          val = val * r + poly[j];
          scale = scale * std::max(1.0, std::abs(r)) + std::abs(poly[j]);
        }
        if (std::abs(val) > 1e-8 * scale) {
          ok = false;
          detail = name + ": char poly mismatch " + fmt_d(std::abs(val));
        }
      }
    }
    t.check("characteristic polynomial", ok, detail);
  }

  {
    bool ok = true;
    std::string detail = "stable/unstable counts sum to the dimension";
    for (const std::string& name : Model::names()) {
      const Model m = Model::make(name, {});
      const SplittingInfo sp = spatial_eigenvalues(m, cplx(0.9, 0.3), 0.5);
      if (sp.n_unstable + sp.n_stable != m.ode_dim(0.5) ||
          sp.spectral_gap <= 0.0 || sp.degenerate) {
        ok = false;
        detail = name + ": splitting degenerate";
      }
    }
    t.check("hyperbolic splitting", ok, detail);
  }

  {
    bool ok = true;
    std::string detail = "P^2 = P and P A = A P";
    for (const std::string& name : Model::names()) {
      const Model m = Model::make(name, {});
      const cplx sigma(0.8, 0.1);
      const double k = 0.6;
      const Mat a = m.ode_matrix_freestream(sigma, k);
      const SplittingInfo sp = spatial_eigenvalues(m, sigma, k);
      const std::vector<cplx> stable(sp.roots.begin(),
                                     sp.roots.begin() + sp.n_stable);
      const std::vector<cplx> unstable(sp.roots.begin() + sp.n_stable,
                                       sp.roots.end());
      const Mat p = dunford_projector(a, unstable, stable);
      const double e1 = (p * p - p).norm();
      const double e2 = (p * a - a * p).norm();
      if (e1 > 1e-10 || e2 > 1e-9) {
        ok = false;
        detail = name + ": projector residual " + fmt_d(std::max(e1, e2));
      }
    }
    t.check("spectral projector", ok, detail);
  }

  {
    const Model m = Model::make("gkp1", {{"p", 2.0}});
    const EvansOptions opt;
    const EvansValue v1 = evans_eval(m, cplx(0.8, 0.3), 0.25, opt);
    const EvansValue v2 = evans_eval(m, cplx(0.8, -0.3), 0.25, opt);
    const double rel =
        std::abs(v1.value() - std::conj(v2.value())) / std::abs(v1.value());
    t.check("conjugate symmetry", rel < 1e-10, "rel err " + fmt_d(rel));
  }

  {
    const Model m = Model::make("gkp1", {{"p", 2.0}});
    EvansOptions a;
    EvansOptions b;
    b.x_inf = 26.0;
    const EvansValue va = evans_eval(m, cplx(0.6, 0.0), 0.3, a);
    const EvansValue vb = evans_eval(m, cplx(0.6, 0.0), 0.3, b);
    const double rel = std::abs(va.value() - vb.value()) / std::abs(va.value());
    t.check("domain truncation", rel < 1e-6, "x_inf shift err " + fmt_d(rel));
  }

  {
    CsvWriter w1({"a", "b"});
    w1.add_row({1.0, 2.5});
    w1.add_row({-3.25, 1e-17});
    CsvWriter w2({"a", "b"});
    w2.add_row({1.0, 2.5});
    w2.add_row({-3.25, 1e-17});
    const bool ok = w1.str() == w2.str() && fnv1a_hex(w1.str()) == fnv1a_hex(w2.str());
    t.check("csv determinism", ok, "identical rows hash identically");
  }

  {
    const std::string text =
        "# comment\nglobal_key = 3\n[sec]\nx = 2.5\nflag = true\n";
    const Config c = Config::parse_string(text);
    const bool ok = c.get_double("sec.x", 0.0) == 2.5 &&
                    c.get_int("global_key", 0) == 3 &&
                    c.get_bool("sec.flag", false);
    t.check("config parser", ok, "sections, ints, booleans");
  }

  {
    std::vector<RMat> fields(1, RMat::Zero(4, 6));
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 6; ++j) fields[0](i, j) = std::sin(i + 2.0 * j);
    }
    const std::string path = "/tmp/solstab_verify_snap.bin";
    write_snapshot(path, 6, 4, 3.0, 2.0, 1.25, fields);
    const Snapshot s = read_snapshot(path);
    const bool ok = s.nx == 6 && s.ny == 4 && s.t == 1.25 &&
                    (s.fields[0] - fields[0]).norm() < 1e-15;
    std::remove(path.c_str());
    t.check("snapshot roundtrip", ok, "binary header and payload");
  }

  {
    const Model m = Model::make("nls", {});
    const RVec eigs = spectrum_l(m, 0, 4, 320, 40.0);
    bool has_m3 = false, has_0 = false;
    for (const double e : eigs) {
      if (std::abs(e + 3.0) < 5e-3) has_m3 = true;
      if (std::abs(e) < 5e-3) has_0 = true;
    }
    t.check("collocation anchors", has_m3 && has_0,
            "L1 spectrum contains -3 and 0");
  }

  {
    const Model m = Model::make("gkp1", {{"p", 2.0}});
    SimConfig cfg;
    cfg.nx = 128;
    cfg.ny = 8;
    cfg.dt = 0.02;
    cfg.t_max = 1.0;
    cfg.perturbation = PerturbationKind::none;
    const SimReport rep = run_simulation(m, cfg);
    bool ok = !rep.blow_up && rep.invariant_drift < 1e-6;
    double drift = 0.0;
    for (const auto& row : rep.series) {
      drift = std::max(drift,
                       std::abs(row.norm_total - rep.series.front().norm_total));
    }
    ok = ok && drift < 1e-6 * rep.series.front().norm_total;
    t.check("pure soliton evolution", ok,
            "norm drift " + fmt_d(drift) + ", invariant drift " +
                fmt_d(rep.invariant_drift));
  }

  std::printf("%d failure(s)\n", t.failures);
  return t.failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solstab: transverse instability toolkit for line solitons"};
  app.require_subcommand(1);
  app.fallthrough();
  Ctx ctx;
  app.add_option("--outdir", ctx.outdir, "Directory for output artifacts");
  app.add_option("--prefix", ctx.prefix, "Filename prefix for artifacts");
  app.add_option("--config", ctx.config_path,
                 "key = value config file with per-subcommand sections");

  std::string model_name = "gkp1";
  int p_val = 2;
  double c_val = 0.0;
  const auto add_model_opts = [&](CLI::App* sub) {
    sub->add_option("--model", model_name, "Model name")
        ->check(CLI::IsMember(Model::names()));
    sub->add_option("--p", p_val, "Nonlinearity power (gkp1, kpbbm)");
    sub->add_option("--c", c_val, "Wave speed (boussinesq, kpbbm)");
  };
  const auto model_for = [&](CLI::App* sub, const std::string& sec) {
    if (!sub->count("--model")) {
      model_name = scoped_s(ctx.cfg, sec, "model", model_name);
    }
    return make_model(model_name, ctx, sec, sub->count("--p") > 0, p_val,
                      sub->count("--c") > 0, c_val);
  };

  // models
  CLI::App* sub_models = app.add_subcommand("models", "List the registry");
  std::string models_action = "list";
  sub_models->add_option("action", models_action, "Registry action")
      ->check(CLI::IsMember({"list"}));

  // profile
  CLI::App* sub_profile =
      app.add_subcommand("profile", "Sample the soliton profile");
  add_model_opts(sub_profile);
  double pr_xmax = 20.0;
  int pr_n = 801;
  sub_profile->add_option("--xmax", pr_xmax, "Half width of the sample grid");
  sub_profile->add_option("--n", pr_n, "Number of samples");

  // evans
  CLI::App* sub_evans =
      app.add_subcommand("evans", "Evaluate the Evans function once");
  add_model_opts(sub_evans);
  double ev_sre = 1.0, ev_sim = 0.0, ev_k = 0.5, ev_tol = 1e-4, ev_xinf = 0.0;
  std::string ev_branch = "auto";
  sub_evans->add_option("--sigma-re", ev_sre, "Re sigma");
  sub_evans->add_option("--sigma-im", ev_sim, "Im sigma");
  sub_evans->add_option("--k", ev_k, "Transverse wavenumber");
  sub_evans->add_option("--tol", ev_tol, "Wedge accuracy");
  sub_evans->add_option("--xinf", ev_xinf, "Integration half width (0: auto)");
  sub_evans->add_option("--branch", ev_branch, "auto|standard|reduced|tilde");

  // evans-grid
  CLI::App* sub_grid =
      app.add_subcommand("evans-grid", "Evaluate D on a sigma grid");
  add_model_opts(sub_grid);
  double gr_re_lo = 0.05, gr_re_hi = 1.0, gr_im_lo = 0.0, gr_im_hi = 0.0;
  int gr_nre = 21, gr_nim = 1;
  double gr_k = 0.5, gr_tol = 1e-4;
  sub_grid->add_option("--re-lo", gr_re_lo, "Re sigma lower bound");
  sub_grid->add_option("--re-hi", gr_re_hi, "Re sigma upper bound");
  sub_grid->add_option("--im-lo", gr_im_lo, "Im sigma lower bound");
  sub_grid->add_option("--im-hi", gr_im_hi, "Im sigma upper bound");
  sub_grid->add_option("--nre", gr_nre, "Points along Re sigma");
  sub_grid->add_option("--nim", gr_nim, "Points along Im sigma");
  sub_grid->add_option("--k", gr_k, "Transverse wavenumber");
  sub_grid->add_option("--tol", gr_tol, "Wedge accuracy");

  // dispersion
  CLI::App* sub_disp =
      app.add_subcommand("dispersion", "Trace the unstable band sigma(k)");
  add_model_opts(sub_disp);
  double dp_kmin = 0.05, dp_kmax = 0.0, dp_tol = 1e-4;
  int dp_nk = 25;
  sub_disp->add_option("--kmin", dp_kmin, "Scan start");
  sub_disp->add_option("--kmax", dp_kmax, "Scan end (0: model hint)");
  sub_disp->add_option("--nk", dp_nk, "Scan points");
  sub_disp->add_option("--tol", dp_tol, "Wedge accuracy");

  // criterion
  CLI::App* sub_crit =
      app.add_subcommand("criterion", "M_k kernel criterion for k0");
  add_model_opts(sub_crit);
  int cr_n = 512;
  double cr_half = 40.0, cr_tolk = 2.5e-4, cr_klo = 0.02, cr_khi = 0.0;
  sub_crit->add_option("--n", cr_n, "Collocation points");
  sub_crit->add_option("--half-length", cr_half, "Collocation half width");
  sub_crit->add_option("--tol-k", cr_tolk, "Bisection tolerance");
  sub_crit->add_option("--klo", cr_klo, "Bracket start");
  sub_crit->add_option("--khi", cr_khi, "Bracket end (0: model hint)");

  // mode
  CLI::App* sub_mode =
      app.add_subcommand("mode", "Reconstruct an unstable eigenmode");
  add_model_opts(sub_mode);
  double md_k = 0.0, md_sre = 0.0, md_sim = 0.0, md_tol = 1e-4;
  int md_ngrid = 1024;
  sub_mode->add_option("--k", md_k, "Transverse wavenumber")->required();
  sub_mode->add_option("--sigma-re", md_sre, "Re sigma (0: solve)");
  sub_mode->add_option("--sigma-im", md_sim, "Im sigma");
  sub_mode->add_option("--ngrid", md_ngrid, "Output grid size");
  sub_mode->add_option("--tol", md_tol, "Wedge accuracy");

  // simulate
  CLI::App* sub_sim =
      app.add_subcommand("simulate", "Nonlinear instability experiment");
  add_model_opts(sub_sim);
  double sm_k = 0.0, sm_sre = 0.0, sm_sim = 0.0;
  SimConfig sim_cfg;
  std::string sm_pert = "eigenmode";
  sub_sim->add_option("--k", sm_k, "Eigenmode wavenumber (0: criterion k0/2)");
  sub_sim->add_option("--sigma-re", sm_sre, "Re sigma (0: solve)");
  sub_sim->add_option("--sigma-im", sm_sim, "Im sigma");
  sub_sim->add_option("--nx", sim_cfg.nx, "Grid points in x");
  sub_sim->add_option("--ny", sim_cfg.ny, "Grid points in y");
  sub_sim->add_option("--lx", sim_cfg.lx, "Box width (0: auto)");
  sub_sim->add_option("--ly", sim_cfg.ly, "Box height (0: auto)");
  sub_sim->add_option("--dt", sim_cfg.dt, "Time step");
  sub_sim->add_option("--tmax", sim_cfg.t_max, "Final time");
  sub_sim->add_option("--delta", sim_cfg.delta, "Perturbation amplitude");
  sub_sim->add_option("--kappa", sim_cfg.kappa, "Stopping threshold");
  sub_sim->add_option("--fit-hi", sim_cfg.fit_hi, "Fit window upper bound");
  sub_sim->add_option("--fit-lo-factor", sim_cfg.fit_lo_factor,
                      "Fit window opens at this multiple of delta");
  sub_sim->add_option("--series-stride", sim_cfg.series_stride,
                      "Time-series recording stride");
  sub_sim->add_option("--snapshot-stride", sim_cfg.snapshot_stride,
                      "Field snapshot stride (0: none)");
  sub_sim->add_option("--perturbation", sm_pert, "eigenmode|none")
      ->check(CLI::IsMember({"eigenmode", "none"}));
  bool sm_no_dealias = false, sm_linear = false;
  sub_sim->add_flag("--no-dealias", sm_no_dealias, "Disable 2/3 dealiasing");
  sub_sim->add_flag("--linear-only", sm_linear, "Evolve the linearization");

  // packet
  CLI::App* sub_pack =
      app.add_subcommand("packet", "Linear wave-packet bounds");
  add_model_opts(sub_pack);
  double pk_kmin = 0.05, pk_kmax = 0.0, pk_klo = 0.0, pk_khi = 0.0;
  double pk_tmax = 0.0, pk_tol = 1e-4;
  int pk_nk = 15, pk_nodes = 13, pk_ntimes = 61;
  sub_pack->add_option("--kmin", pk_kmin, "Dispersion scan start");
  sub_pack->add_option("--kmax", pk_kmax, "Dispersion scan end (0: hint)");
  sub_pack->add_option("--nk", pk_nk, "Dispersion scan points");
  sub_pack->add_option("--klo", pk_klo, "Packet band start (0: auto)");
  sub_pack->add_option("--khi", pk_khi, "Packet band end (0: auto)");
  sub_pack->add_option("--nnodes", pk_nodes, "Quadrature nodes");
  sub_pack->add_option("--tmax", pk_tmax, "Final time (0: 3/sigma0)");
  sub_pack->add_option("--ntimes", pk_ntimes, "Time samples");
  sub_pack->add_option("--tol", pk_tol, "Wedge accuracy");

  // verify
  app.add_subcommand("verify", "Run the property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!ctx.config_path.empty()) {
      ctx.config_text = read_file(ctx.config_path);
      ctx.cfg = Config::parse_string(ctx.config_text);
    }

    if (sub_models->parsed()) return run_models_cmd();

    if (app.get_subcommand_ptr("verify")->parsed()) return verify_suite();

    if (sub_profile->parsed()) {
      const Model model = model_for(sub_profile, "profile");
      if (!sub_profile->count("--xmax")) {
        pr_xmax = scoped_d(ctx.cfg, "profile", "xmax", pr_xmax);
      }
      if (!sub_profile->count("--n")) {
        pr_n = scoped_i(ctx.cfg, "profile", "n", pr_n);
      }
      if (pr_n < 2 || pr_xmax <= 0.0) {
        throw parameter_error("profile needs n >= 2 and xmax > 0");
      }
      std::vector<std::string> cols = {"x"};
      for (int c = 0; c < model.components(); ++c) {
        cols.push_back("q" + std::to_string(c));
      }
      const bool has_potential = (model.id() != ModelId::nls);
      if (has_potential) {
        cols.push_back("w");
        cols.push_back("wp");
        cols.push_back("wpp");
      }
      CsvWriter csv(cols);
      for (int i = 0; i < pr_n; ++i) {
        const double x = -pr_xmax + 2.0 * pr_xmax * i / (pr_n - 1);
        std::vector<double> row = {x};
        const RVec q = model.profile(x);
        for (int c = 0; c < model.components(); ++c) row.push_back(q(c));
        if (has_potential) {
          const auto w = model.potential(x);
          row.insert(row.end(), {w[0], w[1], w[2]});
        }
        csv.add_row(row);
      }
      ctx.save("profile.csv", csv.str());
      json opts{{"xmax", pr_xmax}, {"n", pr_n}};
      ctx.write_manifest("profile", model_info_json(model), opts);
      return 0;
    }

    if (sub_evans->parsed()) {
      const Model model = model_for(sub_evans, "evans");
      EvansOptions opt;
      opt.tol = sub_evans->count("--tol")
                    ? ev_tol
                    : scoped_d(ctx.cfg, "evans", "tol", ev_tol);
      opt.x_inf = sub_evans->count("--xinf")
                      ? ev_xinf
                      : scoped_d(ctx.cfg, "evans", "xinf", ev_xinf);
      opt.branch = sub_evans->count("--branch")
                       ? ev_branch
                       : scoped_s(ctx.cfg, "evans", "branch", ev_branch);
      if (!sub_evans->count("--sigma-re")) {
        ev_sre = scoped_d(ctx.cfg, "evans", "sigma_re", ev_sre);
      }
      if (!sub_evans->count("--sigma-im")) {
        ev_sim = scoped_d(ctx.cfg, "evans", "sigma_im", ev_sim);
      }
      if (!sub_evans->count("--k")) {
        ev_k = scoped_d(ctx.cfg, "evans", "k", ev_k);
      }
      const EvansValue v = evans_eval(model, cplx(ev_sre, ev_sim), ev_k, opt);
      const json j = evans_value_json(v);
      std::printf("%s\n", j.dump(2).c_str());
      ctx.save("evans.json", j.dump(2) + "\n");
      json opts{{"sigma_re", ev_sre}, {"sigma_im", ev_sim}, {"k", ev_k},
                {"tol", opt.tol},     {"xinf", opt.x_inf},  {"branch", opt.branch}};
      ctx.write_manifest("evans", model_info_json(model), opts);
      return 0;
    }

    if (sub_grid->parsed()) {
      const Model model = model_for(sub_grid, "evans-grid");
      EvansOptions opt;
      opt.tol = sub_grid->count("--tol")
                    ? gr_tol
                    : scoped_d(ctx.cfg, "evans-grid", "tol", gr_tol);
      if (gr_nre < 1 || gr_nim < 1) {
        throw parameter_error("grid needs nre, nim >= 1");
      }
      const int total = gr_nre * gr_nim;
      std::vector<EvansValue> vals(static_cast<size_t>(total));
      std::vector<std::string> errors(static_cast<size_t>(total));
      parallel_for(total, [&](int idx) {
        const int ire = idx % gr_nre;
        const int iim = idx / gr_nre;
        const double sre =
            (gr_nre == 1) ? gr_re_lo
                          : gr_re_lo + (gr_re_hi - gr_re_lo) * ire / (gr_nre - 1);
        const double sim =
            (gr_nim == 1) ? gr_im_lo
                          : gr_im_lo + (gr_im_hi - gr_im_lo) * iim / (gr_nim - 1);
        try {
          vals[static_cast<size_t>(idx)] =
              evans_eval(model, cplx(sre, sim), gr_k, opt);
        } catch (const std::exception& e) {
          errors[static_cast<size_t>(idx)] = e.what();
        }
        vals[static_cast<size_t>(idx)].sigma = cplx(sre, sim);
      });
      for (const std::string& err : errors) {
        if (!err.empty()) throw numerical_error(err);
      }
      CsvWriter csv({"sigma_re", "sigma_im", "k", "mantissa_re", "mantissa_im",
                     "log_scale", "log_abs", "arg"});
      for (const EvansValue& v : vals) {
        csv.add_row({v.sigma.real(), v.sigma.imag(), gr_k, v.mantissa.real(),
                     v.mantissa.imag(), v.log_scale, v.log_abs(), v.arg()});
      }
      ctx.save("evans_grid.csv", csv.str());
      json opts{{"re_lo", gr_re_lo}, {"re_hi", gr_re_hi}, {"im_lo", gr_im_lo},
                {"im_hi", gr_im_hi}, {"nre", gr_nre},     {"nim", gr_nim},
                {"k", gr_k},         {"tol", opt.tol}};
      ctx.write_manifest("evans-grid", model_info_json(model), opts);
      return 0;
    }

    if (sub_disp->parsed()) {
      const Model model = model_for(sub_disp, "dispersion");
      if (!sub_disp->count("--kmin")) {
        dp_kmin = scoped_d(ctx.cfg, "dispersion", "kmin", dp_kmin);
      }
      if (!sub_disp->count("--kmax")) {
        dp_kmax = scoped_d(ctx.cfg, "dispersion", "kmax", dp_kmax);
      }
      if (!sub_disp->count("--nk")) {
        dp_nk = scoped_i(ctx.cfg, "dispersion", "nk", dp_nk);
      }
      if (dp_kmax <= 0.0) dp_kmax = model.kmax_hint();
      EvansOptions opt;
      opt.tol = sub_disp->count("--tol")
                    ? dp_tol
                    : scoped_d(ctx.cfg, "dispersion", "tol", dp_tol);
      const DispersionCurve curve =
          trace_dispersion(model, dp_kmin, dp_kmax, dp_nk, opt);
      CsvWriter csv({"k", "in_band", "sigma_re", "sigma_im", "residual"});
      for (int i = 0; i < dp_nk; ++i) {
        const double k = dp_kmin + (dp_kmax - dp_kmin) * i / (dp_nk - 1);
        const DispersionSample* hit = nullptr;
        for (const auto& s : curve.samples) {
          if (std::abs(s.k - k) < 1e-13) hit = &s;
        }
        if (hit) {
          csv.add_row({k, 1.0, hit->sigma.real(), hit->sigma.imag(),
                       hit->residual});
        } else {
          csv.add_row({k, 0.0, 0.0, 0.0, 0.0});
        }
      }
      ctx.save("dispersion.csv", csv.str());
      json j;
      j["band_lo"] = curve.band_lo;
      j["band_hi"] = curve.band_hi;
      j["k0"] = curve.k0;
      j["sigma0"] = curve.sigma0;
      j["m"] = curve.m;
      j["n_samples"] = curve.samples.size();
      j["note"] = trim_note(curve.note);
      ctx.save("dispersion.json", j.dump(2) + "\n");
      json opts{{"kmin", dp_kmin}, {"kmax", dp_kmax}, {"nk", dp_nk},
                {"tol", opt.tol}};
      ctx.write_manifest("dispersion", model_info_json(model), opts);
      return 0;
    }

    if (sub_crit->parsed()) {
      const Model model = model_for(sub_crit, "criterion");
      if (!sub_crit->count("--n")) {
        cr_n = scoped_i(ctx.cfg, "criterion", "n", cr_n);
      }
      if (!sub_crit->count("--half-length")) {
        cr_half = scoped_d(ctx.cfg, "criterion", "half_length", cr_half);
      }
      if (!sub_crit->count("--tol-k")) {
        cr_tolk = scoped_d(ctx.cfg, "criterion", "tol_k", cr_tolk);
      }
      if (cr_khi <= 0.0) cr_khi = model.kmax_hint();
      const CriterionResult r =
          find_k0_criterion(model, cr_klo, cr_khi, cr_n, cr_half, cr_tolk);
      json j;
      j["k0"] = r.k0;
      j["criterion_valid"] = r.valid;
      j["derivative_pairing"] = r.derivative_pairing;
      j["expected_pairing"] = -2.0 * r.k0;
      j["note"] = trim_note(r.note);
      std::printf("%s\n", j.dump(2).c_str());
      ctx.save("criterion.json", j.dump(2) + "\n");
      json opts{{"n", cr_n}, {"half_length", cr_half}, {"tol_k", cr_tolk},
                {"klo", cr_klo}, {"khi", cr_khi}};
      ctx.write_manifest("criterion", model_info_json(model), opts);
      return 0;
    }

    if (sub_mode->parsed()) {
      const Model model = model_for(sub_mode, "mode");
      EvansOptions opt;
      opt.tol = sub_mode->count("--tol")
                    ? md_tol
                    : scoped_d(ctx.cfg, "mode", "tol", md_tol);
      cplx sigma(md_sre, md_sim);
      double residual_rel = 0.0;
      if (md_sre == 0.0) {
        const UnstableRoot root = solve_sigma(model, md_k, opt);
        sigma = root.sigma;
        residual_rel = root.residual;
      }
      const ModeResult mode =
          mode_reconstruct(model, sigma, md_k, md_ngrid, opt);
      std::vector<std::string> cols = {"x"};
      for (size_t c = 0; c < mode.u.size(); ++c) {
        cols.push_back("u" + std::to_string(c) + "_re");
        cols.push_back("u" + std::to_string(c) + "_im");
      }
      CsvWriter csv(cols);
      for (Eigen::Index i = 0; i < mode.x.size(); ++i) {
        std::vector<double> row = {mode.x(i)};
        for (const Vec& comp : mode.u) {
          row.push_back(comp(i).real());
          row.push_back(comp(i).imag());
        }
        csv.add_row(row);
      }
      ctx.save("mode.csv", csv.str());
      json j;
      j["sigma_re"] = mode.sigma.real();
      j["sigma_im"] = mode.sigma.imag();
      j["k"] = mode.k;
      j["residual"] = mode.residual;
      j["conservation"] = mode.conservation;
      j["glue_sv"] = mode.glue_sv;
      j["evans_residual"] = residual_rel;
      j["n_grid"] = md_ngrid;
      std::printf("%s\n", j.dump(2).c_str());
      ctx.save("mode.json", j.dump(2) + "\n");
      json opts{{"k", md_k}, {"ngrid", md_ngrid}, {"tol", opt.tol}};
      ctx.write_manifest("mode", model_info_json(model), opts);
      return 0;
    }

    if (sub_sim->parsed()) {
      const Model model = model_for(sub_sim, "simulate");
      const std::string sec = "simulate";
      if (!sub_sim->count("--nx")) sim_cfg.nx = scoped_i(ctx.cfg, sec, "nx", sim_cfg.nx);
      if (!sub_sim->count("--ny")) sim_cfg.ny = scoped_i(ctx.cfg, sec, "ny", sim_cfg.ny);
      if (!sub_sim->count("--lx")) sim_cfg.lx = scoped_d(ctx.cfg, sec, "lx", sim_cfg.lx);
      if (!sub_sim->count("--ly")) sim_cfg.ly = scoped_d(ctx.cfg, sec, "ly", sim_cfg.ly);
      if (!sub_sim->count("--dt")) sim_cfg.dt = scoped_d(ctx.cfg, sec, "dt", sim_cfg.dt);
      if (!sub_sim->count("--tmax")) {
        sim_cfg.t_max = scoped_d(ctx.cfg, sec, "tmax", sim_cfg.t_max);
      }
      if (!sub_sim->count("--delta")) {
        sim_cfg.delta = scoped_d(ctx.cfg, sec, "delta", sim_cfg.delta);
      }
      if (!sub_sim->count("--kappa")) {
        sim_cfg.kappa = scoped_d(ctx.cfg, sec, "kappa", sim_cfg.kappa);
      }
      if (!sub_sim->count("--perturbation")) {
        sm_pert = scoped_s(ctx.cfg, sec, "perturbation", sm_pert);
      }
      if (!sub_sim->count("--k")) sm_k = scoped_d(ctx.cfg, sec, "k", sm_k);
      sim_cfg.dealias = !sm_no_dealias && scoped_b(ctx.cfg, sec, "dealias", true);
      sim_cfg.linear_only =
          sm_linear || scoped_b(ctx.cfg, sec, "linear_only", false);
      sim_cfg.perturbation = (sm_pert == "none") ? PerturbationKind::none
                                                 : PerturbationKind::eigenmode;
      if (sim_cfg.snapshot_stride > 0) {
        sim_cfg.snapshot_prefix = ctx.path_for("simulate_snap");
      }
      std::optional<ModeResult> mode;
      json mode_json = json::object();
      if (sim_cfg.perturbation == PerturbationKind::eigenmode) {
        if (sm_k <= 0.0) {
          throw parameter_error("simulate needs --k for eigenmode runs");
        }
        EvansOptions opt;
        cplx sigma(sm_sre, sm_sim);
        if (sm_sre == 0.0) sigma = solve_sigma(model, sm_k, opt).sigma;
        mode = mode_reconstruct(model, sigma, sm_k, 1024, opt);
        mode_json["sigma_re"] = mode->sigma.real();
        mode_json["sigma_im"] = mode->sigma.imag();
        mode_json["k"] = mode->k;
        mode_json["mode_residual"] = mode->residual;
      }
      const SimReport rep =
          run_simulation(model, sim_cfg, mode ? &*mode : nullptr);
      CsvWriter csv({"t", "norm_total", "norm_perp", "hamiltonian_diag"});
      for (const SimSeriesRow& row : rep.series) {
        csv.add_row({row.t, row.norm_total, row.norm_perp,
                     row.hamiltonian_diag});
      }
      ctx.save("simulate_series.csv", csv.str());
      for (const std::string& snap : rep.snapshot_files) {
        ctx.record_external(snap);
      }
      json j;
      j["growth_rate"] = rep.growth_rate;
      j["fit_r2"] = rep.fit_r2;
      j["fit_t_lo"] = rep.fit_t_lo;
      j["fit_t_hi"] = rep.fit_t_hi;
      j["threshold_reached"] = rep.threshold_reached;
      j["t_delta"] = rep.t_delta;
      j["distance"] = rep.distance;
      j["invariant_drift"] = rep.invariant_drift;
      j["blow_up"] = rep.blow_up;
      j["dt_stability_bound"] = rep.dt_stability_bound;
      j["note"] = trim_note(rep.note);
      j["mode"] = mode_json;
      j["grid"] = json{{"nx", rep.nx}, {"ny", rep.ny}, {"lx", rep.lx},
                       {"ly", rep.ly}, {"dt", rep.dt}, {"t_end", rep.t_end}};
      std::printf("%s\n", j.dump(2).c_str());
      ctx.save("simulate.json", j.dump(2) + "\n");
      json opts{{"delta", sim_cfg.delta},
                {"kappa", sim_cfg.kappa},
                {"dt", sim_cfg.dt},
                {"tmax", sim_cfg.t_max},
                {"perturbation", sm_pert},
                {"dealias", sim_cfg.dealias},
                {"linear_only", sim_cfg.linear_only}};
      ctx.write_manifest("simulate", model_info_json(model), opts);
      return 0;
    }

    if (sub_pack->parsed()) {
      const Model model = model_for(sub_pack, "packet");
      if (pk_kmax <= 0.0) pk_kmax = model.kmax_hint();
      EvansOptions opt;
      opt.tol = pk_tol;
      const DispersionCurve curve =
          trace_dispersion(model, pk_kmin, pk_kmax, pk_nk, opt);
      if (curve.samples.empty()) {
        throw numerical_error("no unstable band found for the packet");
      }
      if (pk_klo <= 0.0) {
        pk_klo = curve.k0 - 0.3 * (curve.k0 - curve.band_lo);
      }
      if (pk_khi <= 0.0) {
        pk_khi = curve.k0 + 0.3 * (curve.band_hi - curve.k0);
      }
      if (pk_tmax <= 0.0) pk_tmax = 3.0 / curve.sigma0;
      const PacketResult pk = wave_packet(model, curve, pk_klo, pk_khi,
                                          pk_nodes, pk_tmax, pk_ntimes, opt);
      CsvWriter csv({"t", "norm", "ratio"});
      for (size_t i = 0; i < pk.t.size(); ++i) {
        csv.add_row({pk.t[i], pk.norm[i], pk.ratio[i]});
      }
      ctx.save("packet.csv", csv.str());
      json j;
      j["k_lo"] = pk.ks.front();
      j["k_hi"] = pk.ks.back();
      j["dk"] = pk.dk;
      j["n_nodes"] = pk.ks.size();
      j["sigma0"] = pk.sigma0;
      j["m"] = pk.m;
      j["parseval_error"] = pk.parseval_error;
      j["fitted_exponent"] = pk.fitted_exponent;
      json nodes = json::array();
      for (size_t i = 0; i < pk.ks.size(); ++i) {
        nodes.push_back(json{{"k", pk.ks[i]},
                             {"sigma_re", pk.sigmas[i].real()},
                             {"sigma_im", pk.sigmas[i].imag()}});
      }
      j["nodes"] = nodes;
      std::printf("%s\n", j.dump(2).c_str());
      ctx.save("packet.json", j.dump(2) + "\n");
      json opts{{"kmin", pk_kmin},   {"kmax", pk_kmax},
                {"nk", pk_nk},       {"klo", pk_klo},
                {"khi", pk_khi},     {"nnodes", pk_nodes},
                {"tmax", pk_tmax},   {"ntimes", pk_ntimes},
                {"tol", pk_tol}};
      ctx.write_manifest("packet", model_info_json(model), opts);
      return 0;
    }
  } catch (const parameter_error& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    json diag;
    diag["error"] = "numerical_failure";
    diag["what"] = e.what();
    std::printf("%s\n", diag.dump(2).c_str());
    try {
      ctx.save("error.json", diag.dump(2) + "\n");
    } catch (const std::exception&) {
    }
    return 2;
  }
  return 0;
}
