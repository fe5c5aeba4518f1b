#include "solstab/models.hpp"

#include <cmath>
#include <sstream>

#include "solstab/fft.hpp"

namespace solstab {

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

void check_keys(const std::map<std::string, double>& params,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : params) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) ok = true;
    }
    if (!ok) throw parameter_error("unknown parameter '" + key + "'");
    (void)value;
  }
}

int int_power(const std::map<std::string, double>& params, int dflt) {
  double p = dflt;
  if (auto it = params.find("p"); it != params.end()) p = it->second;
  const int ip = static_cast<int>(std::lround(p));
  if (std::abs(p - ip) > 1e-12 || ip < 2 || ip > 4) {
    throw parameter_error("nonlinearity power p must be an integer in [2, 4]");
  }
  return ip;
}

}  // namespace

// Spectral table for the nonlocal second component of the boussinesq
// profile, (1 + xi^2)^{-1/2} applied to q.
struct BouProfileTable {
  int n = 0;
  double half_length = 0.0;
  std::vector<cplx> coeff;

  double eval(double x) const {
    cplx acc(0.0, 0.0);
    const double base = 2.0 * pi / (2.0 * half_length);
    for (int m = 0; m < n; ++m) {
      const int mm = (m <= (n - 1) / 2) ? m : m - n;
      const double xi = base * mm;
      acc += coeff[static_cast<size_t>(m)] *
             std::polar(1.0, xi * (x + half_length));
    }
    return acc.real() / n;
  }
};

const std::vector<std::string>& Model::names() {
  static const std::vector<std::string> v = {"gkp1", "nls", "boussinesq",
                                             "zk", "kpbbm"};
  return v;
}

Model Model::make(const std::string& name,
                  const std::map<std::string, double>& params) {
  Model m;
  m.name_ = name;
  m.params_ = params;
  if (name == "gkp1") {
    check_keys(params, {"p"});
    m.id_ = ModelId::gkp1;
    m.d_ = 1;
    m.p_ = int_power(params, 2);
    m.params_["p"] = m.p_;
    m.w0_ = 0.5 * m.p_ * (m.p_ + 1);
    m.beta_ = 0.5 * (m.p_ - 1);
    m.alpha_ = m.p_ - 1.0;
    m.alpha_q_ = 1.0;
    m.k_excl_ = m.w0_;
    m.kmax_hint_ = 0.9;
  } else if (name == "nls") {
    check_keys(params, {});
    m.id_ = ModelId::nls;
    m.d_ = 2;
    m.p_ = 3;
    m.alpha_ = 2.0;
    m.alpha_q_ = 1.0;
    m.k_excl_ = std::sqrt(5.0);
    m.kmax_hint_ = 2.0;
  } else if (name == "boussinesq") {
    check_keys(params, {"c"});
    m.id_ = ModelId::boussinesq;
    m.d_ = 2;
    m.p_ = 2;
    m.c_ = 0.75;
    if (auto it = params.find("c"); it != params.end()) m.c_ = it->second;
    if (!(m.c_ > 0.0 && m.c_ < 1.0)) {
      throw parameter_error("boussinesq speed c must lie in (0, 1)");
    }
    m.params_["c"] = m.c_;
    m.w0_ = 3.0 * (1.0 - m.c_ * m.c_);
    m.beta_ = 0.5 * std::sqrt(1.0 - m.c_ * m.c_);
    m.alpha_ = std::sqrt(1.0 - m.c_ * m.c_);
    m.alpha_q_ = m.alpha_;
    {
      const double root = 0.5 * (m.c_ + std::sqrt(m.c_ * m.c_ + 4.0 * m.w0_));
      m.k_excl_ = 0.5 * (root * root - 1.0);
    }
    m.kmax_hint_ = 0.3;
    {
      const int n = 4096;
      const double half = 80.0;
      const double h = 2.0 * half / n;
      std::vector<cplx> g(static_cast<size_t>(n));
      const double amp = 1.5 * (1.0 - m.c_ * m.c_);
      for (int j = 0; j < n; ++j) {
        const double x = -half + h * j;
        const double s = sech(m.beta_ * x);
        g[static_cast<size_t>(j)] = amp * s * s;
      }
      fft::forward(g.data(), n);
      const auto xi = fft::freq(n, h);
      for (int j = 0; j < n; ++j) {
        g[static_cast<size_t>(j)] /=
            std::sqrt(1.0 + xi[static_cast<size_t>(j)] * xi[static_cast<size_t>(j)]);
      }
      auto table = std::make_shared<BouProfileTable>();
      table->n = n;
      table->half_length = half;
      table->coeff = std::move(g);
      m.bou_table_ = std::move(table);
    }
  } else if (name == "zk") {
    check_keys(params, {});
    m.id_ = ModelId::zk;
    m.d_ = 1;
    m.p_ = 2;
    m.w0_ = 3.0;
    m.beta_ = 0.5;
    m.alpha_ = 1.0;
    m.alpha_q_ = 1.0;
    m.k_excl_ = std::sqrt(2.0);
    m.kmax_hint_ = 1.3;
  } else if (name == "kpbbm") {
    check_keys(params, {"p", "c"});
    m.id_ = ModelId::kpbbm;
    m.d_ = 1;
    m.p_ = int_power(params, 2);
    m.c_ = 2.0;
    if (auto it = params.find("c"); it != params.end()) m.c_ = it->second;
    if (!(m.c_ > 1.0)) throw parameter_error("kpbbm speed c must exceed 1");
    m.params_["p"] = m.p_;
    m.params_["c"] = m.c_;
    const double gamma = std::sqrt(1.0 - 1.0 / m.c_);
    m.w0_ = 0.5 * m.p_ * (m.p_ + 1) * (m.c_ - 1.0);
    m.beta_ = 0.5 * (m.p_ - 1) * gamma;
    m.alpha_ = (m.p_ - 1) * gamma;
    m.alpha_q_ = gamma;
    m.k_excl_ = std::max(0.0, m.w0_ - (m.c_ - 1.0)) / (2.0 * std::sqrt(m.c_));
    m.kmax_hint_ = 0.45;
  } else {
    throw parameter_error("unknown model '" + name + "'");
  }
  return m;
}

bool Model::has_reduced_branch() const {
  return id_ == ModelId::gkp1 || id_ == ModelId::kpbbm;
}

bool Model::simulatable() const {
  return id_ == ModelId::gkp1 || id_ == ModelId::zk || id_ == ModelId::nls;
}

bool Model::corrector_supported() const {
  return id_ == ModelId::gkp1 || id_ == ModelId::zk;
}

int Model::ode_dim(double k) const {
  if (k == 0.0 && has_reduced_branch()) return 3;
  switch (id_) {
    case ModelId::gkp1:
    case ModelId::boussinesq:
    case ModelId::kpbbm:
    case ModelId::nls:
      return 4;
    case ModelId::zk:
      return 3;
  }
  return 0;
}

RVec Model::profile(double x) const {
  RVec q(d_);
  switch (id_) {
    case ModelId::gkp1: {
      const double b = 0.5 * (p_ - 1);
      const double amp = std::pow(0.5 * (p_ + 1), 1.0 / (p_ - 1));
      q(0) = amp * std::pow(sech(b * x), 2.0 / (p_ - 1));
      break;
    }
    case ModelId::nls:
      q(0) = std::sqrt(2.0) * sech(x);
      q(1) = 0.0;
      break;
    case ModelId::boussinesq: {
      const double s = sech(beta_ * x);
      q(0) = 1.5 * (1.0 - c_ * c_) * s * s;
      q(1) = -c_ * bou_table_->eval(x);
      break;
    }
    case ModelId::zk: {
      const double s = sech(0.5 * x);
      q(0) = 1.5 * s * s;
      break;
    }
    case ModelId::kpbbm: {
      const double gamma = std::sqrt(1.0 - 1.0 / c_);
      const double b = 0.5 * (p_ - 1);
      const double amp = std::pow(0.5 * (p_ + 1) * (c_ - 1.0), 1.0 / (p_ - 1));
      q(0) = amp * std::pow(sech(b * gamma * x), 2.0 / (p_ - 1));
      break;
    }
  }
  return q;
}

double Model::profile_derivative(double x) const {
  switch (id_) {
    case ModelId::gkp1:
      return -std::tanh(0.5 * (p_ - 1) * x) * profile(x)(0);
    case ModelId::nls:
      return -std::tanh(x) * std::sqrt(2.0) * sech(x);
    case ModelId::boussinesq:
      return -2.0 * beta_ * std::tanh(beta_ * x) * profile(x)(0);
    case ModelId::zk:
      return -std::tanh(0.5 * x) * profile(x)(0);
    case ModelId::kpbbm: {
      const double gamma = std::sqrt(1.0 - 1.0 / c_);
      return -gamma * std::tanh(0.5 * (p_ - 1) * gamma * x) * profile(x)(0);
    }
  }
  return 0.0;
}

std::array<double, 3> Model::potential(double x) const {
  if (id_ == ModelId::nls) {
    throw parameter_error("nls has a matrix potential; use potential_matrix");
  }
  const double s = sech(beta_ * x);
  const double t = std::tanh(beta_ * x);
  const double w = w0_ * s * s;
  const double wp = -2.0 * beta_ * w0_ * s * s * t;
  const double wpp = -2.0 * beta_ * beta_ * w0_ * s * s * (s * s - 2.0 * t * t);
  return {w, wp, wpp};
}

Mat Model::ode_matrix(double x, cplx sigma, double k) const {
  if (k == 0.0 && has_reduced_branch()) {
    const auto [w, wp, wpp] = potential(x);
    Mat a = Mat::Zero(3, 3);
    a(0, 1) = 1.0;
    a(1, 2) = 1.0;
    if (id_ == ModelId::gkp1) {
      a(2, 0) = -sigma - wp;
      a(2, 1) = 1.0 - w;
    } else {
      a(2, 0) = (-sigma - wp) / c_;
      a(2, 1) = (c_ - 1.0 - w) / c_;
      a(2, 2) = sigma / c_;
    }
    (void)wpp;
    return a;
  }
  return ode_matrix_full(x, sigma, k);
}

Mat Model::ode_matrix_full(double x, cplx sigma, double k) const {
  const double k2 = k * k;
  switch (id_) {
    case ModelId::gkp1: {
      const auto [w, wp, wpp] = potential(x);
      Mat a = Mat::Zero(4, 4);
      a(0, 1) = 1.0;
      a(1, 2) = 1.0;
      a(2, 3) = 1.0;
      a(3, 0) = -k2 - wpp;
      a(3, 1) = -sigma - 2.0 * wp;
      a(3, 2) = 1.0 - w;
      return a;
    }
    case ModelId::nls: {
      const double q = profile(x)(0);
      Mat a = Mat::Zero(4, 4);
      a(0, 2) = 1.0;
      a(1, 3) = 1.0;
      a(2, 0) = k2 + 1.0 - 3.0 * q * q;
      a(2, 1) = sigma;
      a(3, 0) = -sigma;
      a(3, 1) = k2 + 1.0 - q * q;
      return a;
    }
    case ModelId::boussinesq: {
      const auto [w, wp, wpp] = potential(x);
      Mat a = Mat::Zero(4, 4);
      a(0, 1) = 1.0;
      a(1, 2) = 1.0;
      a(2, 3) = 1.0;
      a(3, 0) = -k2 - sigma * sigma - wpp;
      a(3, 1) = 2.0 * c_ * sigma - 2.0 * wp;
      a(3, 2) = 1.0 - c_ * c_ - w;
      return a;
    }
    case ModelId::zk: {
      const auto [w, wp, wpp] = potential(x);
      (void)wpp;
      Mat a = Mat::Zero(3, 3);
      a(0, 1) = 1.0;
      a(1, 2) = 1.0;
      a(2, 0) = -sigma - wp;
      a(2, 1) = 1.0 + k2 - w;
      return a;
    }
    case ModelId::kpbbm: {
      const auto [w, wp, wpp] = potential(x);
      Mat a = Mat::Zero(4, 4);
      a(0, 1) = 1.0;
      a(1, 2) = 1.0;
      a(2, 3) = 1.0;
      a(3, 0) = (-k2 - wpp) / c_;
      a(3, 1) = (-sigma - 2.0 * wp) / c_;
      a(3, 2) = (c_ - 1.0 - w) / c_;
      a(3, 3) = sigma / c_;
      return a;
    }
  }
  return {};
}

Mat Model::ode_matrix_freestream(cplx sigma, double k) const {
  if (k == 0.0 && has_reduced_branch()) {
    Mat a = Mat::Zero(3, 3);
    a(0, 1) = 1.0;
    a(1, 2) = 1.0;
    if (id_ == ModelId::gkp1) {
      a(2, 0) = -sigma;
      a(2, 1) = 1.0;
    } else {
      a(2, 0) = -sigma / c_;
      a(2, 1) = (c_ - 1.0) / c_;
      a(2, 2) = sigma / c_;
    }
    return a;
  }
  return ode_matrix_full_freestream(sigma, k);
}

Mat Model::ode_matrix_full_freestream(cplx sigma, double k) const {
  const double k2 = k * k;
  switch (id_) {
    case ModelId::gkp1: {
      Mat a = Mat::Zero(4, 4);
      a(0, 1) = 1.0;
      a(1, 2) = 1.0;
      a(2, 3) = 1.0;
      a(3, 0) = -k2;
      a(3, 1) = -sigma;
      a(3, 2) = 1.0;
      return a;
    }
    case ModelId::nls: {
      Mat a = Mat::Zero(4, 4);
      a(0, 2) = 1.0;
      a(1, 3) = 1.0;
      a(2, 0) = k2 + 1.0;
      a(2, 1) = sigma;
      a(3, 0) = -sigma;
      a(3, 1) = k2 + 1.0;
      return a;
    }
    case ModelId::boussinesq: {
      Mat a = Mat::Zero(4, 4);
      a(0, 1) = 1.0;
      a(1, 2) = 1.0;
      a(2, 3) = 1.0;
      a(3, 0) = -k2 - sigma * sigma;
      a(3, 1) = 2.0 * c_ * sigma;
      a(3, 2) = 1.0 - c_ * c_;
      return a;
    }
    case ModelId::zk: {
      Mat a = Mat::Zero(3, 3);
      a(0, 1) = 1.0;
      a(1, 2) = 1.0;
      a(2, 0) = -sigma;
      a(2, 1) = 1.0 + k2;
      return a;
    }
    case ModelId::kpbbm: {
      Mat a = Mat::Zero(4, 4);
      a(0, 1) = 1.0;
      a(1, 2) = 1.0;
      a(2, 3) = 1.0;
      a(3, 0) = -k2 / c_;
      a(3, 1) = -sigma / c_;
      a(3, 2) = (c_ - 1.0) / c_;
      a(3, 3) = sigma / c_;
      return a;
    }
  }
  return {};
}

std::vector<cplx> Model::char_poly(cplx sigma, double k) const {
  if (k == 0.0 && has_reduced_branch()) {
    if (id_ == ModelId::gkp1) return {1.0, 0.0, -1.0, sigma};
    return {c_, -sigma, -(c_ - 1.0), sigma};
  }
  return char_poly_full(sigma, k);
}

std::vector<cplx> Model::char_poly_full(cplx sigma, double k) const {
  const double k2 = k * k;
  switch (id_) {
    case ModelId::gkp1:
      return {1.0, 0.0, -1.0, sigma, k2};
    case ModelId::nls:
      return {1.0, 0.0, -2.0 * (k2 + 1.0), 0.0,
              (k2 + 1.0) * (k2 + 1.0) + sigma * sigma};
    case ModelId::boussinesq:
      return {1.0, 0.0, -(1.0 - c_ * c_), -2.0 * c_ * sigma,
              k2 + sigma * sigma};
    case ModelId::zk:
      return {1.0, 0.0, -(1.0 + k2), sigma};
    case ModelId::kpbbm:
      return {c_, -sigma, -(c_ - 1.0), sigma, k2};
  }
  return {};
}

std::string Model::ode_source_map() const {
  std::ostringstream os;
  switch (id_) {
    case ModelId::gkp1:
      os << R"j({"pencil":"sigma u = dx(L(k) u)","variables":"(u, u', u'', u''')",)j"
         << R"j("reduction":"dx","reduction_at_k0":"Id","reduced_variables":"(u, u', u'')"})j";
      break;
    case ModelId::nls:
      os << R"j({"pencil":"sigma (u1, u2) = (L2(k) u2, -L1(k) u1)",)j"
         << R"j("variables":"(u1, u2, u1', u2')","reduction":"Id"})j";
      break;
    case ModelId::boussinesq:
      os << R"j({"pencil":"sigma (u1, u2) = J (L(k) + S(k)) (u1, u2)",)j"
         << R"j("variables":"(u1, u1', u1'', u1''')",)j"
         << R"j("reduction":"fourth order scalar form in u1",)j"
         << R"j("u2_recovery":"u2 = (sigma - c dx)^{-1} (dx B(ik)^{1/2} - 2 G q) u1"})j";
      break;
    case ModelId::zk:
      os << R"j({"pencil":"sigma u = dx(L(k) u)","variables":"(u, u', u'')",)j"
         << R"j("reduction":"dx"})j";
      break;
    case ModelId::kpbbm:
      os << R"j({"pencil":"sigma (1 - dxx) u = dx(L(k) u)",)j"
         << R"j("variables":"(u, u', u'', u''')","reduction":"(1 - dxx)^{-1} dx",)j"
         << R"j("reduction_at_k0":"Id","reduced_variables":"(u, u', u'')"})j";
      break;
  }
  return os.str();
}

Mat Model::j_symbol(double xi, double k) const {
  switch (id_) {
    case ModelId::gkp1:
    case ModelId::zk: {
      Mat j(1, 1);
      j(0, 0) = cplx(0.0, xi);
      return j;
    }
    case ModelId::nls: {
      Mat j = Mat::Zero(2, 2);
      j(0, 1) = 1.0;
      j(1, 0) = -1.0;
      return j;
    }
    case ModelId::boussinesq: {
      Mat j = Mat::Zero(2, 2);
      if (xi != 0.0) {
        const double b = 1.0 + xi * xi + k * k / (xi * xi);
        j(0, 1) = cplx(0.0, xi / std::sqrt(b));
        j(1, 0) = cplx(0.0, xi / std::sqrt(b));
      }
      return j;
    }
    case ModelId::kpbbm: {
      Mat j(1, 1);
      j(0, 0) = cplx(0.0, xi / (1.0 + xi * xi));
      return j;
    }
  }
  return {};
}

Mat Model::s_symbol(double xi, double k) const {
  switch (id_) {
    case ModelId::gkp1:
    case ModelId::kpbbm: {
      Mat s(1, 1);
      s(0, 0) = (xi == 0.0) ? 0.0 : k * k / (xi * xi);
      return s;
    }
    case ModelId::nls:
      return (k * k) * Mat::Identity(2, 2);
    case ModelId::zk: {
      Mat s(1, 1);
      s(0, 0) = k * k;
      return s;
    }
    case ModelId::boussinesq: {
      Mat s = Mat::Zero(2, 2);
      if (xi != 0.0) {
        const double b0 = 1.0 + xi * xi;
        const double b = b0 + k * k / (xi * xi);
        s(0, 0) = b - b0;
        s(1, 1) = b - b0;
        s(0, 1) = c_ * (std::sqrt(b) - std::sqrt(b0));
        s(1, 0) = s(0, 1);
      }
      return s;
    }
  }
  return {};
}

Mat Model::l0_symbol(double xi) const {
  switch (id_) {
    case ModelId::gkp1:
    case ModelId::zk: {
      Mat l(1, 1);
      l(0, 0) = xi * xi + 1.0;
      return l;
    }
    case ModelId::nls:
      return (xi * xi + 1.0) * Mat::Identity(2, 2);
    case ModelId::boussinesq: {
      const double b0 = 1.0 + xi * xi;
      Mat l(2, 2);
      l(0, 0) = b0;
      l(1, 1) = b0;
      l(0, 1) = c_ * std::sqrt(b0);
      l(1, 0) = c_ * std::sqrt(b0);
      return l;
    }
    case ModelId::kpbbm: {
      Mat l(1, 1);
      l(0, 0) = c_ * xi * xi + (c_ - 1.0);
      return l;
    }
  }
  return {};
}

RMat Model::potential_matrix(double x) const {
  switch (id_) {
    case ModelId::gkp1:
    case ModelId::kpbbm: {
      RMat r(1, 1);
      r(0, 0) = -potential(x)[0];
      return r;
    }
    case ModelId::nls: {
      const double q = std::sqrt(2.0) * sech(x);
      RMat r = RMat::Zero(2, 2);
      r(0, 0) = -3.0 * q * q;
      r(1, 1) = -q * q;
      return r;
    }
    case ModelId::zk: {
      RMat r(1, 1);
      r(0, 0) = -potential(x)[0];
      return r;
    }
    case ModelId::boussinesq: {
      RMat r = RMat::Zero(2, 2);
      r(0, 0) = -potential(x)[0];
      return r;
    }
  }
  return {};
}

}  // namespace solstab
