#include "solstab/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

namespace solstab::fft {

namespace {

struct Plan {
  fftw_plan plan = nullptr;
  fftw_complex* buf = nullptr;
  int size = 0;
};

std::mutex g_mutex;
std::map<std::tuple<int, int, int>, Plan> g_plans;

Plan& get_plan(int n0, int n1, int sign) {
  auto key = std::make_tuple(n0, n1, sign);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second;
  Plan p;
  p.size = n0 * n1;
  p.buf = fftw_alloc_complex(static_cast<size_t>(p.size));
  if (n1 == 1) {
    p.plan = fftw_plan_dft_1d(n0, p.buf, p.buf, sign, FFTW_ESTIMATE);
  } else {
    p.plan = fftw_plan_dft_2d(n0, n1, p.buf, p.buf, sign, FFTW_ESTIMATE);
  }
  return g_plans.emplace(key, p).first->second;
}

void run(cplx* data, int n0, int n1, int sign) {
  std::lock_guard<std::mutex> lock(g_mutex);
  Plan& p = get_plan(n0, n1, sign);
  std::memcpy(p.buf, data, sizeof(cplx) * static_cast<size_t>(p.size));
  fftw_execute(p.plan);
  std::memcpy(data, p.buf, sizeof(cplx) * static_cast<size_t>(p.size));
}

}  // namespace

void forward(cplx* data, int n) { run(data, n, 1, FFTW_FORWARD); }

void inverse(cplx* data, int n) {
  run(data, n, 1, FFTW_BACKWARD);
  const double inv = 1.0 / n;
  for (int i = 0; i < n; ++i) data[i] *= inv;
}

void forward2(cplx* data, int n0, int n1) { run(data, n0, n1, FFTW_FORWARD); }

void inverse2(cplx* data, int n0, int n1) {
  run(data, n0, n1, FFTW_BACKWARD);
  const double inv = 1.0 / (static_cast<double>(n0) * n1);
  for (int i = 0; i < n0 * n1; ++i) data[i] *= inv;
}

std::vector<double> freq(int n, double spacing) {
  std::vector<double> xi(static_cast<size_t>(n));
  const double unit = 2.0 * pi / (n * spacing);
  for (int m = 0; m < n; ++m) {
    const int mm = (m <= (n - 1) / 2) ? m : m - n;
    xi[static_cast<size_t>(m)] = unit * mm;
  }
  return xi;
}

}  // namespace solstab::fft
