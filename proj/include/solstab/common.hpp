#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace solstab {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

class solstab_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class parameter_error : public solstab_error {
 public:
  using solstab_error::solstab_error;
};

class numerical_error : public solstab_error {
 public:
  using solstab_error::solstab_error;
};

class splitting_error : public numerical_error {
 public:
  splitting_error(const std::string& msg, cplx root)
      : numerical_error(msg), offending_root(root) {}
  cplx offending_root;
};

int hardware_threads();

}  // namespace solstab
