#pragma once

#include <vector>

#include "solstab/common.hpp"

namespace solstab::fft {

// In-place transforms with the usual sign/normalization convention:
// forward is unnormalized, inverse carries the 1/n factor.
void forward(cplx* data, int n);
void inverse(cplx* data, int n);

// Row-major [n0][n1] two-dimensional transforms.
void forward2(cplx* data, int n0, int n1);
void inverse2(cplx* data, int n0, int n1);

// Angular frequencies 2*pi*m/(n*spacing) in standard FFT ordering.
std::vector<double> freq(int n, double spacing);

}  // namespace solstab::fft
