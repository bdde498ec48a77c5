#include "fadediff/kernels.hpp"

// Reference kernels. These define the semantics the SIMD variants are
// tested against; keep them simple enough to audit by eye.

namespace fadediff::kernels::scalar {

void axpy(cplx* y, const cplx* x, cplx a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

cplx dotu(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br - ai * bi;
    im += ar * bi + ai * br;
  }
  return {re, im};
}

double sqdist(const cplx* a, const cplx* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dr = a[i].real() - b[i].real();
    const double di = a[i].imag() - b[i].imag();
    acc += dr * dr + di * di;
  }
  return acc;
}

double sqnorm(const cplx* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return acc;
}

}  // namespace fadediff::kernels::scalar
