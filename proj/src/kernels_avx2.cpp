#include "fadediff/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define FADEDIFF_HAVE_AVX2_TU 1
#endif

namespace fadediff::kernels::avx2 {

bool supported() {
#if defined(FADEDIFF_HAVE_AVX2_TU)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

#if defined(FADEDIFF_HAVE_AVX2_TU)

// A __m256d holds two interleaved complex<double> values (re0 im0 re1 im1).
// Complex product per lane pair:
//   re = ar*br - ai*bi,  im = ar*bi + ai*br
// done as fmaddsub(dup(ar), b, dup(ai)*swap(b)).
static inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d ar = _mm256_movedup_pd(a);
  const __m256d ai = _mm256_permute_pd(a, 0b1111);
  const __m256d bswap = _mm256_permute_pd(b, 0b0101);
  return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bswap));
}

void axpy(cplx* y, const cplx* x, cplx a, std::size_t n) {
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  const __m256d av = _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
  const __m256d ar = _mm256_movedup_pd(av);
  const __m256d ai = _mm256_permute_pd(av, 0b1111);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d xs = _mm256_permute_pd(xv, 0b0101);
    const __m256d prod = _mm256_fmaddsub_pd(ar, xv, _mm256_mul_pd(ai, xs));
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yp + 2 * i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

cplx dotu(const cplx* a, const cplx* b, std::size_t n) {
  const double* ap = reinterpret_cast<const double*>(a);
  const double* bp = reinterpret_cast<const double*>(b);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = _mm256_add_pd(acc, cmul(_mm256_loadu_pd(ap + 2 * i), _mm256_loadu_pd(bp + 2 * i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double re = lanes[0] + lanes[2];
  double im = lanes[1] + lanes[3];
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br - ai * bi;
    im += ar * bi + ai * br;
  }
  return {re, im};
}

double sqdist(const cplx* a, const cplx* b, std::size_t n) {
  const double* ap = reinterpret_cast<const double*>(a);
  const double* bp = reinterpret_cast<const double*>(b);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(ap + 2 * i), _mm256_loadu_pd(bp + 2 * i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) {
    const double dr = a[i].real() - b[i].real();
    const double di = a[i].imag() - b[i].imag();
    s += dr * dr + di * di;
  }
  return s;
}

double sqnorm(const cplx* a, std::size_t n) {
  const double* ap = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(ap + 2 * i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) {
    s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return s;
}

#else  // non-x86 build: fall through to the reference kernels

void axpy(cplx* y, const cplx* x, cplx a, std::size_t n) { scalar::axpy(y, x, a, n); }
cplx dotu(const cplx* a, const cplx* b, std::size_t n) { return scalar::dotu(a, b, n); }
double sqdist(const cplx* a, const cplx* b, std::size_t n) { return scalar::sqdist(a, b, n); }
double sqnorm(const cplx* a, std::size_t n) { return scalar::sqnorm(a, n); }

#endif

}  // namespace fadediff::kernels::avx2
