#pragma once

#include <complex>
#include <cstddef>
#include <string>

// Hot complex-array primitives used by the dense linear algebra and the
// Monte Carlo reductions. Each operation has a scalar reference kernel and
// an AVX2/FMA variant; the active set is chosen once at startup from CPUID
// and can be overridden for testing. All arrays are interleaved
// std::complex<double> with no alignment requirement.

namespace fadediff::kernels {

using cplx = std::complex<double>;

enum class Backend { Scalar, Avx2 };

// y[0..n) += a * x[0..n)
using AxpyFn = void (*)(cplx* y, const cplx* x, cplx a, std::size_t n);
// sum_i a[i] * b[i]  (unconjugated)
using DotuFn = cplx (*)(const cplx* a, const cplx* b, std::size_t n);
// sum_i |a[i] - b[i]|^2
using SqDistFn = double (*)(const cplx* a, const cplx* b, std::size_t n);
// sum_i |a[i]|^2
using SqNormFn = double (*)(const cplx* a, std::size_t n);

struct Ops {
  AxpyFn axpy;
  DotuFn dotu;
  SqDistFn sqdist;
  SqNormFn sqnorm;
};

namespace scalar {
void axpy(cplx* y, const cplx* x, cplx a, std::size_t n);
cplx dotu(const cplx* a, const cplx* b, std::size_t n);
double sqdist(const cplx* a, const cplx* b, std::size_t n);
double sqnorm(const cplx* a, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool supported();
void axpy(cplx* y, const cplx* x, cplx a, std::size_t n);
cplx dotu(const cplx* a, const cplx* b, std::size_t n);
double sqdist(const cplx* a, const cplx* b, std::size_t n);
double sqnorm(const cplx* a, std::size_t n);
}  // namespace avx2

// Active kernel table. Initialized from CPUID on first use.
const Ops& active();
Backend active_backend();
std::string backend_name();
// Force a backend (no-op request to Avx2 on hardware without it returns
// false and leaves the scalar table active). Intended for tests.
bool select(Backend b);

inline void axpy(cplx* y, const cplx* x, cplx a, std::size_t n) { active().axpy(y, x, a, n); }
inline cplx dotu(const cplx* a, const cplx* b, std::size_t n) { return active().dotu(a, b, n); }
inline double sqdist(const cplx* a, const cplx* b, std::size_t n) { return active().sqdist(a, b, n); }
inline double sqnorm(const cplx* a, std::size_t n) { return active().sqnorm(a, n); }

// Row-major dense helpers built on the dispatched primitives.
// y = A x (rows x cols), y must not alias x.
void matvec(cplx* y, const cplx* A, const cplx* x, std::size_t rows, std::size_t cols);
// C = A B with A rows x inner, B inner x cols, all row-major. C zeroed first.
void matmul(cplx* C, const cplx* A, const cplx* B, std::size_t rows, std::size_t inner,
            std::size_t cols);

}  // namespace fadediff::kernels
