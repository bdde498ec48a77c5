#include "fadediff/kernels.hpp"

#include <cstring>

namespace fadediff::kernels {

namespace {

const Ops kScalarOps{scalar::axpy, scalar::dotu, scalar::sqdist, scalar::sqnorm};
const Ops kAvx2Ops{avx2::axpy, avx2::dotu, avx2::sqdist, avx2::sqnorm};

struct State {
  const Ops* ops;
  Backend backend;
  State() {
    if (avx2::supported()) {
      ops = &kAvx2Ops;
      backend = Backend::Avx2;
    } else {
      ops = &kScalarOps;
      backend = Backend::Scalar;
    }
  }
};

State& state() {
  static State s;
  return s;
}

}  // namespace

const Ops& active() { return *state().ops; }

Backend active_backend() { return state().backend; }

std::string backend_name() {
  return state().backend == Backend::Avx2 ? "avx2" : "scalar";
}

bool select(Backend b) {
  if (b == Backend::Avx2) {
    if (!avx2::supported()) return false;
    state().ops = &kAvx2Ops;
    state().backend = Backend::Avx2;
    return true;
  }
  state().ops = &kScalarOps;
  state().backend = Backend::Scalar;
  return true;
}

void matvec(cplx* y, const cplx* A, const cplx* x, std::size_t rows, std::size_t cols) {
  const Ops& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = k.dotu(A + r * cols, x, cols);
  }
}

void matmul(cplx* C, const cplx* A, const cplx* B, std::size_t rows, std::size_t inner,
            std::size_t cols) {
  std::memset(C, 0, rows * cols * sizeof(cplx));
  const Ops& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    cplx* crow = C + r * cols;
    const cplx* arow = A + r * inner;
    for (std::size_t l = 0; l < inner; ++l) {
      if (arow[l] != cplx{0.0, 0.0}) {
        k.axpy(crow, B + l * cols, arow[l], cols);
      }
    }
  }
}

}  // namespace fadediff::kernels
