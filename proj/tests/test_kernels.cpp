#include <random>
#include <vector>

#include "doctest.h"
#include "fadediff/kernels.hpp"

using namespace fadediff::kernels;

namespace {

std::vector<cplx> random_vec(std::mt19937_64& eng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {g(eng), g(eng)};
  return v;
}

}  // namespace

TEST_CASE("scalar and AVX2 kernels agree") {
  if (!avx2::supported()) {
    MESSAGE("AVX2 not available; equivalence covered by the scalar path alone");
    return;
  }
  std::mt19937_64 eng(7);
  // odd and even lengths, including the sub-vector-width tail
  for (std::size_t n : {1u, 2u, 3u, 7u, 16u, 33u, 400u}) {
    auto x = random_vec(eng, n);
    auto y = random_vec(eng, n);
    const cplx a{0.7, -1.3};

    auto y_ref = y;
    scalar::axpy(y_ref.data(), x.data(), a, n);
    auto y_simd = y;
    avx2::axpy(y_simd.data(), x.data(), a, n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(y_ref[i] - y_simd[i]) < 1e-12);
    }

    const cplx d_ref = scalar::dotu(x.data(), y.data(), n);
    const cplx d_simd = avx2::dotu(x.data(), y.data(), n);
    CHECK(std::abs(d_ref - d_simd) < 1e-10 * (1.0 + std::abs(d_ref)));

    CHECK(scalar::sqdist(x.data(), y.data(), n) ==
          doctest::Approx(avx2::sqdist(x.data(), y.data(), n)).epsilon(1e-12));
    CHECK(scalar::sqnorm(x.data(), n) ==
          doctest::Approx(avx2::sqnorm(x.data(), n)).epsilon(1e-12));
  }
}

TEST_CASE("dispatch table selects a working backend") {
  const Backend original = active_backend();
  REQUIRE(select(Backend::Scalar));
  std::vector<cplx> x{{1.0, 2.0}, {3.0, -1.0}};
  CHECK(sqnorm(x.data(), 2) == doctest::Approx(15.0));
  if (avx2::supported()) {
    REQUIRE(select(Backend::Avx2));
    CHECK(sqnorm(x.data(), 2) == doctest::Approx(15.0));
  }
  select(original);
}

TEST_CASE("matvec and matmul match a hand-rolled reference") {
  std::mt19937_64 eng(11);
  const std::size_t rows = 5, inner = 4, cols = 3;
  auto a = random_vec(eng, rows * inner);
  auto b = random_vec(eng, inner * cols);
  auto x = random_vec(eng, inner);

  std::vector<cplx> y(rows);
  matvec(y.data(), a.data(), x.data(), rows, inner);
  for (std::size_t r = 0; r < rows; ++r) {
    cplx ref{0.0, 0.0};
    for (std::size_t c = 0; c < inner; ++c) ref += a[r * inner + c] * x[c];
    CHECK(std::abs(y[r] - ref) < 1e-12);
  }

  std::vector<cplx> c(rows * cols);
  matmul(c.data(), a.data(), b.data(), rows, inner, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < cols; ++j) {
      cplx ref{0.0, 0.0};
      for (std::size_t l = 0; l < inner; ++l) ref += a[r * inner + l] * b[l * cols + j];
      CHECK(std::abs(c[r * cols + j] - ref) < 1e-12);
    }
}
