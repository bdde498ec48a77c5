#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fadediff/kernels.hpp"

namespace fadediff {

using cplx = std::complex<double>;

// Dense row-major complex matrix. Sized for the analysis in this project
// ((N*M)^2 rows at most); multiplications run through the kernel layer,
// eigen/solver entry points are backed by a LAPACK-grade library behind
// this interface.
class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

  static CMat identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  cplx* row(std::size_t r) { return data_.data() + r * cols_; }
  const cplx* row(std::size_t r) const { return data_.data() + r * cols_; }

  CMat transpose() const;
  CMat conjugate() const;       // elementwise
  CMat adjoint() const;         // conjugate transpose
  double frobenius() const { return std::sqrt(kernels::sqnorm(data_.data(), data_.size())); }
  double max_abs() const;
  bool all_finite() const;

  CMat& operator+=(const CMat& o);
  CMat& operator-=(const CMat& o);
  CMat& operator*=(cplx s);
  friend CMat operator+(CMat a, const CMat& b) { return a += b; }
  friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
  friend CMat operator*(CMat a, cplx s) { return a *= s; }
  friend CMat operator*(cplx s, CMat a) { return a *= s; }

  friend CMat operator*(const CMat& a, const CMat& b);
  friend std::vector<cplx> operator*(const CMat& a, const std::vector<cplx>& x);

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cplx> data_;
};

// Block partition descriptor: the owning matrix is split into square
// blockSize x blockSize blocks. Dimensions must divide evenly.
struct BlockPartition {
  std::size_t block_size;
};

// Standard Kronecker product.
CMat kron(const CMat& a, const CMat& b);

// Block Kronecker product for matrices partitioned into M x M blocks.
//
// Index convention (the one property the analysis relies on):
//   bvec(A C B) = (B^T (x)_b A) bvec(C)
// which fixes the layout: for X with pX x qX blocks and Y with pY x qY
// blocks, (X (x)_b Y) consists of M^2 x M^2 blocks
//   (X (x)_b Y)[j*pY + i, l*qY + k] = X_{jl} (x) Y_{ik}.
// With M = 1 this reduces to the standard Kronecker product.
CMat block_kron(const CMat& a, const CMat& b, BlockPartition p);

// Block vectorization: stacks vec() of each M x M block, scanning the block
// grid column-major. With M = 1 this is standard column-major vec().
std::vector<cplx> bvec(const CMat& a, BlockPartition p);
// Inverse of bvec for a square block grid.
CMat bvec_inverse(const std::vector<cplx>& v, std::size_t n_blocks, BlockPartition p);

// Largest eigenvalue magnitude via a dense general eigensolver.
double spectral_radius(const CMat& a);
std::vector<cplx> eigenvalues(const CMat& a);

// Block maximum norm of a block-diagonal Hermitian matrix: equals its
// spectral radius (max over blocks of the block spectral radius). Each
// diagonal block is checked Hermitian within tol.
double block_maxnorm_diag_hermitian(const CMat& y, BlockPartition p, double tol = 1e-10);

// Upper bound on the induced block-infinity norm: max over block rows of
// the sum of block spectral norms in that row. Exact for block size 1.
double block_maxnorm_bound(const CMat& a, BlockPartition p);

// x = solve(A, b); also reports the reciprocal condition number estimate.
std::vector<cplx> lu_solve(const CMat& a, const std::vector<cplx>& b, double* rcond = nullptr);

// Convenience for the weighted-norm bookkeeping.
cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b);
double sqnorm(const std::vector<cplx>& a);

}  // namespace fadediff
