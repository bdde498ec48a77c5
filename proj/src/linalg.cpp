#include "fadediff/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace fadediff {

namespace {

using EigenCMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EigenMap = Eigen::Map<const EigenCMat>;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_partition(const CMat& a, BlockPartition p, const char* who) {
  if (p.block_size == 0 || a.rows() % p.block_size != 0 || a.cols() % p.block_size != 0) {
    throw std::invalid_argument(std::string(who) + ": dimensions not a multiple of block size");
  }
}

}  // namespace

CMat CMat::transpose() const {
  CMat t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

CMat CMat::conjugate() const {
  CMat t(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) t.data_[i] = std::conj(data_[i]);
  return t;
}

CMat CMat::adjoint() const { return conjugate().transpose(); }

double CMat::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool CMat::all_finite() const {
  for (const auto& v : data_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

CMat& CMat::operator+=(const CMat& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "CMat+=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

CMat& CMat::operator-=(const CMat& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "CMat-=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

CMat& CMat::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

CMat operator*(const CMat& a, const CMat& b) {
  require(a.cols() == b.rows(), "CMat*: inner dimension mismatch");
  CMat c(a.rows(), b.cols());
  kernels::matmul(c.data(), a.data(), b.data(), a.rows(), a.cols(), b.cols());
  return c;
}

std::vector<cplx> operator*(const CMat& a, const std::vector<cplx>& x) {
  require(a.cols() == x.size(), "CMat*vec: dimension mismatch");
  std::vector<cplx> y(a.rows());
  kernels::matvec(y.data(), a.data(), x.data(), a.rows(), a.cols());
  return y;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ia = 0; ia < a.rows(); ++ia)
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
      const cplx s = a(ia, ja);
      if (s == cplx{0.0, 0.0}) continue;
      for (std::size_t ib = 0; ib < b.rows(); ++ib) {
        cplx* dst = out.row(ia * b.rows() + ib) + ja * b.cols();
        const cplx* src = b.row(ib);
        for (std::size_t jb = 0; jb < b.cols(); ++jb) dst[jb] += s * src[jb];
      }
    }
  return out;
}

CMat block_kron(const CMat& a, const CMat& b, BlockPartition p) {
  check_partition(a, p, "block_kron");
  check_partition(b, p, "block_kron");
  const std::size_t m = p.block_size;
  const std::size_t pa = a.rows() / m, qa = a.cols() / m;
  const std::size_t pb = b.rows() / m, qb = b.cols() / m;
  CMat out(pa * pb * m * m, qa * qb * m * m);
  for (std::size_t j = 0; j < pa; ++j)
    for (std::size_t i = 0; i < pb; ++i)
      for (std::size_t l = 0; l < qa; ++l)
        for (std::size_t k = 0; k < qb; ++k) {
          const std::size_t br = (j * pb + i) * m * m;
          const std::size_t bc = (l * qb + k) * m * m;
          // block = A_{jl} (x) B_{ik}
          for (std::size_t r1 = 0; r1 < m; ++r1)
            for (std::size_t c1 = 0; c1 < m; ++c1) {
              const cplx s = a(j * m + r1, l * m + c1);
              if (s == cplx{0.0, 0.0}) continue;
              for (std::size_t r2 = 0; r2 < m; ++r2)
                for (std::size_t c2 = 0; c2 < m; ++c2) {
                  out(br + r1 * m + r2, bc + c1 * m + c2) = s * b(i * m + r2, k * m + c2);
                }
            }
        }
  return out;
}

std::vector<cplx> bvec(const CMat& a, BlockPartition p) {
  if (!a.square()) throw std::invalid_argument("bvec: matrix must be square");
  check_partition(a, p, "bvec");
  const std::size_t m = p.block_size;
  const std::size_t n = a.rows() / m;
  std::vector<cplx> v(a.rows() * a.cols());
  std::size_t pos = 0;
  for (std::size_t j = 0; j < n; ++j)      // block column
    for (std::size_t i = 0; i < n; ++i)    // block row
      for (std::size_t c = 0; c < m; ++c)  // vec() within the block: column-major
        for (std::size_t r = 0; r < m; ++r) v[pos++] = a(i * m + r, j * m + c);
  return v;
}

CMat bvec_inverse(const std::vector<cplx>& v, std::size_t n_blocks, BlockPartition p) {
  const std::size_t m = p.block_size;
  const std::size_t dim = n_blocks * m;
  if (v.size() != dim * dim) throw std::invalid_argument("bvec_inverse: length mismatch");
  CMat a(dim, dim);
  std::size_t pos = 0;
  for (std::size_t j = 0; j < n_blocks; ++j)
    for (std::size_t i = 0; i < n_blocks; ++i)
      for (std::size_t c = 0; c < m; ++c)
        for (std::size_t r = 0; r < m; ++r) a(i * m + r, j * m + c) = v[pos++];
  return a;
}

std::vector<cplx> eigenvalues(const CMat& a) {
  if (!a.square()) throw std::invalid_argument("eigenvalues: matrix must be square");
  EigenMap m(a.data(), a.rows(), a.cols());
  Eigen::ComplexEigenSolver<EigenCMat> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalues: eigensolver did not converge");
  }
  std::vector<cplx> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = solver.eigenvalues()(i);
  return out;
}

double spectral_radius(const CMat& a) {
  double rho = 0.0;
  for (const cplx& l : eigenvalues(a)) rho = std::max(rho, std::abs(l));
  return rho;
}

double block_maxnorm_diag_hermitian(const CMat& y, BlockPartition p, double tol) {
  if (!y.square()) throw std::invalid_argument("block_maxnorm_diag_hermitian: must be square");
  check_partition(y, p, "block_maxnorm_diag_hermitian");
  const std::size_t m = p.block_size;
  const std::size_t n = y.rows() / m;
  double best = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    Eigen::MatrixXcd blk(m, m);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) blk(r, c) = y(b * m + r, b * m + c);
    if ((blk - blk.adjoint()).cwiseAbs().maxCoeff() > tol) {
      throw std::invalid_argument("block_maxnorm_diag_hermitian: block is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blk, Eigen::EigenvaluesOnly);
    best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return best;
}

double block_maxnorm_bound(const CMat& a, BlockPartition p) {
  if (!a.square()) throw std::invalid_argument("block_maxnorm_bound: must be square");
  check_partition(a, p, "block_maxnorm_bound");
  const std::size_t m = p.block_size;
  const std::size_t n = a.rows() / m;
  double best = 0.0;
  for (std::size_t br = 0; br < n; ++br) {
    double row_sum = 0.0;
    for (std::size_t bc = 0; bc < n; ++bc) {
      Eigen::MatrixXcd blk(m, m);
      bool nonzero = false;
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) {
          blk(r, c) = a(br * m + r, bc * m + c);
          nonzero = nonzero || blk(r, c) != cplx{0.0, 0.0};
        }
      if (!nonzero) continue;
      // spectral norm = sqrt(lambda_max(B* B))
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blk.adjoint() * blk,
                                                         Eigen::EigenvaluesOnly);
      row_sum += std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    }
    best = std::max(best, row_sum);
  }
  return best;
}

std::vector<cplx> lu_solve(const CMat& a, const std::vector<cplx>& b, double* rcond) {
  if (!a.square() || a.rows() != b.size()) throw std::invalid_argument("lu_solve: shape mismatch");
  EigenMap m(a.data(), a.rows(), a.cols());
  Eigen::PartialPivLU<EigenCMat> lu(m);
  if (rcond) *rcond = lu.rcond();
  Eigen::Map<const Eigen::VectorXcd> rhs(b.data(), b.size());
  Eigen::VectorXcd x = lu.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return kernels::dotu(a.data(), b.data(), a.size());
}

double sqnorm(const std::vector<cplx>& a) { return kernels::sqnorm(a.data(), a.size()); }

}  // namespace fadediff
