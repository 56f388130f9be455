#pragma once

#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "oskit/errors.hpp"

namespace oskit {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline bool all_finite(const Mat& m) { return m.allFinite(); }

inline double herm_defect(const Mat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double mat_scale(const Mat& m) {
  double s = m.cwiseAbs().maxCoeff();
  return s > 1.0 ? s : 1.0;
}

// Hermitian matrix with structural (not tolerance-based) symmetry: the
// constructor canonicalizes (m + m*)/2 after rejecting anything that is not
// hermitian up to representation round-off.
class HermitianMatrix {
public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(const Mat& m) {
    if (m.rows() != m.cols()) throw ShapeMismatch("hermitian matrix must be square");
    if (!all_finite(m)) throw InvalidInput("non-finite entries");
    if (herm_defect(m) > 1e-12 * mat_scale(m))
      throw InvalidInput("matrix is not hermitian");
    m_ = 0.5 * (m + m.adjoint());
  }

  static HermitianMatrix hermitize(const Mat& m) {
    if (m.rows() != m.cols()) throw ShapeMismatch("hermitian matrix must be square");
    if (!all_finite(m)) throw InvalidInput("non-finite entries");
    HermitianMatrix h;
    h.m_ = 0.5 * (m + m.adjoint());
    return h;
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& mat() const { return m_; }

private:
  Mat m_;
};

// Ordered block side lengths of a direct sum of matrix algebras.
struct BlockProfile {
  std::vector<int> blocks;

  BlockProfile() = default;
  BlockProfile(std::initializer_list<int> b) : blocks(b) { validate(); }
  explicit BlockProfile(std::vector<int> b) : blocks(std::move(b)) { validate(); }

  void validate() const {
    if (blocks.empty()) throw InvalidInput("block profile must be nonempty");
    for (int b : blocks)
      if (b <= 0) throw InvalidInput("block sides must be positive");
  }

  int dim() const { return std::accumulate(blocks.begin(), blocks.end(), 0); }
  int count() const { return static_cast<int>(blocks.size()); }

  int offset(int t) const {
    int o = 0;
    for (int i = 0; i < t; ++i) o += blocks[i];
    return o;
  }

  bool operator==(const BlockProfile& o) const { return blocks == o.blocks; }

  // Concatenation, e.g. the ambient of a direct sum of systems.
  BlockProfile concat(const BlockProfile& o) const {
    BlockProfile r = *this;
    r.blocks.insert(r.blocks.end(), o.blocks.begin(), o.blocks.end());
    return r;
  }
};

inline Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

// Permutes the tensor legs of a square matrix acting on V_1 (x) ... (x) V_k.
// perm[i] is the source leg placed at position i of the output.
inline Mat permute_tensor_legs(const Mat& m, const std::vector<int>& dims,
                               const std::vector<int>& perm) {
  const int k = static_cast<int>(dims.size());
  int total = 1;
  for (int d : dims) total *= d;
  if (m.rows() != total || m.cols() != total)
    throw ShapeMismatch("permute_tensor_legs: dimension mismatch");

  std::vector<int> out_dims(k);
  for (int i = 0; i < k; ++i) out_dims[i] = dims[perm[i]];

  // strides of the source index decomposition
  std::vector<int> stride(k, 1);
  for (int i = k - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  std::vector<int> map(total);
  std::vector<int> idx(k, 0);
  for (int src = 0; src < total; ++src) {
    int rem = src;
    for (int i = 0; i < k; ++i) {
      idx[i] = rem / stride[i];
      rem %= stride[i];
    }
    int dst = 0;
    for (int i = 0; i < k; ++i) dst = dst * out_dims[i] + idx[perm[i]];
    map[src] = dst;
  }

  Mat r(total, total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) r(map[i], map[j]) = m(i, j);
  return r;
}

// Partial trace over the first leg of a matrix on C^a (x) C^b.
inline Mat partial_trace_first(const Mat& m, int a, int b) {
  if (m.rows() != a * b || m.cols() != a * b)
    throw ShapeMismatch("partial_trace_first: dimension mismatch");
  Mat r = Mat::Zero(b, b);
  for (int i = 0; i < a; ++i) r += m.block(i * b, i * b, b, b);
  return r;
}

// Partial trace over the second leg.
inline Mat partial_trace_second(const Mat& m, int a, int b) {
  if (m.rows() != a * b || m.cols() != a * b)
    throw ShapeMismatch("partial_trace_second: dimension mismatch");
  Mat r = Mat::Zero(a, a);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) {
      cplx s = 0.0;
      for (int u = 0; u < b; ++u) s += m(i * b + u, j * b + u);
      r(i, j) = s;
    }
  return r;
}

// Real inner product on hermitian matrices: <A,B> = Re tr(A B).
inline double herm_inner(const Mat& a, const Mat& b) {
  return std::real((a * b).trace());
}

inline double frob_norm(const Mat& m) { return m.norm(); }

// Operator norm of a hermitian matrix.
inline double herm_op_norm(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// --- real symmetric svec coordinates ----------------------------------------
// svec stacks the lower triangle with off-diagonals scaled by sqrt(2), so
// that <A,B> = svec(A).svec(B).

inline int svec_dim(int n) { return n * (n + 1) / 2; }

inline RVec svec(const RMat& a) {
  const int n = static_cast<int>(a.rows());
  RVec v(svec_dim(n));
  int p = 0;
  const double s = std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    v(p++) = a(j, j);
    for (int i = j + 1; i < n; ++i) v(p++) = s * a(i, j);
  }
  return v;
}

inline RMat smat(const RVec& v, int n) {
  RMat a(n, n);
  int p = 0;
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    a(j, j) = v(p++);
    for (int i = j + 1; i < n; ++i) {
      a(i, j) = s * v(p);
      a(j, i) = s * v(p);
      ++p;
    }
  }
  return a;
}

// --- complex <-> real doubling ----------------------------------------------
// H = X + iY hermitian maps to [[X, -Y], [Y, X]] real symmetric; the
// spectrum doubles with multiplicity two.

inline RMat realify_herm(const Mat& h) {
  const int n = static_cast<int>(h.rows());
  RMat r(2 * n, 2 * n);
  RMat x = h.real();
  RMat y = h.imag();
  r.topLeftCorner(n, n) = x;
  r.topRightCorner(n, n) = -y;
  r.bottomLeftCorner(n, n) = y;
  r.bottomRightCorner(n, n) = x;
  return r;
}

// Inverse of the pairing: given real symmetric Z of doubled size, returns the
// complex hermitian Z_c with <A, Z_c>_C = <realify(A), Z>_R for hermitian A.
inline Mat complexify_dual(const RMat& z, int n) {
  if (z.rows() != 2 * n) throw ShapeMismatch("complexify_dual: size mismatch");
  RMat z11 = z.topLeftCorner(n, n);
  RMat z12 = z.topRightCorner(n, n);
  RMat z21 = z.bottomLeftCorner(n, n);
  RMat z22 = z.bottomRightCorner(n, n);
  Mat r = (z11 + z22).cast<cplx>() + cplx(0, 1) * (z21 - z12).cast<cplx>();
  return 0.5 * (r + r.adjoint());
}

inline bool is_effectively_real(const Mat& m, double tol = 1e-14) {
  return m.imag().cwiseAbs().maxCoeff() <= tol * mat_scale(m);
}

// Hermitian basis of M_n, orthonormal in the Frobenius inner product:
// E_ii, (E_ij + E_ji)/sqrt2, (iE_ij - iE_ji)/sqrt2.
inline std::vector<Mat> hermitian_basis(int n) {
  std::vector<Mat> out;
  out.reserve(n * n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    Mat e = Mat::Zero(n, n);
    e(i, i) = 1.0;
    out.push_back(e);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = s;
      e(j, i) = s;
      out.push_back(e);
      Mat f = Mat::Zero(n, n);
      f(i, j) = cplx(0, s);
      f(j, i) = cplx(0, -s);
      out.push_back(f);
    }
  return out;
}

// Block-diagonal ambient helpers.
inline Mat embed_block(const Mat& b, const BlockProfile& profile, int t) {
  Mat r = Mat::Zero(profile.dim(), profile.dim());
  const int o = profile.offset(t);
  r.block(o, o, profile.blocks[t], profile.blocks[t]) = b;
  return r;
}

inline Mat extract_block(const Mat& m, const BlockProfile& profile, int t) {
  const int o = profile.offset(t);
  return m.block(o, o, profile.blocks[t], profile.blocks[t]);
}

// Largest off-block magnitude; zero for matrices supported on the profile.
inline double off_block_defect(const Mat& m, const BlockProfile& profile) {
  Mat masked = m;
  for (int t = 0; t < profile.count(); ++t) {
    const int o = profile.offset(t);
    masked.block(o, o, profile.blocks[t], profile.blocks[t]).setZero();
  }
  return masked.cwiseAbs().maxCoeff();
}

// Hermitian basis of the full block-diagonal algebra of a profile.
inline std::vector<Mat> profile_hermitian_basis(const BlockProfile& profile) {
  std::vector<Mat> out;
  for (int t = 0; t < profile.count(); ++t)
    for (const Mat& b : hermitian_basis(profile.blocks[t]))
      out.push_back(embed_block(b, profile, t));
  return out;
}

}  // namespace oskit
