#pragma once

#include <optional>

#include "oskit/config.hpp"
#include "oskit/linalg.hpp"

namespace oskit {

struct EigPair {
  double value = 0.0;
  Vec vector;
};

// Smallest eigenvalue of a hermitian matrix together with an achieving
// eigenvector.
inline EigPair min_eigenvalue(const HermitianMatrix& h) {
  if (!all_finite(h.mat())) throw InvalidInput("non-finite entries");
  Eigen::SelfAdjointEigenSolver<Mat> es(h.mat());
  if (es.info() != Eigen::Success)
    throw NumericalBreakdown("hermitian eigendecomposition failed");
  EigPair p;
  p.value = es.eigenvalues()(0);
  p.vector = es.eigenvectors().col(0);
  return p;
}

enum class Membership { Member, NonMember, Unknown };

struct PsdVerdict {
  Membership status = Membership::Unknown;
  double margin = 0.0;            // smallest eigenvalue
  std::optional<Vec> witness;     // unit vector v with v*Hv = margin < -tol

  bool is_member() const { return status == Membership::Member; }
};

// PSD test with explicit witness on failure: Member iff lambda_min >= -tol.
inline PsdVerdict psd_check(const HermitianMatrix& h, double tol) {
  if (tol < 0) throw InvalidInput("psd_check: tol must be nonnegative");
  EigPair p = min_eigenvalue(h);
  PsdVerdict v;
  v.margin = p.value;
  if (p.value >= -tol) {
    v.status = Membership::Member;
  } else {
    v.status = Membership::NonMember;
    v.witness = p.vector;
  }
  return v;
}

inline PsdVerdict psd_check(const Mat& m, double tol) {
  return psd_check(HermitianMatrix::hermitize(m), tol);
}

// Standard real-symmetric doubling; every eigenvalue of the input appears
// twice in the output, and PSD verdicts agree exactly.
inline RMat complex_to_real(const HermitianMatrix& h) { return realify_herm(h.mat()); }

}  // namespace oskit
