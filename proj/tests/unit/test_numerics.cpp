#include <doctest.h>

#include "oskit/eig.hpp"
#include "oskit/rng.hpp"
#include "oskit/sdp.hpp"

using namespace oskit;

namespace {

// Independent oracle for the smallest eigenvalue: bisection on the number of
// eigenvalues below lambda, counted through sign changes of the leading
// principal minors of H - lambda I (Sylvester / Jacobi). Shares nothing with
// the solver path, which uses a tridiagonal QR eigensolver.
int eigs_below(const Mat& h, double lambda) {
  const int n = static_cast<int>(h.rows());
  Mat shifted = h - lambda * Mat::Identity(n, n);
  int sign_changes = 0;
  double prev = 1.0;
  for (int k = 1; k <= n; ++k) {
    Mat minor = shifted.topLeftCorner(k, k);
    const double det = std::real(Eigen::PartialPivLU<Mat>(minor).determinant());
    if (det == 0.0) return -1;  // caller nudges lambda
    if ((det > 0) != (prev > 0)) ++sign_changes;
    prev = det;
  }
  return sign_changes;
}

double min_eig_bisection(const Mat& h) {
  const int n = static_cast<int>(h.rows());
  double bound = h.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  double lo = -bound, hi = bound;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    int cnt = eigs_below(h, mid);
    int tries = 0;
    while (cnt < 0 && tries++ < 8) {
      mid += 1e-13 * bound * (tries % 2 ? 1 : -1) * tries;
      cnt = eigs_below(h, mid);
    }
    if (cnt < 0) break;
    if (cnt >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("min_eigenvalue: identity and diagonal cases") {
  CHECK(min_eigenvalue(HermitianMatrix(Mat::Identity(3, 3))).value == doctest::Approx(1.0).epsilon(1e-14));
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -1.0;
  EigPair p = min_eigenvalue(HermitianMatrix(d));
  CHECK(p.value == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(p.vector(1)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("min_eigenvalue agrees with minor-sign bisection oracle") {
  Rng rng(20240811);
  for (int trial = 0; trial < 20; ++trial) {
    Mat h = rng.hermitian(6);
    EigPair p = min_eigenvalue(HermitianMatrix(h));
    const double oracle = min_eig_bisection(h);
    CHECK(std::abs(p.value - oracle) < 1e-10);
    // residual of the eigenpair
    CHECK((h * p.vector - p.value * p.vector).norm() < 1e-10 * (1 + herm_op_norm(h)));
  }
}

TEST_CASE("min_eigenvalue shift invariance") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Mat h = rng.hermitian(5);
    const double c = rng.uniform(-2.0, 2.0);
    const double a = min_eigenvalue(HermitianMatrix(h)).value;
    const double b =
        min_eigenvalue(HermitianMatrix(Mat(h + c * Mat::Identity(5, 5)))).value;
    CHECK(std::abs(b - (a + c)) < 1e-10);
  }
}

TEST_CASE("min_eigenvalue rejects non-finite input") {
  Mat h = Mat::Identity(2, 2);
  h(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(min_eigenvalue(HermitianMatrix::hermitize(h)), InvalidInput);
}

TEST_CASE("psd_check basic verdicts") {
  PsdVerdict v = psd_check(HermitianMatrix(Mat::Identity(2, 2)), 0.0);
  CHECK(v.is_member());
  CHECK(v.margin == doctest::Approx(1.0));

  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -0.5;
  PsdVerdict w = psd_check(HermitianMatrix(d), 1e-9);
  CHECK(!w.is_member());
  REQUIRE(w.witness.has_value());
  CHECK(std::abs((*w.witness)(1)) == doctest::Approx(1.0).epsilon(1e-12));
  // witness certifies the negative direction
  const double q = std::real((w.witness->adjoint() * d * *w.witness)(0, 0));
  CHECK(q == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("psd_check on rank-one Gram matrices") {
  Rng rng(99);
  for (int t = 0; t < 10; ++t) {
    Vec v = rng.unit_vector(4);
    Mat g = v * v.adjoint();
    PsdVerdict verdict = psd_check(HermitianMatrix::hermitize(g), 1e-10);
    CHECK(verdict.is_member());
    CHECK(std::abs(verdict.margin) < 1e-10);
  }
}

TEST_CASE("complex_to_real doubling") {
  // 1x1 real
  Mat c = Mat::Zero(1, 1);
  c(0, 0) = 3.5;
  RMat r = complex_to_real(HermitianMatrix(c));
  CHECK(r.rows() == 2);
  CHECK(r(0, 0) == 3.5);
  CHECK(r(1, 1) == 3.5);
  CHECK(r(0, 1) == 0.0);

  // identity doubles to identity
  RMat ri = complex_to_real(HermitianMatrix(Mat::Identity(3, 3)));
  CHECK((ri - RMat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);

  // off-diagonal i: eigenvalues {1,1,-1,-1}
  Mat h = Mat::Zero(2, 2);
  h(0, 1) = cplx(0, 1);
  h(1, 0) = cplx(0, -1);
  RMat rh = complex_to_real(HermitianMatrix(h));
  Eigen::SelfAdjointEigenSolver<RMat> es(rh);
  RVec ev = es.eigenvalues();
  CHECK(ev(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ev(1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ev(2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev(3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("complex_to_real preserves PSD verdicts") {
  Rng rng(5150);
  for (int t = 0; t < 25; ++t) {
    Mat h = rng.hermitian(4);
    if (t % 3 == 0) h = rng.psd(4);
    PsdVerdict a = psd_check(HermitianMatrix::hermitize(h), 1e-9);
    RMat dbl = complex_to_real(HermitianMatrix::hermitize(h));
    Eigen::SelfAdjointEigenSolver<RMat> es(dbl, Eigen::EigenvaluesOnly);
    const bool b = es.eigenvalues()(0) >= -1e-9;
    CHECK(a.is_member() == b);
  }
}

TEST_CASE("sdp_solve: minimize trace with X >= I") {
  SdpProblem p;
  int x = p.add_variable("X", BlockProfile{2});
  AffineExpr e = p.var_expr(x);
  e.constant -= Mat::Identity(2, 2);
  p.add_psd(e);  // X - I >= 0
  p.set_objective(p.pair_with(x, Mat::Identity(2, 2)));
  SdpOutcome o = p.solve();
  REQUIRE(o.status == SdpStatus::Optimal);
  CHECK(o.verified);
  CHECK(o.objective_value == doctest::Approx(2.0).epsilon(1e-6));
  CHECK((o.primal[0] - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("sdp_solve: trace -1 with X >= 0 is infeasible with certificate") {
  SdpProblem p;
  int x = p.add_variable("X", BlockProfile{2});
  p.add_psd(p.var_expr(x));
  p.add_equality(p.pair_with(x, Mat::Identity(2, 2)), -1.0);
  SdpOutcome o = p.solve();
  REQUIRE(o.status == SdpStatus::Infeasible);
  CHECK(o.verified);
  std::string why;
  CHECK(p.verify_infeasible(o, &why));
}

TEST_CASE("sdp_solve: construct-then-solve round trip stays feasible") {
  Rng rng(31337);
  for (int t = 0; t < 5; ++t) {
    SdpProblem p;
    int x = p.add_variable("X", BlockProfile{3});
    // sample an interior point and constrain a random functional through it
    Mat interior = rng.psd(3) + 0.5 * Mat::Identity(3, 3);
    Mat probe = rng.hermitian(3);
    p.add_psd(p.var_expr(x));
    p.add_equality(p.pair_with(x, probe), herm_inner(interior, probe));
    p.add_equality(p.pair_with(x, Mat::Identity(3, 3)),
                   std::real(interior.trace()));
    SdpOutcome o = p.solve();
    REQUIRE(o.is_feasible());
    CHECK(o.verified);
    CHECK(o.margin > 0.0);
  }
}

TEST_CASE("sdp_solve: duality sanity on a strictly feasible pair") {
  Rng rng(4242);
  SdpProblem p;
  int x = p.add_variable("X", BlockProfile{3});
  AffineExpr e = p.var_expr(x);
  e.constant -= Mat::Identity(3, 3);
  p.add_psd(e);
  Mat cost = rng.psd(3) + Mat::Identity(3, 3);
  p.set_objective(p.pair_with(x, cost));
  SdpOutcome o = p.solve();
  REQUIRE(o.status == SdpStatus::Optimal);
  // optimum of min <X,C> over X >= I is tr(C)
  CHECK(o.objective_value == doctest::Approx(std::real(cost.trace())).epsilon(1e-6));
}

TEST_CASE("sdp_solve: complex data goes through the doubling") {
  Rng rng(777);
  SdpProblem p;
  int x = p.add_variable("X", BlockProfile{2});
  Mat target = rng.psd(2) + 0.3 * Mat::Identity(2, 2);  // complex PSD
  AffineExpr e = p.var_expr(x);
  p.add_psd(e);
  // pin X = target through matrix equalities
  p.add_matrix_equality(p.var_expr(x), target);
  SdpOutcome o = p.solve();
  REQUIRE(o.is_feasible());
  CHECK((o.primal[0] - target).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("sdp_solve: size cap enforced") {
  SdpProblem p;
  int x = p.add_variable("X", BlockProfile{300});
  p.add_psd(p.var_expr(x));  // complex -> doubled to 600 > 400
  Mat probe = Mat::Zero(300, 300);
  probe(0, 1) = cplx(0, 1);
  probe(1, 0) = cplx(0, -1);
  AffineExpr e = p.var_expr(x);
  e.constant = probe;  // force complex path
  CHECK_THROWS_AS(p.solve(), SizeCapExceeded);
}
