#pragma once

#include <string>
#include <vector>

#include "oskit/config.hpp"
#include "oskit/linalg.hpp"

namespace oskit::detail {

// Dense cone LP in the standard form
//
//   minimize    c'x
//   subject to  A x = b
//               G x + s = h,   s in a product of real PSD cones
//
// solved by a Nesterov-Todd scaled primal-dual predictor-corrector on the
// homogeneous self-dual embedding, which detects infeasibility through the
// (tau, kappa) variables. s, z use svec coordinates blockwise.
struct ConeLP {
  RVec c;
  RMat A;   // may have 0 rows
  RVec b;
  RMat G;
  RVec h;
  std::vector<int> blocks;  // PSD block side lengths
};

enum class ConeLPStatus { Optimal, PrimalInfeasible, DualInfeasible, Unknown };

struct ConeLPResult {
  ConeLPStatus status = ConeLPStatus::Unknown;
  RVec x, y, z, s;
  double pobj = 0.0, dobj = 0.0;
  double gap = 0.0, pres = 0.0, dres = 0.0;
  int iterations = 0;
  bool breakdown = false;
  std::string message;
};

ConeLPResult solve_conelp(const ConeLP& prob, const Config& cfg);

}  // namespace oskit::detail
