#pragma once

#include <cstddef>

namespace oskit {

// Numerical policy shared by every module. All tolerances live here so a
// scenario can override them in one place; the defaults are tuned for
// desk-scale instances (total PSD dimension <= 400) in double precision.
struct Config {
  double feas_tol = 1e-8;   // verifier tolerance for constraint residuals
  double eig_tol = 1e-10;   // eigenvalue backward-error budget
  double gap_tol = 1e-7;    // primal/dual objective agreement for Optimal
  double cert_tol = 1e-8;   // max-certificate reconstruction residual
  double cond_floor = 1e-8; // smallest admissible eigenvalue in inverse roots
  int sdp_size_cap = 400;   // cap on the summed PSD block dimensions

  // Interior-point settings. The solver works to tighter tolerances than
  // the verifier so that verified margins clear feas_tol with room.
  double ipm_feastol = 1e-9;
  double ipm_abstol = 1e-9;
  double ipm_reltol = 1e-8;
  int ipm_maxiters = 100;
  double ipm_step = 0.99;

  // Slack (in units of the order unit) folded into Kirchberg certificates;
  // keeps the Arveson extension strictly interior without inflating the
  // reported unit shift delta.
  double kirchberg_slack_cap = 1e-7;

  // Levels at which complete-order checks run by default.
  int quotient_check_levels = 2;
};

inline const Config& default_config() {
  static const Config cfg;
  return cfg;
}

}  // namespace oskit
