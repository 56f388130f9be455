#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oskit/config.hpp"
#include "oskit/eig.hpp"
#include "oskit/linalg.hpp"

namespace oskit {

// Hermitian affine expression in the problem's variables. Coefficients are
// stored per real parameter of the hermitian variables (parameters index an
// orthonormal hermitian basis of each variable's block profile).
struct AffineExpr {
  int dim = 0;
  Mat constant;                             // dim x dim hermitian
  std::vector<std::pair<int, Mat>> coeffs;  // (global param, hermitian matrix)

  explicit AffineExpr(int d) : dim(d), constant(Mat::Zero(d, d)) {}
};

struct LinFunctional {
  std::vector<std::pair<int, double>> coeffs;
  void add(int param, double c) {
    if (c != 0.0) coeffs.emplace_back(param, c);
  }
};

enum class SdpStatus { Optimal, Feasible, Infeasible, Marginal };

struct SdpOutcome {
  SdpStatus status = SdpStatus::Marginal;
  std::vector<Mat> primal;    // per variable, full block-diagonal matrix
  std::vector<Mat> dual_psd;  // per PSD constraint, hermitian (Infeasible)
  RVec dual_eq;               // per equality row (Infeasible)
  double objective_value = 0.0;
  double margin = 0.0;  // smallest eigenvalue slack across PSD constraints
  int iterations = 0;
  bool verified = false;
  std::string message;

  bool is_feasible() const {
    return status == SdpStatus::Optimal || status == SdpStatus::Feasible;
  }
};

// Block-structured semidefinite feasibility / optimization instance.
// Hermitian data is solved through the real-symmetric doubling; purely real
// constraints skip the doubling.
class SdpProblem {
public:
  explicit SdpProblem(const Config& cfg = default_config()) : cfg_(cfg) {}

  int add_variable(const std::string& name, const BlockProfile& profile);

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_params() const { return total_params_; }
  const BlockProfile& profile(int var) const { return vars_[var].profile; }
  const std::vector<Mat>& param_basis(int var) const { return vars_[var].basis; }

  AffineExpr zero_expr(int dim) const { return AffineExpr(dim); }
  // expression terms: F maps each parameter basis matrix of `var` to its
  // coefficient in the expression
  void add_term(AffineExpr& e, int var, const std::function<Mat(const Mat&)>& F) const;
  AffineExpr var_expr(int var) const;  // the variable itself

  LinFunctional pair_with(int var, const Mat& m) const;  // u -> <x_var, m>

  void add_psd(const AffineExpr& e);
  void add_equality(const LinFunctional& f, double rhs);
  // entrywise equality of a hermitian expression with a hermitian constant
  void add_matrix_equality(const AffineExpr& e, const Mat& rhs);
  void set_objective(const LinFunctional& f);  // minimized

  int num_psd_constraints() const { return static_cast<int>(psd_.size()); }
  int num_equalities() const { return static_cast<int>(eq_rows_.size()); }

  Mat eval_expr(const AffineExpr& e, const RVec& params) const;
  Mat value_of(int var, const RVec& params) const;

  SdpOutcome solve() const;

  // Substitution-based checks sharing no code with the solver iteration.
  bool verify_feasible(const SdpOutcome& o, std::string* why = nullptr) const;
  bool verify_infeasible(const SdpOutcome& o, std::string* why = nullptr) const;

  const Config& config() const { return cfg_; }

private:
  struct Variable {
    std::string name;
    BlockProfile profile;
    std::vector<Mat> basis;  // orthonormal hermitian basis, block embedded
    int offset = 0;
  };

  struct EqRow {
    LinFunctional f;
    double rhs;
  };

  RVec params_of(const std::vector<Mat>& values) const;

  Config cfg_;
  std::vector<Variable> vars_;
  std::vector<AffineExpr> psd_;
  std::vector<EqRow> eq_rows_;
  std::optional<LinFunctional> objective_;
  int total_params_ = 0;
};

}  // namespace oskit
