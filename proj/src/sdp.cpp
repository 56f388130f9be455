#include "oskit/sdp.hpp"

#include <sstream>

#include "oskit/conelp.hpp"

namespace oskit {

int SdpProblem::add_variable(const std::string& name, const BlockProfile& profile) {
  Variable v;
  v.name = name;
  v.profile = profile;
  v.basis = profile_hermitian_basis(profile);
  v.offset = total_params_;
  total_params_ += static_cast<int>(v.basis.size());
  vars_.push_back(std::move(v));
  return static_cast<int>(vars_.size()) - 1;
}

void SdpProblem::add_term(AffineExpr& e, int var,
                          const std::function<Mat(const Mat&)>& F) const {
  const Variable& v = vars_.at(var);
  for (int p = 0; p < static_cast<int>(v.basis.size()); ++p) {
    Mat m = F(v.basis[p]);
    if (m.rows() != e.dim || m.cols() != e.dim)
      throw ShapeMismatch("add_term: coefficient dimension mismatch");
    if (m.cwiseAbs().maxCoeff() > 0) e.coeffs.emplace_back(v.offset + p, m);
  }
}

AffineExpr SdpProblem::var_expr(int var) const {
  const Variable& v = vars_.at(var);
  AffineExpr e(v.profile.dim());
  add_term(e, var, [](const Mat& b) { return b; });
  return e;
}

LinFunctional SdpProblem::pair_with(int var, const Mat& m) const {
  const Variable& v = vars_.at(var);
  LinFunctional f;
  for (int p = 0; p < static_cast<int>(v.basis.size()); ++p)
    f.add(v.offset + p, herm_inner(v.basis[p], m));
  return f;
}

void SdpProblem::add_psd(const AffineExpr& e) {
  if (herm_defect(e.constant) > 1e-10 * mat_scale(e.constant))
    throw InvalidInput("PSD constraint constant must be hermitian");
  psd_.push_back(e);
}

void SdpProblem::add_equality(const LinFunctional& f, double rhs) {
  eq_rows_.push_back({f, rhs});
}

void SdpProblem::add_matrix_equality(const AffineExpr& e, const Mat& rhs) {
  if (rhs.rows() != e.dim || rhs.cols() != e.dim)
    throw ShapeMismatch("add_matrix_equality: dimension mismatch");
  for (const Mat& theta : hermitian_basis(e.dim)) {
    LinFunctional f;
    for (const auto& [p, m] : e.coeffs) f.add(p, herm_inner(m, theta));
    add_equality(f, herm_inner(rhs - e.constant, theta));
  }
}

void SdpProblem::set_objective(const LinFunctional& f) { objective_ = f; }

Mat SdpProblem::eval_expr(const AffineExpr& e, const RVec& params) const {
  Mat m = e.constant;
  for (const auto& [p, c] : e.coeffs) m += params(p) * c;
  return m;
}

Mat SdpProblem::value_of(int var, const RVec& params) const {
  const Variable& v = vars_.at(var);
  Mat m = Mat::Zero(v.profile.dim(), v.profile.dim());
  for (int p = 0; p < static_cast<int>(v.basis.size()); ++p)
    m += params(v.offset + p) * v.basis[p];
  return m;
}

namespace {

struct CompiledPsd {
  bool doubled = false;
  int side = 0;  // realified side length
};

RMat realify_expr_mat(const Mat& m, bool doubled) {
  if (doubled) return realify_herm(m);
  return m.real();
}

}  // namespace

SdpOutcome SdpProblem::solve() const {
  SdpOutcome out;
  const int n = total_params_;

  // compile PSD blocks (real pass-through or hermitian doubling)
  std::vector<CompiledPsd> cps(psd_.size());
  int total_side = 0;
  for (size_t j = 0; j < psd_.size(); ++j) {
    bool real = is_effectively_real(psd_[j].constant);
    for (const auto& [p, m] : psd_[j].coeffs) real = real && is_effectively_real(m);
    cps[j].doubled = !real;
    cps[j].side = cps[j].doubled ? 2 * psd_[j].dim : psd_[j].dim;
    total_side += cps[j].side;
  }
  if (total_side > cfg_.sdp_size_cap) {
    std::ostringstream os;
    os << "total PSD dimension " << total_side << " exceeds cap " << cfg_.sdp_size_cap;
    throw SizeCapExceeded(os.str());
  }

  // equality rows -> dense A, b; rank filter below
  const int p_all = static_cast<int>(eq_rows_.size());
  RMat A_all = RMat::Zero(p_all, n);
  RVec b_all = RVec::Zero(p_all);
  for (int r = 0; r < p_all; ++r) {
    for (const auto& [p, c] : eq_rows_[r].f.coeffs) {
      if (p < 0 || p >= n) throw InvalidInput("equality references unknown parameter");
      A_all(r, p) += c;
    }
    b_all(r) = eq_rows_[r].rhs;
  }

  std::vector<int> kept;
  if (p_all > 0) {
    Eigen::ColPivHouseholderQR<RMat> qr(A_all.transpose());
    qr.setThreshold(1e-11);
    const int rank = static_cast<int>(qr.rank());
    for (int i = 0; i < rank; ++i) kept.push_back(qr.colsPermutation().indices()(i));
    std::sort(kept.begin(), kept.end());
    if (rank < p_all) {
      // check consistency of the dropped rows; an inconsistent dropped row
      // yields an immediate Farkas certificate supported on the equalities
      RMat Ak(rank, n);
      RVec bk(rank);
      for (int i = 0; i < rank; ++i) {
        Ak.row(i) = A_all.row(kept[i]);
        bk(i) = b_all(kept[i]);
      }
      Eigen::CompleteOrthogonalDecomposition<RMat> cod(Ak.transpose());
      for (int r = 0; r < p_all; ++r) {
        if (std::find(kept.begin(), kept.end(), r) != kept.end()) continue;
        RVec coef = cod.solve(A_all.row(r).transpose());
        const double val = bk.dot(coef) - b_all(r);
        const double scale = std::max({1.0, b_all.cwiseAbs().maxCoeff()});
        if (std::abs(val) > 1e-8 * scale) {
          out.status = SdpStatus::Infeasible;
          out.dual_eq = RVec::Zero(p_all);
          for (int i = 0; i < rank; ++i) out.dual_eq(kept[i]) = coef(i);
          out.dual_eq(r) = -1.0;
          if (val > 0) out.dual_eq = -out.dual_eq;  // make b'y negative
          out.dual_eq /= std::abs(val);
          out.dual_psd.assign(psd_.size(), Mat());
          for (size_t j = 0; j < psd_.size(); ++j)
            out.dual_psd[j] = Mat::Zero(psd_[j].dim, psd_[j].dim);
          out.message = "inconsistent equality constraints";
          std::string why;
          out.verified = verify_infeasible(out, &why);
          if (!out.verified) {
            out.status = SdpStatus::Marginal;
            out.message += "; certificate failed verification: " + why;
          }
          return out;
        }
      }
    }
  }
  const int p_eq = static_cast<int>(kept.size());
  RMat A(p_eq, n);
  RVec b(p_eq);
  for (int i = 0; i < p_eq; ++i) {
    A.row(i) = A_all.row(kept[i]);
    b(i) = b_all(kept[i]);
  }

  if (psd_.empty()) throw InvalidInput("SDP without PSD constraints");

  // build G, h
  int sd_total = 0;
  std::vector<int> blocks;
  for (size_t j = 0; j < psd_.size(); ++j) {
    blocks.push_back(cps[j].side);
    sd_total += svec_dim(cps[j].side);
  }
  RMat G = RMat::Zero(sd_total, n);
  RVec h = RVec::Zero(sd_total);
  {
    int off = 0;
    for (size_t j = 0; j < psd_.size(); ++j) {
      const int sdj = svec_dim(cps[j].side);
      h.segment(off, sdj) = svec(realify_expr_mat(psd_[j].constant, cps[j].doubled));
      for (const auto& [p, m] : psd_[j].coeffs)
        G.col(p).segment(off, sdj) -= svec(realify_expr_mat(m, cps[j].doubled));
      off += sdj;
    }
  }

  RVec c = RVec::Zero(n);
  if (objective_)
    for (const auto& [p, v] : objective_->coeffs) c(p) += v;

  detail::ConeLP prob{c, A, b, G, h, blocks};
  detail::ConeLPResult r = detail::solve_conelp(prob, cfg_);
  out.iterations = r.iterations;

  if (r.breakdown) throw NumericalBreakdown("sdp_solve: " + r.message);

  auto unpack_dual = [&](const RVec& z) {
    std::vector<Mat> duals(psd_.size());
    int off = 0;
    for (size_t j = 0; j < psd_.size(); ++j) {
      const int sdj = svec_dim(cps[j].side);
      RMat zb = smat(z.segment(off, sdj), cps[j].side);
      duals[j] = cps[j].doubled ? complexify_dual(zb, psd_[j].dim)
                                : Mat(zb.cast<cplx>());
      duals[j] = 0.5 * (duals[j] + duals[j].adjoint());
      off += sdj;
    }
    return duals;
  };

  switch (r.status) {
    case detail::ConeLPStatus::Optimal: {
      out.status = objective_ ? SdpStatus::Optimal : SdpStatus::Feasible;
      out.primal.resize(vars_.size());
      for (size_t v = 0; v < vars_.size(); ++v) out.primal[v] = value_of(static_cast<int>(v), r.x);
      out.objective_value = r.pobj;
      // margin computed by the verifier below
      std::string why;
      out.verified = verify_feasible(out, &why);
      if (!out.verified) {
        out.status = SdpStatus::Marginal;
        out.message = "primal failed verification: " + why;
      } else if (objective_ && std::abs(r.pobj - r.dobj) >
                                   cfg_.gap_tol * std::max(1.0, std::abs(r.pobj))) {
        out.status = SdpStatus::Marginal;
        out.message = "duality gap above gap_tol";
      }
      double margin = std::numeric_limits<double>::infinity();
      RVec params = params_of(out.primal);
      for (const auto& e : psd_) {
        EigPair ep = min_eigenvalue(HermitianMatrix::hermitize(eval_expr(e, params)));
        margin = std::min(margin, ep.value);
      }
      out.margin = margin;
      return out;
    }
    case detail::ConeLPStatus::PrimalInfeasible: {
      out.status = SdpStatus::Infeasible;
      out.dual_psd = unpack_dual(r.z);
      out.dual_eq = RVec::Zero(p_all);
      for (int i = 0; i < p_eq; ++i) out.dual_eq(kept[i]) = r.y(i);
      std::string why;
      out.verified = verify_infeasible(out, &why);
      if (!out.verified) {
        out.status = SdpStatus::Marginal;
        out.message = "infeasibility certificate failed verification: " + why;
      }
      return out;
    }
    case detail::ConeLPStatus::DualInfeasible:
      out.status = SdpStatus::Marginal;
      out.message = "objective unbounded below (dual infeasibility certificate)";
      return out;
    case detail::ConeLPStatus::Unknown:
    default:
      out.status = SdpStatus::Marginal;
      out.message = "solver inconclusive: " + r.message;
      return out;
  }
}

RVec SdpProblem::params_of(const std::vector<Mat>& values) const {
  RVec u = RVec::Zero(total_params_);
  for (size_t v = 0; v < vars_.size(); ++v) {
    const Variable& var = vars_[v];
    for (int p = 0; p < static_cast<int>(var.basis.size()); ++p)
      u(var.offset + p) = herm_inner(var.basis[p], values[v]);
  }
  return u;
}

bool SdpProblem::verify_feasible(const SdpOutcome& o, std::string* why) const {
  if (o.primal.size() != vars_.size()) {
    if (why) *why = "missing primal values";
    return false;
  }
  RVec u = params_of(o.primal);
  for (size_t r = 0; r < eq_rows_.size(); ++r) {
    double lhs = 0.0;
    for (const auto& [p, c] : eq_rows_[r].f.coeffs) lhs += c * u(p);
    const double scale = std::max(1.0, std::abs(eq_rows_[r].rhs));
    if (std::abs(lhs - eq_rows_[r].rhs) > cfg_.feas_tol * scale) {
      if (why) {
        std::ostringstream os;
        os << "equality row " << r << " residual " << std::abs(lhs - eq_rows_[r].rhs);
        *why = os.str();
      }
      return false;
    }
  }
  for (size_t j = 0; j < psd_.size(); ++j) {
    Mat m = eval_expr(psd_[j], u);
    EigPair ep = min_eigenvalue(HermitianMatrix::hermitize(m));
    const double scale = std::max(1.0, herm_op_norm(m));
    if (ep.value < -cfg_.feas_tol * scale) {
      if (why) {
        std::ostringstream os;
        os << "PSD constraint " << j << " eigenvalue " << ep.value;
        *why = os.str();
      }
      return false;
    }
  }
  return true;
}

bool SdpProblem::verify_infeasible(const SdpOutcome& o, std::string* why) const {
  if (o.dual_psd.size() != psd_.size() ||
      o.dual_eq.size() != static_cast<int>(eq_rows_.size())) {
    if (why) *why = "certificate shape mismatch";
    return false;
  }
  double cert_scale = o.dual_eq.size() ? o.dual_eq.cwiseAbs().maxCoeff() : 0.0;
  for (const Mat& zj : o.dual_psd) {
    if (zj.size() > 0) cert_scale = std::max(cert_scale, zj.cwiseAbs().maxCoeff());
  }
  cert_scale = std::max(cert_scale, 1.0);

  // dual matrices must be PSD
  for (size_t j = 0; j < psd_.size(); ++j) {
    EigPair ep = min_eigenvalue(HermitianMatrix::hermitize(o.dual_psd[j]));
    if (ep.value < -cfg_.feas_tol * cert_scale) {
      if (why) *why = "dual block not PSD";
      return false;
    }
  }
  // stationarity: for each parameter, sum_j <F_jp, Z_j> + sum_r y_r A_rp = 0
  RVec station = RVec::Zero(total_params_);
  for (size_t j = 0; j < psd_.size(); ++j)
    for (const auto& [p, m] : psd_[j].coeffs) station(p) += herm_inner(m, o.dual_psd[j]);
  for (size_t r = 0; r < eq_rows_.size(); ++r)
    for (const auto& [p, c] : eq_rows_[r].f.coeffs) station(p) += o.dual_eq(r) * c;
  if (station.cwiseAbs().maxCoeff() > 10 * cfg_.feas_tol * cert_scale) {
    if (why) {
      std::ostringstream os;
      os << "stationarity residual " << station.cwiseAbs().maxCoeff();
      *why = os.str();
    }
    return false;
  }
  // separating value: sum_j <C_j, Z_j> + b'y < 0
  double val = 0.0;
  for (size_t j = 0; j < psd_.size(); ++j) val += herm_inner(psd_[j].constant, o.dual_psd[j]);
  for (size_t r = 0; r < eq_rows_.size(); ++r) val += o.dual_eq(r) * eq_rows_[r].rhs;
  if (val > -cfg_.feas_tol * cert_scale) {
    if (why) {
      std::ostringstream os;
      os << "separating value " << val << " not negative";
      *why = os.str();
    }
    return false;
  }
  return true;
}

}  // namespace oskit
