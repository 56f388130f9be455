#include "oskit/conelp.hpp"

#include <cmath>

namespace oskit::detail {
namespace {

struct BlockLayout {
  std::vector<int> sides;
  std::vector<int> offsets;  // svec offsets
  int total = 0;             // total svec length
  int degree = 0;            // sum of sides

  explicit BlockLayout(const std::vector<int>& blocks) : sides(blocks) {
    for (int m : sides) {
      offsets.push_back(total);
      total += svec_dim(m);
      degree += m;
    }
  }
};

// Nesterov-Todd scaling data for one PSD block: lambda = R' Z R = R^-1 S R^-T.
struct NTBlock {
  RMat R, Rinv;
  RVec lambda;
  RMat Lw, Lwinv;  // Lw = R R', the congruence matrix of W'W
};

RMat chol_or_repair(RMat m, const char* what) {
  Eigen::LLT<RMat> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  // Loss of positive definiteness from round-off: clip the spectrum.
  Eigen::SelfAdjointEigenSolver<RMat> es(m);
  if (es.info() != Eigen::Success)
    throw NumericalBreakdown(std::string("eigendecomposition failed in ") + what);
  const double floor = 1e-14 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  RVec d = es.eigenvalues().cwiseMax(floor);
  RMat repaired =
      es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  Eigen::LLT<RMat> llt2(repaired);
  if (llt2.info() != Eigen::Success)
    throw NumericalBreakdown(std::string("cholesky failed in ") + what);
  return llt2.matrixL();
}

NTBlock nt_scaling(const RMat& S, const RMat& Z) {
  NTBlock nt;
  RMat Ls = chol_or_repair(S, "nt_scaling(S)");
  RMat Lz = chol_or_repair(Z, "nt_scaling(Z)");
  Eigen::JacobiSVD<RMat> svd(Lz.transpose() * Ls,
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  RVec sig = svd.singularValues();
  const double floor = 1e-150;
  for (int i = 0; i < sig.size(); ++i) sig(i) = std::max(sig(i), floor);
  RVec si = sig.cwiseSqrt().cwiseInverse();
  nt.R = Ls * svd.matrixV() * si.asDiagonal();
  nt.Rinv = si.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
  nt.lambda = sig;
  nt.Lw = nt.R * nt.R.transpose();
  nt.Lwinv = nt.Rinv.transpose() * nt.Rinv;
  return nt;
}

// Solve lambda o X = D for diagonal lambda: X_ij = 2 D_ij / (l_i + l_j).
RMat jordan_solve(const RVec& lambda, const RMat& d) {
  const int n = static_cast<int>(lambda.size());
  RMat x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = 2.0 * d(i, j) / (lambda(i) + lambda(j));
  return x;
}

// Largest alpha with I + alpha * lambda^-1/2 D lambda^-1/2 >= 0.
double max_step(const RVec& lambda, const RMat& d) {
  const int n = static_cast<int>(lambda.size());
  RMat scaled(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      scaled(i, j) = d(i, j) / std::sqrt(lambda(i) * lambda(j));
  Eigen::SelfAdjointEigenSolver<RMat> es(scaled, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0) return std::numeric_limits<double>::infinity();
  return 1.0 / (-lmin);
}

}  // namespace

ConeLPResult solve_conelp(const ConeLP& prob, const Config& cfg) {
  const int n = static_cast<int>(prob.c.size());
  const int p = static_cast<int>(prob.A.rows());
  const BlockLayout lay(prob.blocks);
  const int sd = lay.total;
  const int nblocks = static_cast<int>(lay.sides.size());

  ConeLPResult res;
  if (sd == 0) {
    res.message = "no cone blocks";
    res.breakdown = true;
    return res;
  }

  auto per_block = [&](const RVec& v, int t) {
    return smat(v.segment(lay.offsets[t], svec_dim(lay.sides[t])), lay.sides[t]);
  };
  auto set_block = [&](RVec& v, int t, const RMat& m) {
    v.segment(lay.offsets[t], svec_dim(lay.sides[t])) = svec(m);
  };

  // iterates
  RVec x = RVec::Zero(n), y = RVec::Zero(p);
  RVec s(sd), z(sd);
  for (int t = 0; t < nblocks; ++t) {
    set_block(s, t, RMat::Identity(lay.sides[t], lay.sides[t]));
    set_block(z, t, RMat::Identity(lay.sides[t], lay.sides[t]));
  }
  double tau = 1.0, kappa = 1.0;

  const double resx0 = std::max(1.0, prob.c.norm());
  const double resy0 = std::max(1.0, prob.b.norm());
  const double resz0 = std::max(1.0, prob.h.norm());
  const double nu = lay.degree;

  std::vector<NTBlock> nt(nblocks);

  // action of (W'W)^-1 on an svec vector
  auto winv_apply = [&](const RVec& v) {
    RVec out(sd);
    for (int t = 0; t < nblocks; ++t)
      set_block(out, t, nt[t].Lwinv * per_block(v, t) * nt[t].Lwinv);
    return out;
  };

  Eigen::LDLT<RMat> Hf;
  Eigen::LDLT<RMat> Sf;
  RMat Hreg;  // H + delta I actually factored

  auto factor_kkt = [&]() {
    RMat H = RMat::Zero(n, n);
    for (int t = 0; t < nblocks; ++t) {
      const int m = lay.sides[t];
      const int off = lay.offsets[t];
      const int sdim = svec_dim(m);
      RMat Gb = prob.G.middleRows(off, sdim);
      RMat Gt(sdim, n);
      for (int j = 0; j < n; ++j) {
        RMat col = smat(Gb.col(j), m);
        Gt.col(j) = svec(nt[t].Lwinv * col * nt[t].Lwinv);
      }
      H.noalias() += Gb.transpose() * Gt;
    }
    H = 0.5 * (H + H.transpose());
    const double delta = 1e-11 * std::max(1.0, H.cwiseAbs().maxCoeff());
    Hreg = H + delta * RMat::Identity(n, n);
    Hf.compute(Hreg);
    if (p > 0) {
      RMat HinvAT = Hf.solve(prob.A.transpose());
      RMat S = prob.A * HinvAT;
      S = 0.5 * (S + S.transpose());
      const double ds = 1e-11 * std::max(1.0, S.cwiseAbs().maxCoeff());
      Sf.compute(S + ds * RMat::Identity(p, p));
    }
  };

  struct KKTSol {
    RVec x, y, z;
  };

  auto solve_kkt_once = [&](const RVec& vx, const RVec& vy, const RVec& vz) {
    KKTSol u;
    RVec f = vx + prob.G.transpose() * winv_apply(vz);
    if (p > 0) {
      RVec Hinvf = Hf.solve(f);
      u.y = Sf.solve(prob.A * Hinvf - vy);
      u.x = Hf.solve(f - prob.A.transpose() * u.y);
    } else {
      u.y = RVec::Zero(0);
      u.x = Hf.solve(f);
    }
    u.z = winv_apply(prob.G * u.x - vz);
    return u;
  };

  // one step of iterative refinement against the unregularized operator
  auto solve_kkt = [&](const RVec& vx, const RVec& vy, const RVec& vz) {
    KKTSol u = solve_kkt_once(vx, vy, vz);
    for (int pass = 0; pass < 2; ++pass) {
      RVec r1 = vx - (prob.G.transpose() * u.z);
      if (p > 0) r1 -= prob.A.transpose() * u.y;
      RVec r2 = p > 0 ? RVec(vy - prob.A * u.x) : RVec::Zero(0);
      RVec wz(sd);
      for (int t = 0; t < nblocks; ++t)
        set_block(wz, t, nt[t].Lw * per_block(u.z, t) * nt[t].Lw);
      RVec r3 = vz - (prob.G * u.x - wz);
      if (r1.norm() + r2.norm() + r3.norm() <
          1e-13 * (1.0 + vx.norm() + vy.norm() + vz.norm()))
        break;
      KKTSol d = solve_kkt_once(r1, r2, r3);
      u.x += d.x;
      if (p > 0) u.y += d.y;
      u.z += d.z;
    }
    return u;
  };

  double mu_prev = std::numeric_limits<double>::infinity();
  int stalled = 0;

  for (int iter = 0; iter < cfg.ipm_maxiters; ++iter) {
    res.iterations = iter;

    // residuals of the homogeneous model
    RVec rx = prob.G.transpose() * z + prob.c * tau;
    if (p > 0) rx += prob.A.transpose() * y;
    RVec ry = p > 0 ? RVec(prob.A * x - prob.b * tau) : RVec::Zero(0);
    RVec rz = prob.G * x + s - prob.h * tau;
    const double cx = prob.c.dot(x);
    const double by = p > 0 ? prob.b.dot(y) : 0.0;
    const double hz = prob.h.dot(z);
    const double rt = cx + by + hz + kappa;

    const double gap = s.dot(z);
    const double mu = (gap + tau * kappa) / (nu + 1.0);

    if (!std::isfinite(mu) || !x.allFinite() || !s.allFinite() || !z.allFinite()) {
      res.breakdown = true;
      res.message = "non-finite iterate";
      return res;
    }

    // convergence tests (unscaled by tau)
    const double pres = std::max(ry.norm() / resy0, rz.norm() / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;
    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double agap = gap / (tau * tau);
    const double relgap = agap / std::max(1.0, std::abs(pcost));

    res.pres = pres;
    res.dres = dres;
    res.gap = agap;
    res.pobj = pcost;
    res.dobj = dcost;

    if (pres <= cfg.ipm_feastol && dres <= cfg.ipm_feastol &&
        (agap <= cfg.ipm_abstol || relgap <= cfg.ipm_reltol)) {
      res.status = ConeLPStatus::Optimal;
      res.x = x / tau;
      res.y = y / tau;
      res.z = z / tau;
      res.s = s / tau;
      return res;
    }

    // primal infeasibility: A'y + G'z ~ 0 with h'z + b'y < 0
    const double w_inf = -(hz + by);
    if (w_inf > 0) {
      RVec hres = prob.G.transpose() * z;
      if (p > 0) hres += prob.A.transpose() * y;
      if (hres.norm() / resx0 / w_inf <= cfg.ipm_feastol) {
        res.status = ConeLPStatus::PrimalInfeasible;
        res.y = y / w_inf;
        res.z = z / w_inf;
        res.message = "primal infeasibility certificate";
        return res;
      }
    }
    // dual infeasibility: A x ~ 0, G x + s ~ 0 with c'x < 0
    if (cx < 0) {
      const double hresy = p > 0 ? (prob.A * x).norm() : 0.0;
      const double hresz = (prob.G * x + s).norm();
      if (std::max(hresy / resy0, hresz / resz0) / (-cx) <= cfg.ipm_feastol) {
        res.status = ConeLPStatus::DualInfeasible;
        res.x = x / (-cx);
        res.s = s / (-cx);
        res.message = "dual infeasibility certificate";
        return res;
      }
    }

    if (mu > 0.999 * mu_prev) {
      if (++stalled > 15) {
        res.message = "stalled";
        return res;
      }
    } else {
      stalled = 0;
    }
    mu_prev = mu;

    // NT scaling
    for (int t = 0; t < nblocks; ++t) nt[t] = nt_scaling(per_block(s, t), per_block(z, t));

    factor_kkt();
    KKTSol u1 = solve_kkt(-prob.c, prob.b, prob.h);
    const double dg = prob.c.dot(u1.x) + (p > 0 ? prob.b.dot(u1.y) : 0.0) +
                      prob.h.dot(u1.z) - kappa / tau;

    auto direction = [&](double sigma, const std::vector<RMat>& corr,
                         double corr_tk) {
      const double eta = 1.0 - sigma;
      RVec ds_scaled(sd);
      for (int t = 0; t < nblocks; ++t) {
        const int m = lay.sides[t];
        RMat d = RMat::Zero(m, m);
        for (int i = 0; i < m; ++i)
          d(i, i) = sigma * mu - nt[t].lambda(i) * nt[t].lambda(i);
        if (!corr.empty()) d -= corr[t];
        set_block(ds_scaled, t, jordan_solve(nt[t].lambda, d));
      }
      // W' g_s
      RVec wgs(sd);
      for (int t = 0; t < nblocks; ++t)
        set_block(wgs, t, nt[t].R * per_block(ds_scaled, t) * nt[t].R.transpose());

      KKTSol u2 = solve_kkt(-eta * rx, -eta * ry, RVec(-eta * rz - wgs));
      const double num = -eta * rt -
                         (prob.c.dot(u2.x) + (p > 0 ? prob.b.dot(u2.y) : 0.0) +
                          prob.h.dot(u2.z)) -
                         (sigma * mu - tau * kappa - corr_tk) / tau;
      const double dtau = num / (std::abs(dg) > 1e-100 ? dg : 1e-100);

      struct Dir {
        RVec dx, dy, dz, ds;
        double dtau, dkappa;
      } d;
      d.dx = u2.x + dtau * u1.x;
      d.dy = p > 0 ? RVec(u2.y + dtau * u1.y) : RVec::Zero(0);
      d.dz = u2.z + dtau * u1.z;
      d.dtau = dtau;
      // ds = W'(g_s - W dz)
      d.ds = RVec(sd);
      for (int t = 0; t < nblocks; ++t) {
        RMat wdz = nt[t].R.transpose() * per_block(d.dz, t) * nt[t].R;
        RMat g = per_block(ds_scaled, t) - wdz;
        set_block(d.ds, t, nt[t].R * g * nt[t].R.transpose());
      }
      d.dkappa = (sigma * mu - tau * kappa - corr_tk) / tau - (kappa / tau) * dtau;
      return d;
    };

    auto step_bound = [&](const auto& d) {
      double amax = std::numeric_limits<double>::infinity();
      for (int t = 0; t < nblocks; ++t) {
        RMat wdz = nt[t].R.transpose() * per_block(d.dz, t) * nt[t].R;
        RMat wds = nt[t].Rinv * per_block(d.ds, t) * nt[t].Rinv.transpose();
        amax = std::min(amax, max_step(nt[t].lambda, wdz));
        amax = std::min(amax, max_step(nt[t].lambda, wds));
      }
      if (d.dtau < 0) amax = std::min(amax, -tau / d.dtau);
      if (d.dkappa < 0) amax = std::min(amax, -kappa / d.dkappa);
      return amax;
    };

    // predictor
    auto aff = direction(0.0, {}, 0.0);
    const double alpha_aff = std::min(1.0, step_bound(aff));

    // Mehrotra centering parameter
    RVec s_aff = s + alpha_aff * aff.ds;
    RVec z_aff = z + alpha_aff * aff.dz;
    const double mu_aff = (s_aff.dot(z_aff) + (tau + alpha_aff * aff.dtau) *
                                                  (kappa + alpha_aff * aff.dkappa)) /
                          (nu + 1.0);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::min(sigma, 0.99);

    // corrector terms in scaled space
    std::vector<RMat> corr(nblocks);
    for (int t = 0; t < nblocks; ++t) {
      RMat wdz = nt[t].R.transpose() * per_block(aff.dz, t) * nt[t].R;
      RMat wds = nt[t].Rinv * per_block(aff.ds, t) * nt[t].Rinv.transpose();
      corr[t] = 0.5 * (wds * wdz + wdz * wds);
    }
    auto comb = direction(sigma, corr, aff.dtau * aff.dkappa);
    double alpha = std::min(1.0, cfg.ipm_step * step_bound(comb));

    x += alpha * comb.dx;
    if (p > 0) y += alpha * comb.dy;
    z += alpha * comb.dz;
    s += alpha * comb.ds;
    tau += alpha * comb.dtau;
    kappa += alpha * comb.dkappa;

    if (tau <= 0 || kappa < 0) {
      res.breakdown = true;
      res.message = "tau/kappa left the cone";
      return res;
    }
  }

  res.message = "iteration limit";
  return res;
}

}  // namespace oskit::detail
