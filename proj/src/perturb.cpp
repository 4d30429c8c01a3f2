#include "svdpert/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "svdpert/errors.hpp"
#include "svdpert/sylvester.hpp"

namespace svdpert {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double spectral(const Matrix& a) { return ui_norm(a, NormKind::Spectral); }

std::size_t norm_index(NormKind k) { return static_cast<std::size_t>(k); }

void check_unitary(const Matrix& q, const char* name) {
  if (!q.is_square()) throw DimensionError(std::string(name) + " must be square");
  const double d = orthonormality_defect(q);
  const double lim = tol::unitary(q.rows());
  if (d > lim) throw PreconditionError(std::string(name) + " is not unitary (defect " +
                                       std::to_string(d) + ")");
}

}  // namespace

std::string_view to_string(Separation s) {
  return s == Separation::IntervalSeparated ? "interval_separated" : "disjoint_only";
}

BlockContext split_context(const Matrix& g, const Matrix& u, const Matrix& v, std::size_t r) {
  const std::size_t m = g.rows();
  const std::size_t n = g.cols();
  if (r < 1 || r >= std::min(m, n)) {
    throw PreconditionError("split index r=" + std::to_string(r) + " outside [1, " +
                            std::to_string(std::min(m, n)) + ")");
  }
  if (u.rows() != m || v.rows() != n) throw DimensionError("U, V do not conform to G");
  check_unitary(u, "U");
  check_unitary(v, "V");

  const Matrix h = u.adjoint() * g * v;
  const double off = std::hypot(h.block(0, r, r, n - r).frobenius_norm(),
                                h.block(r, 0, m - r, r).frobenius_norm());
  const double lim = 1e-12 * g.frobenius_norm();
  if (off > lim) {
    throw PreconditionError("U^H G V is not block diagonal at r=" + std::to_string(r) +
                            " (off-diagonal contamination " + std::to_string(off) + ")");
  }
  BlockContext ctx;
  ctx.g = g;
  ctx.u = u;
  ctx.v = v;
  ctx.r = r;
  ctx.g1 = h.block(0, 0, r, r);
  ctx.g2 = h.block(r, r, m - r, n - r);
  return ctx;
}

BlockContext split_context_svd(const Matrix& g, std::size_t r) {
  const SvdResult s = svd(g);
  return split_context(g, s.u, s.v, r);
}

PerturbationBlocks project_perturbation(const BlockContext& ctx, const Matrix& e) {
  if (e.rows() != ctx.m() || e.cols() != ctx.n()) {
    throw DimensionError("E must have the shape of G");
  }
  const std::size_t r = ctx.r;
  const std::size_t mr = ctx.m() - r;
  const std::size_t nr = ctx.n() - r;
  const Matrix h = ctx.u.adjoint() * e * ctx.v;
  return {h.block(0, 0, r, r), h.block(0, r, r, nr), h.block(r, 0, mr, r), h.block(r, r, mr, nr)};
}

double constant_c(Separation s, PairingNorm p) {
  const bool sep = s == Separation::IntervalSeparated;
  if (p.kind == PairingNorm::Kind::BlockDiag) {
    return (sep || p.norm == NormKind::Frobenius) ? 1.0 : std::numbers::pi / 2.0;
  }
  return sep ? 1.0 : std::numbers::pi;
}

GapReport gap_quantities(const BlockContext& ctx, const PerturbationBlocks& eb, PairingNorm p) {
  const SingularSpectrum s1 = sv_ext(ctx.g1);
  const SingularSpectrum s2 = sv_ext(ctx.g2);
  GapReport rep;
  rep.pairing = p;
  rep.delta = nearest_pair(s1.values, s2.extended()).gap;
  rep.e11_norm = spectral(eb.e11);
  rep.e22_norm = spectral(eb.e22);
  rep.delta_under = rep.delta - rep.e11_norm - rep.e22_norm;
  rep.epsilon = std::max(spectral(eb.e12), spectral(eb.e21));
  rep.sigma_min_g1 = s1.min();
  rep.sigma_max_g2 = s2.max();
  rep.separation = rep.sigma_min_g1 > rep.sigma_max_g2 ? Separation::IntervalSeparated
                                                       : Separation::DisjointOnly;
  rep.c = constant_c(rep.separation, p);
  rep.g_norm = pair_norm(eb.e21, eb.e12.adjoint(), p);
  if (rep.delta_under > 0.0) {
    rep.kappa2 = rep.c * rep.c * rep.epsilon * rep.g_norm / (rep.delta_under * rep.delta_under);
  } else {
    rep.kappa2 = kInf;
  }
  rep.condition_met = rep.delta_under > 0.0 && rep.kappa2 < 0.25;
  return rep;
}

std::pair<Matrix, Matrix> apply_T(const BlockContext& ctx, const PerturbationBlocks& eb,
                                  const Matrix& gamma, const Matrix& omega) {
  return coupled_operator(ctx.g1 + eb.e11, ctx.g2 + eb.e22, gamma, omega);
}

std::pair<Matrix, Matrix> apply_phi(const PerturbationBlocks& eb, const Matrix& gamma,
                                    const Matrix& omega) {
  return {gamma * eb.e12 * omega, omega * eb.e21.adjoint() * gamma};
}

RotationPair solve_rotations(const BlockContext& ctx, const PerturbationBlocks& eb,
                             const GapReport& rep, bool force) {
  if (!rep.condition_met && !force) {
    throw PreconditionError("perturbation condition not met (delta_under=" +
                            std::to_string(rep.delta_under) +
                            ", kappa2=" + std::to_string(rep.kappa2) + ")");
  }
  const Matrix a = ctx.g1 + eb.e11;
  const Matrix b = ctx.g2 + eb.e22;
  const CoupledSylvesterSolver solver(a, b);
  const Matrix e12h = eb.e12.adjoint();

  RotationPair rot;
  rot.guaranteed = rep.condition_met;
  rot.gamma = Matrix(ctx.m() - ctx.r, ctx.r);
  rot.omega = Matrix(ctx.n() - ctx.r, ctx.r);
  double step = kInf;
  int k = 0;
  while (true) {
    if (k == kMaxFixedPointIters) {
      throw ConvergenceError("fixed-point iteration for (Gamma, Omega)", k, step);
    }
    ++k;
    auto [p1, p2] = apply_phi(eb, rot.gamma, rot.omega);
    SolutionPair next = solver.solve(eb.e21 - p1, e12h - p2);
    step = pair_norm(next.x - rot.gamma, next.y - rot.omega, rep.pairing);
    rot.gamma = std::move(next.x);
    rot.omega = std::move(next.y);
    rot.pair_norm = pair_norm(rot.gamma, rot.omega, rep.pairing);
    if (!std::isfinite(rot.pair_norm)) {
      throw ConvergenceError("fixed-point iteration for (Gamma, Omega) diverged", k, step);
    }
    if (step < kTolFixedPoint * (1.0 + rot.pair_norm)) break;
  }
  rot.iterations = k;
  rot.final_step_norm = step;

  auto [t1, t2] = apply_T(ctx, eb, rot.gamma, rot.omega);
  auto [p1, p2] = apply_phi(eb, rot.gamma, rot.omega);
  rot.residual_1 = (t1 - (eb.e21 - p1)).frobenius_norm();
  rot.residual_2 = (t2 - (e12h - p2)).frobenius_norm();
  const double lim = kTolSolve * (eb.e21.frobenius_norm() + eb.e12.frobenius_norm() + 1.0);
  const double res = std::max(rot.residual_1, rot.residual_2);
  if (res > lim) throw VerificationError("quadratic system residual", res, lim);
  return rot;
}

double rotation_factor(double kappa) {
  const double s = std::sqrt(std::max(0.0, 1.0 - 4.0 * kappa));
  return (1.0 + s) / (1.0 - 2.0 * kappa + s);
}

double rotation_bound(const GapReport& rep) {
  if (!rep.condition_met) throw PreconditionError("rotation bound requires the gap condition");
  const double base = rep.c * rep.g_norm / rep.delta_under;
  const double b = rotation_factor(rep.kappa2) * base;
  if (base > 0.0 && !(b < 2.0 * base)) {
    throw VerificationError("rotation bound not below 2 c g / delta_under", b, 2.0 * base);
  }
  return b;
}

double footnote_distance(double g) {
  const double w = std::sqrt(1.0 + g * g);
  return std::numbers::sqrt2 * g / std::sqrt(w * (w + 1.0));
}

CorrectedDecomposition build_corrected(const BlockContext& ctx, const PerturbationBlocks& eb,
                                       const RotationPair& rot, const GapReport& rep) {
  const std::size_t m = ctx.m();
  const std::size_t n = ctx.n();
  const Matrix& gm = rot.gamma;
  const Matrix& om = rot.omega;
  const Matrix u1 = ctx.u1(), u2 = ctx.u2(), v1 = ctx.v1(), v2 = ctx.v2();

  const Matrix ig = inv_sqrt_gram(gm);             // (I + G^H G)^{-1/2}
  const Matrix igh = inv_sqrt_gram(gm.adjoint());  // (I + G G^H)^{-1/2}
  const Matrix io = inv_sqrt_gram(om);
  const Matrix ioh = inv_sqrt_gram(om.adjoint());

  CorrectedDecomposition cd;
  const Matrix uc1 = (u1 + u2 * gm) * ig;
  const Matrix uc2 = (u2 - u1 * gm.adjoint()) * igh;
  const Matrix vc1 = (v1 + v2 * om) * io;
  const Matrix vc2 = (v2 - v1 * om.adjoint()) * ioh;
  cd.u_check = hcat(uc1, uc2);
  cd.v_check = hcat(vc1, vc2);
  const double du = orthonormality_defect(cd.u_check);
  if (du > tol::unitary(m)) throw VerificationError("U check unitarity", du, tol::unitary(m));
  const double dv = orthonormality_defect(cd.v_check);
  if (dv > tol::unitary(n)) throw VerificationError("V check unitarity", dv, tol::unitary(n));

  // G~ in the (U, V) coordinates keeps every product small and conformal
  const Matrix gt = ctx.g + ctx.u * hcat(vcat(eb.e11, eb.e21), vcat(eb.e12, eb.e22)) *
                                ctx.v.adjoint();
  const double gt_fro = gt.frobenius_norm();
  cd.g1_check = uc1.adjoint() * gt * vc1;
  cd.g2_check = uc2.adjoint() * gt * vc2;
  cd.offdiag_residual = std::max((uc2.adjoint() * gt * vc1).frobenius_norm(),
                                 (uc1.adjoint() * gt * vc2).frobenius_norm());

  const Matrix a = ctx.g1 + eb.e11;
  const Matrix b = ctx.g2 + eb.e22;
  const Matrix f11 = sqrt_gram(gm) * (a + eb.e12 * om) * io;
  const Matrix f12 = ig * (a + gm.adjoint() * eb.e21) * sqrt_gram(om);
  const Matrix f21 = sqrt_gram(gm.adjoint()) * (b - eb.e21 * om.adjoint()) * ioh;
  const Matrix f22 = igh * (b - gm * eb.e12) * sqrt_gram(om.adjoint());
  const double scale = gt_fro > 0.0 ? gt_fro : 1.0;
  cd.closed_form_defect = std::max({(cd.g1_check - f11).frobenius_norm(),
                                    (cd.g1_check - f12).frobenius_norm(),
                                    (cd.g2_check - f21).frobenius_norm(),
                                    (cd.g2_check - f22).frobenius_norm()}) /
                          scale;
  if (cd.closed_form_defect > 1e-10) {
    throw VerificationError("closed-form corrected blocks disagree", cd.closed_form_defect, 1e-10);
  }

  const std::vector<double> sg = singular_values(gt);
  const std::vector<double> s1 = singular_values(cd.g1_check);
  const std::vector<double> s2 = singular_values(cd.g2_check);
  std::vector<double> uni = s1;
  uni.insert(uni.end(), s2.begin(), s2.end());
  std::sort(uni.begin(), uni.end(), std::greater<>());
  cd.multiset_tol = 1e-9 * (1.0 + (sg.empty() ? 0.0 : sg.front()));
  cd.multiset_defect = 0.0;
  for (std::size_t i = 0; i < sg.size(); ++i) {
    cd.multiset_defect = std::max(cd.multiset_defect, std::abs(sg[i] - uni[i]));
  }
  if (cd.multiset_defect > cd.multiset_tol) {
    throw VerificationError("singular values of G~ vs corrected blocks", cd.multiset_defect,
                            cd.multiset_tol);
  }

  cd.sigma_min_g1 = s1.back();
  cd.sigma_max_g2 = s2.front();
  if (rep.condition_met) {
    cd.bound_pair_norm = rotation_bound(rep);
    const double shift = 2.0 * rep.c * rep.epsilon * rep.g_norm / rep.delta_under;
    cd.sigma_min_g1_lower = rep.sigma_min_g1 - rep.e11_norm - shift;
    cd.sigma_max_g2_upper = rep.sigma_max_g2 + rep.e22_norm + shift;
  } else {
    cd.bound_pair_norm = kNaN;
    cd.sigma_min_g1_lower = kNaN;
    cd.sigma_max_g2_upper = kNaN;
  }

  const Matrix du1 = uc1 - u1;
  const Matrix dv1 = vc1 - v1;
  cd.distances_certified = true;
  for (NormKind k : kAllNorms) {
    const std::size_t i = norm_index(k);
    cd.u1_dist[i] = ui_norm(du1, k);
    cd.v1_dist[i] = ui_norm(dv1, k);
    cd.gamma_norm[i] = ui_norm(gm, k);
    cd.omega_norm[i] = ui_norm(om, k);
    if (cd.u1_dist[i] > cd.gamma_norm[i] * (1.0 + 1e-12) + 1e-14 ||
        cd.v1_dist[i] > cd.omega_norm[i] * (1.0 + 1e-12) + 1e-14) {
      cd.distances_certified = false;
    }
  }
  cd.u1_footnote = footnote_distance(cd.gamma_norm[norm_index(NormKind::Spectral)]);
  cd.v1_footnote = footnote_distance(cd.omega_norm[norm_index(NormKind::Spectral)]);
  return cd;
}

const CorollaryEntry& ComparisonReport::entry(std::string_view id) const {
  for (const CorollaryEntry& e : entries) {
    if (e.id == id) return e;
  }
  throw PreconditionError("unknown corollary id " + std::string(id));
}

ComparisonReport corollary_suite(const BlockContext& ctx, const PerturbationBlocks& eb) {
  const GapReport rep = gap_quantities(ctx, eb, PairingNorm::block_diag(NormKind::Frobenius));
  const double du = rep.delta_under;
  const double eps = rep.epsilon;
  const bool sep = rep.separation == Separation::IntervalSeparated;
  const double f12 = eb.e12.frobenius_norm();
  const double f21 = eb.e21.frobenius_norm();
  const double s12 = spectral(eb.e12);
  const double s21 = spectral(eb.e21);
  const std::size_t r = ctx.r;
  const double dim = static_cast<double>(std::min({ctx.m() - r, ctx.n() - r, r}));

  ComparisonReport out;
  out.eps_hat = std::hypot(f12, f21);
  out.eps_tilde = std::sqrt(dim) * std::hypot(s12, s21);
  out.epsilon = eps;
  out.delta_under = du;

  // kappa is the quantity compared against 1/4; the bound is factor(kappa) * base
  auto add = [&](const char* id, PairingNorm norm, bool applicable, double kappa, double base) {
    CorollaryEntry e;
    e.id = id;
    e.measured_in = norm;
    e.kappa = du > 0.0 ? kappa : kInf;
    e.condition_met = applicable && du > 0.0 && e.kappa < 0.25;
    e.bound = e.condition_met ? rotation_factor(e.kappa) * base : kNaN;
    out.entries.push_back(e);
  };
  const double du2 = du * du;
  const auto frob_bd = PairingNorm::block_diag(NormKind::Frobenius);
  const auto frob_mx = PairingNorm::max_of(NormKind::Frobenius);
  const auto spec = PairingNorm::max_of(NormKind::Spectral);
  const double half_pi = std::numbers::pi / 2.0;

  const double rs = out.eps_hat / du;
  add("stewart", frob_bd, true, rs * rs, rs);
  const double rn = out.eps_tilde / du;
  add("naive_spectral", frob_bd, true, rn * rn, rn);
  add("cor.F1", frob_bd, true, eps * out.eps_hat / du2, out.eps_hat / du);
  add("cor.F2", frob_mx, sep, eps * std::max(f12, f21) / du2, std::max(f12, f21) / du);
  add("cor.sp1", spec, true, half_pi * half_pi * eps * eps / du2, half_pi * eps / du);
  add("cor.sp2", spec, sep, eps * eps / du2, eps / du);

  out.stewart_condition_met = out.entries[0].condition_met;
  out.stewart_bound = out.entries[0].bound;
  out.naive_condition_met = out.entries[1].condition_met;
  out.naive_bound = out.entries[1].bound;
  return out;
}

ImprovedSigmaBounds improved_sigma_bounds(const BlockContext& ctx, const PerturbationBlocks& eb,
                                          const CorrectedDecomposition& cd, const GapReport& rep) {
  if (rep.separation != Separation::IntervalSeparated) {
    throw PreconditionError("improved bounds require sigma_min(G1) > sigma_max(G2)");
  }
  if (!rep.condition_met || rep.c != 1.0) {
    throw PreconditionError("improved bounds require the gap condition with c = 1");
  }
  const double du = rep.delta_under;
  const double eps = rep.epsilon;
  const std::size_t r = ctx.r;
  const Matrix gt = ctx.g + ctx.u * hcat(vcat(eb.e11, eb.e21), vcat(eb.e12, eb.e22)) *
                                ctx.v.adjoint();
  const std::vector<double> sg = singular_values(gt);
  const std::vector<double> s1 = singular_values(cd.g1_check);
  const std::vector<double> sa = singular_values(ctx.g1 + eb.e11);

  ImprovedSigmaBounds out;
  out.term = 2.0 * eps * eps / (du + std::sqrt(du * du + 4.0 * eps * eps));
  out.lower = rep.sigma_min_g1 - rep.e11_norm;
  out.upper = rep.sigma_min_g1 + rep.e11_norm + out.term;
  out.measured = s1.back();
  out.slack_tol = 1e-10 * (1.0 + sg.front());
  out.in_interval =
      out.measured >= out.lower - out.slack_tol && out.measured <= out.upper + out.slack_tol;
  out.blocks_separated = cd.sigma_min_g1 > cd.sigma_max_g2;
  for (std::size_t i = 0; i < r; ++i) {
    out.top_r_defect = std::max(out.top_r_defect, std::abs(sg[i] - s1[i]));
  }
  out.top_r_match = out.top_r_defect <= 1e-9 * (1.0 + sg.front());
  out.per_index_worst = -kInf;
  for (std::size_t i = 0; i < r; ++i) {
    out.per_index_worst = std::max(out.per_index_worst, std::abs(s1[i] - sa[i]) - out.term);
  }
  out.per_index_ok = out.per_index_worst <= out.slack_tol;
  return out;
}

}  // namespace svdpert
