#include "svdpert/sylvester.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "svdpert/errors.hpp"

namespace svdpert {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(name) + " must be " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

void validate(const CoupledSylvesterProblem& p) {
  if (!p.a.is_square()) throw DimensionError("coupled problem: A must be square");
  require_shape(p.s_rhs, p.b.rows(), p.a.rows(), "S");
  require_shape(p.t_rhs, p.b.cols(), p.a.rows(), "T");
}

std::vector<double> eigenvalues_of(const Matrix& h) { return eigh(h).lambda; }

BoundCertificate make_cert(std::string id, Regime regime, PairingNorm norm, double delta,
                           double constant, double rhs_norm, double measured) {
  BoundCertificate c;
  c.id = std::move(id);
  c.regime = regime;
  c.norm = norm;
  c.delta = delta;
  c.constant = constant;
  c.bound_value = constant * rhs_norm / delta;
  c.measured = measured;
  c.satisfied = within_bound(measured, c.bound_value);
  return c;
}

}  // namespace

double gap_tolerance(const Matrix& a, const Matrix& b) {
  return 1e-8 * (sv_ext(a).max() + sv_ext(b).max() + 1.0);
}

SpectralGap nearest_pair(const std::vector<double>& a, const std::vector<double>& b) {
  SpectralGap best;
  best.gap = std::numeric_limits<double>::infinity();
  for (double mu : a) {
    for (double nu : b) {
      const double d = std::abs(mu - nu);
      if (d < best.gap) best = {d, mu, nu};
    }
  }
  return best;
}

bool within_bound(double measured, double bound) { return measured <= bound * (1.0 + 1e-10); }

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::FrobeniusGap: return "frobenius_gap";
    case Regime::IntervalSeparated: return "interval_separated";
    case Regime::GeneralUI: return "general_ui";
  }
  return "?";
}

// ---------------------------------------------------------------------------

HermSylvesterSolver::HermSylvesterSolver(const Matrix& a, const Matrix& b)
    : ea_(eigh(a)), eb_(eigh(b)) {
  gap_ = nearest_pair(ea_.lambda, eb_.lambda);
  const double gtol = gap_tolerance(a, b);
  if (!(gap_.gap >= gtol)) throw SingularProblemError(gap_.mu, gap_.nu, gap_.gap, gtol);
}

Matrix HermSylvesterSolver::solve(const Matrix& s) const {
  const std::size_t r = ea_.lambda.size();
  const std::size_t n = eb_.lambda.size();
  require_shape(s, n, r, "S");
  Matrix xh = eb_.q.adjoint() * s * ea_.q;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < r; ++j) xh(i, j) /= (ea_.lambda[j] - eb_.lambda[i]);
  return eb_.q * xh * ea_.q.adjoint();
}

Matrix solve_herm_sylvester(const HermSylvesterProblem& p) {
  if (!p.a.is_square() || !p.b.is_square()) {
    throw DimensionError("Hermitian Sylvester: A and B must be square");
  }
  HermSylvesterSolver solver(p.a, p.b);
  Matrix x = solver.solve(p.s_rhs);
  const double res = (x * p.a - p.b * x - p.s_rhs).frobenius_norm();
  const double lim = kTolSolve * p.s_rhs.frobenius_norm();
  if (res > lim) throw VerificationError("Hermitian Sylvester residual", res, lim);
  return x;
}

// ---------------------------------------------------------------------------

CoupledSylvesterProblem pad_to_square(const CoupledSylvesterProblem& p) {
  validate(p);
  const std::size_t s = p.b.rows();
  const std::size_t t = p.b.cols();
  const std::size_t r = p.a.rows();
  if (s == t) return p;
  CoupledSylvesterProblem q;
  q.a = p.a;
  const std::size_t n = std::max(s, t);
  q.b = Matrix(n, n);
  q.b.set_block(0, 0, p.b);
  q.s_rhs = Matrix(n, r);
  q.s_rhs.set_block(0, 0, p.s_rhs);
  q.t_rhs = Matrix(n, r);
  q.t_rhs.set_block(0, 0, p.t_rhs);
  return q;
}

std::pair<Matrix, Matrix> coupled_operator(const Matrix& a, const Matrix& b, const Matrix& x,
                                           const Matrix& y) {
  return {x * a - b * y, y * a.adjoint() - b.adjoint() * x};
}

CoupledSylvesterSolver::CoupledSylvesterSolver(const Matrix& a, const Matrix& b)
    : a_(a), b_(b), order_(std::max(b.rows(), b.cols())) {
  if (!a.is_square()) throw DimensionError("coupled problem: A must be square");
  gap_ = nearest_pair(sv_ext(a).values, sv_ext(b).extended());
  const double gtol = gap_tolerance(a, b);
  if (!(gap_.gap >= gtol)) throw SingularProblemError(gap_.mu, gap_.nu, gap_.gap, gtol);

  const std::size_t r = a.rows();
  Matrix ahat(2 * r, 2 * r);
  ahat.set_block(0, r, a.adjoint());
  ahat.set_block(r, 0, a);
  Matrix bhat(2 * order_, 2 * order_);
  bhat.set_block(0, order_, b);
  bhat.set_block(order_, 0, b.adjoint());
  merged_.emplace(ahat, bhat);
}

SolutionPair CoupledSylvesterSolver::solve(const Matrix& s, const Matrix& t) const {
  const std::size_t r = a_.rows();
  const std::size_t sr = b_.rows();
  const std::size_t tr = b_.cols();
  require_shape(s, sr, r, "S");
  require_shape(t, tr, r, "T");
  const std::size_t n = order_;

  Matrix rhs(2 * n, 2 * r);
  rhs.set_block(0, 0, s);
  rhs.set_block(n, r, t);
  const Matrix z = merged_->solve(rhs);

  SolutionPair out;
  out.x = z.block(0, r, sr, r);
  out.y = z.block(n, 0, tr, r);
  auto [ts, tt] = coupled_operator(a_, b_, out.x, out.y);
  out.residual_1 = (ts - s).frobenius_norm();
  out.residual_2 = (tt - t).frobenius_norm();
  return out;
}

SolutionPair solve_coupled(const CoupledSylvesterProblem& p) {
  validate(p);
  CoupledSylvesterSolver solver(p.a, p.b);
  SolutionPair sol = solver.solve(p.s_rhs, p.t_rhs);
  const double lim =
      kTolSolve * (p.s_rhs.frobenius_norm() + p.t_rhs.frobenius_norm() + 1.0);
  const double res = std::max(sol.residual_1, sol.residual_2);
  if (res > lim) throw VerificationError("coupled Sylvester residual", res, lim);
  return sol;
}

// ---------------------------------------------------------------------------

std::vector<BoundCertificate> coupled_bounds(const CoupledSylvesterProblem& p,
                                             const SolutionPair& sol) {
  validate(p);
  const SingularSpectrum sa = sv_ext(p.a);
  const SingularSpectrum sb = sv_ext(p.b);
  const double delta = nearest_pair(sa.values, sb.extended()).gap;
  const Matrix& x = sol.x;
  const Matrix& y = sol.y;
  const Matrix& s = p.s_rhs;
  const Matrix& t = p.t_rhs;

  std::vector<BoundCertificate> out;
  const auto frob = PairingNorm::block_diag(NormKind::Frobenius);
  out.push_back(make_cert("a.frobenius", Regime::FrobeniusGap, frob, delta, 1.0,
                          pair_norm(s, t, frob), pair_norm(x, y, frob)));

  const auto spec = PairingNorm::max_of(NormKind::Spectral);
  const double sep = sa.min() - sb.max();
  if (sep > 0.0) {
    for (NormKind k : kAllNorms) {
      const auto bd = PairingNorm::block_diag(k);
      const auto mx = PairingNorm::max_of(k);
      out.push_back(make_cert("b.blockdiag." + std::string(to_string(k)),
                              Regime::IntervalSeparated, bd, sep, 1.0, pair_norm(s, t, bd),
                              pair_norm(x, y, bd)));
      out.push_back(make_cert("b.max." + std::string(to_string(k)), Regime::IntervalSeparated, mx,
                              sep, 1.0, pair_norm(s, t, mx), pair_norm(x, y, mx)));
    }
    out.push_back(make_cert("b.spectral", Regime::IntervalSeparated, spec, sep, 1.0,
                            pair_norm(s, t, spec), pair_norm(x, y, spec)));
  }
  for (NormKind k : kAllNorms) {
    const auto bd = PairingNorm::block_diag(k);
    const auto mx = PairingNorm::max_of(k);
    out.push_back(make_cert("c.blockdiag." + std::string(to_string(k)), Regime::GeneralUI, bd,
                            delta, kHalfPi, pair_norm(s, t, bd), pair_norm(x, y, bd)));
    out.push_back(make_cert("c.max." + std::string(to_string(k)), Regime::GeneralUI, mx, delta,
                            std::numbers::pi, pair_norm(s, t, mx), pair_norm(x, y, mx)));
  }
  out.push_back(make_cert("c.spectral", Regime::GeneralUI, spec, delta, kHalfPi,
                          pair_norm(s, t, spec), pair_norm(x, y, spec)));
  return out;
}

std::vector<BoundCertificate> herm_bounds(const HermSylvesterProblem& p, const Matrix& x,
                                          std::optional<IntervalSeparation> sep) {
  const std::vector<double> la = eigenvalues_of(p.a);
  const std::vector<double> lb = eigenvalues_of(p.b);
  require_shape(x, lb.size(), la.size(), "X");
  const double delta = nearest_pair(la, lb).gap;

  // lambda lists are nonincreasing
  double sep_delta = 0.0;
  if (sep) {
    const IntervalSeparation& c = *sep;
    auto inside = [&](const std::vector<double>& v) {
      return v.back() >= c.alpha && v.front() <= c.beta;
    };
    auto outside = [&](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [&](double l) {
        return l <= c.alpha - c.delta || l >= c.beta + c.delta;
      });
    };
    if (!(c.alpha < c.beta) || !(c.delta > 0.0) ||
        !((inside(la) && outside(lb)) || (outside(la) && inside(lb)))) {
      throw PreconditionError("claimed interval separation does not hold for the spectra");
    }
    sep_delta = c.delta;
  } else if (lb.front() < la.back()) {
    sep_delta = la.back() - lb.front();
  } else if (la.front() < lb.back()) {
    sep_delta = lb.back() - la.front();
  }

  const double sf = p.s_rhs.frobenius_norm();
  std::vector<BoundCertificate> out;
  const auto frob = PairingNorm::block_diag(NormKind::Frobenius);
  out.push_back(make_cert("dk.frobenius", Regime::FrobeniusGap, frob, delta, 1.0, sf,
                          x.frobenius_norm()));
  for (NormKind k : kAllNorms) {
    const auto pk = PairingNorm::block_diag(k);
    const double sk = ui_norm(p.s_rhs, k);
    const double xk = ui_norm(x, k);
    if (sep_delta > 0.0) {
      out.push_back(make_cert("dk." + std::string(to_string(k)), Regime::IntervalSeparated, pk,
                              sep_delta, 1.0, sk, xk));
    }
    out.push_back(make_cert("bdm." + std::string(to_string(k)), Regime::GeneralUI, pk, delta,
                            kHalfPi, sk, xk));
  }
  return out;
}

EqualityWitness equality_witness(const Matrix& a, const Matrix& b) {
  if (!a.is_square()) throw DimensionError("witness: A must be square");
  const SvdResult sa = svd(a);
  const SvdResult sb = svd(b);
  const double delta = sa.sigma.min() - sb.sigma.max();
  if (!(delta > 0.0)) {
    throw PreconditionError("witness requires sigma_min(A) > sigma_max(B), got difference " +
                            std::to_string(delta));
  }
  const std::size_t r = a.rows();
  // A v = sigma_min u; B x = sigma_max y
  const Matrix u = sa.u.col(r - 1);
  const Matrix v = sa.v.col(r - 1);
  const Matrix y = sb.u.col(0);
  const Matrix x = sb.v.col(0);

  EqualityWitness w;
  w.x = y * u.adjoint();
  w.y = x * v.adjoint();
  w.delta = delta;
  auto [tx, ty] = coupled_operator(a, b, w.x, w.y);
  for (auto kind : {PairingNorm::Kind::BlockDiag, PairingNorm::Kind::MaxOf}) {
    for (NormKind k : kAllNorms) {
      const PairingNorm p{kind, k};
      const double ratio = pair_norm(tx, ty, p) / pair_norm(w.x, w.y, p);
      w.ratios.emplace_back(p, ratio);
      w.worst_deviation = std::max(w.worst_deviation, std::abs(ratio - delta));
    }
  }
  return w;
}

}  // namespace svdpert
