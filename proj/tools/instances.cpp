#include "instances.hpp"

#include <algorithm>

#include "svdpert/perturb.hpp"

namespace svdpert::cli {

Matrix random_with_sv(const std::vector<double>& s, std::size_t rows, std::size_t cols,
                      std::mt19937_64& rng) {
  const Matrix u = oracle::random_unitary(rows, rng);
  const Matrix v = oracle::random_unitary(cols, rng);
  return u * Matrix::diagonal(s, rows, cols) * v.adjoint();
}

CoupledSylvesterProblem coupled_instance(std::uint64_t seed, std::size_t max_dim, bool separated) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(1, max_dim);
  const std::size_t r = dim(rng), s = dim(rng), t = dim(rng);
  std::vector<double> sa(r), sb(std::min(s, t));
  if (separated) {
    std::uniform_real_distribution<double> lo(0.0, 1.0), hi(1.2, 3.0);
    for (double& x : sa) x = hi(rng);
    for (double& x : sb) x = lo(rng);
  } else {
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (double& x : sa) x = u(rng);
    for (double& x : sb) x = u(rng);
  }
  std::sort(sa.rbegin(), sa.rend());
  std::sort(sb.rbegin(), sb.rend());
  CoupledSylvesterProblem p;
  p.a = random_with_sv(sa, r, r, rng);
  p.b = random_with_sv(sb, s, t, rng);
  p.s_rhs = oracle::gaussian(s, r, rng);
  p.t_rhs = oracle::gaussian(t, r, rng);
  return p;
}

HermSylvesterProblem herm_instance(std::uint64_t seed, std::size_t max_dim, bool separated) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(1, max_dim);
  const std::size_t r = dim(rng), s = dim(rng);
  std::vector<double> la(r), lb(s);
  std::uniform_real_distribution<double> hi(1.2, 3.0), mid(-1.0, 1.0), wide(-3.0, 3.0);
  for (double& x : la) x = separated ? hi(rng) : wide(rng);
  for (double& x : lb) x = separated ? mid(rng) : wide(rng);
  auto herm = [&](const std::vector<double>& l) {
    const Matrix q = oracle::random_unitary(l.size(), rng);
    Matrix h = q * Matrix::diagonal(l) * q.adjoint();
    return (h + h.adjoint()) * 0.5;
  };
  HermSylvesterProblem p;
  p.a = herm(la);
  p.b = herm(lb);
  p.s_rhs = oracle::gaussian(s, r, rng);
  return p;
}

double spectral_gap(const CoupledSylvesterProblem& p) {
  return nearest_pair(singular_values(p.a), sv_ext(p.b).extended()).gap;
}

PerturbationBlocks scaled(const PerturbationBlocks& b, double s) {
  return {b.e11 * s, b.e12 * s, b.e21 * s, b.e22 * s};
}

double scale_for_kappa(const oracle::Instance& unit, PairingNorm p, double target) {
  auto kappa = [&](double s) { return gap_quantities(unit.ctx, scaled(unit.eb, s), p).kappa2; };
  double lo = 0.0, hi = 1.0;
  while (kappa(hi) < target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (kappa(mid) < target ? lo : hi) = mid;
  }
  return lo;
}

oracle::Instance kappa_instance(oracle::InstanceSpec spec, PairingNorm p, double target) {
  spec.pert_scale = 1.0;
  oracle::Instance inst = oracle::gen_instance(spec);
  const double s = scale_for_kappa(inst, p, target);
  inst.e *= s;
  inst.eb = scaled(inst.eb, s);
  return inst;
}

SinThetaInput sintheta_input(const oracle::Instance& inst) {
  const std::size_t m = inst.ctx.m(), n = inst.ctx.n(), r = inst.ctx.r;
  const SvdResult s = svd(inst.ctx.g + inst.e);
  const auto idx = oracle::greedy_match(inst.ctx.u1(), inst.ctx.v1(), s.u, s.v, r);
  SinThetaInput inp;
  inp.g = inst.ctx.g;
  inp.u1_t = Matrix(m, r);
  inp.v1_t = Matrix(n, r);
  std::vector<double> sig;
  for (std::size_t j = 0; j < r; ++j) {
    inp.u1_t.set_block(0, j, s.u.col(idx[j]));
    inp.v1_t.set_block(0, j, s.v.col(idx[j]));
    sig.push_back(s.sigma.values[idx[j]]);
  }
  inp.g1_t = Matrix::diagonal(sig);
  inp.u2 = inst.ctx.u2();
  inp.v2 = inst.ctx.v2();
  return inp;
}

}  // namespace svdpert::cli
