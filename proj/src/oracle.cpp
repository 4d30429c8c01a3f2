#include "svdpert/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "svdpert/errors.hpp"
#include "svdpert/linalg.hpp"

namespace svdpert::oracle {

namespace {

constexpr int kDrawRetries = 1000;
constexpr int kValueRetries = 10000;

void validate(const InstanceSpec& s) {
  if (s.m == 0 || s.n == 0) throw PreconditionError("instance dimensions must be positive");
  if (s.r < 1 || s.r >= std::min(s.m, s.n)) {
    throw PreconditionError("instance split r=" + std::to_string(s.r) + " outside [1, " +
                            std::to_string(std::min(s.m, s.n)) + ")");
  }
  if (!(s.pert_scale >= 0.0) || !std::isfinite(s.pert_scale)) {
    throw PreconditionError("pert_scale must be finite and nonnegative");
  }
  if (!(s.gap.value > 0.0) || !std::isfinite(s.gap.value)) {
    throw PreconditionError("gap profile value must be finite and positive");
  }
}

void sort_desc(std::vector<double>& v) { std::sort(v.begin(), v.end(), std::greater<>()); }

void draw_interval(const InstanceSpec& s, std::mt19937_64& rng, std::vector<double>& s1,
                   std::vector<double>& s2) {
  const double lo1 = kGapAnchor + s.gap.value;
  std::uniform_real_distribution<double> top(lo1, lo1 + 2.0);
  std::uniform_real_distribution<double> bottom(0.0, kGapAnchor);
  s1[0] = lo1;
  for (std::size_t i = 1; i < s1.size(); ++i) s1[i] = top(rng);
  s2[0] = kGapAnchor;
  for (std::size_t i = 1; i < s2.size(); ++i) s2[i] = bottom(rng);
}

void draw_interleaved(const InstanceSpec& s, std::mt19937_64& rng, std::vector<double>& s1,
                      std::vector<double>& s2) {
  const double g = s.gap.value;
  if (g >= 1.5) {
    throw PreconditionError("interleaved min_gap " + std::to_string(g) +
                            " is infeasible on [0, 3]");
  }
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  const bool has_zero = s.m != s.n;
  for (int draw = 0; draw < kDrawRetries; ++draw) {
    for (double& x : s2) x = unif(rng);
    bool ok = true;
    for (double& mu : s1) {
      bool found = false;
      for (int t = 0; t < kValueRetries && !found; ++t) {
        mu = unif(rng);
        found = !(has_zero && mu < g);
        for (double nu : s2) found = found && std::abs(mu - nu) >= g;
      }
      if (!found) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    const double min1 = *std::min_element(s1.begin(), s1.end());
    const double max2 = *std::max_element(s2.begin(), s2.end());
    if (min1 > max2) continue;  // separated draws belong to the other profile
    sort_desc(s1);
    sort_desc(s2);
    return;
  }
  throw PreconditionError("could not draw an interleaved spectrum with min_gap " +
                          std::to_string(g));
}

Matrix rect_diag(const std::vector<double>& d, std::size_t rows, std::size_t cols) {
  return Matrix::diagonal(d, rows, cols);
}

Instance assemble(std::size_t m, std::size_t n, std::size_t r, std::vector<double> s1,
                  std::vector<double> s2, std::mt19937_64& rng) {
  const Matrix u = random_unitary(m, rng);
  const Matrix v = random_unitary(n, rng);
  // G1 and G2 are generic (non-diagonal) blocks with the prescribed spectra
  const Matrix g1 = random_unitary(r, rng) * Matrix::diagonal(s1) * random_unitary(r, rng).adjoint();
  const Matrix g2 = random_unitary(m - r, rng) * rect_diag(s2, m - r, n - r) *
                    random_unitary(n - r, rng).adjoint();
  Instance inst;
  inst.ctx.g = u * blkdiag(g1, g2) * v.adjoint();
  inst.ctx.u = u;
  inst.ctx.v = v;
  inst.ctx.r = r;
  inst.ctx.g1 = g1;
  inst.ctx.g2 = g2;
  inst.sv_g1 = std::move(s1);
  inst.sv_g2 = std::move(s2);
  return inst;
}

/// Solves the dense real system m x = rhs in place (m is n x n row-major).
std::vector<double> gauss_solve(std::vector<double> a, std::vector<double> rhs, std::size_t n) {
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  const double tiny = 1e-14 * scale;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    }
    if (!(std::abs(a[piv * n + k]) > tiny)) {
      throw PreconditionError("vectorized system is numerically singular at column " +
                              std::to_string(k));
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(rhs[k], rhs[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      rhs[i] -= f * rhs[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i * n + j] * x[j];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

/// Real matrix of a complex-linear map given as a list of unknown blocks.
/// `apply` maps the unknown blocks to the output blocks.
template <typename Apply>
std::vector<double> real_operator(const std::vector<Matrix>& shapes, std::size_t out_len,
                                  Apply apply) {
  std::size_t n_unknown = 0;
  for (const Matrix& s : shapes) n_unknown += s.size();
  const std::size_t cols = 2 * n_unknown;
  const std::size_t rows = 2 * out_len;
  std::vector<double> m(rows * cols, 0.0);
  std::size_t col = 0;
  for (std::size_t blk = 0; blk < shapes.size(); ++blk) {
    for (std::size_t idx = 0; idx < shapes[blk].size(); ++idx) {
      for (const Complex unit : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
        std::vector<Matrix> xs;
        for (const Matrix& s : shapes) xs.emplace_back(s.rows(), s.cols());
        xs[blk](idx / shapes[blk].cols(), idx % shapes[blk].cols()) = unit;
        const std::vector<Matrix> outs = apply(xs);
        std::size_t row = 0;
        for (const Matrix& o : outs) {
          for (const Complex z : o.entries()) {
            m[row * cols + col] = z.real();
            m[(row + out_len) * cols + col] = z.imag();
            ++row;
          }
        }
        ++col;
      }
    }
  }
  return m;
}

std::vector<double> real_rhs(const std::vector<Matrix>& blocks) {
  std::vector<double> re;
  std::vector<double> im;
  for (const Matrix& b : blocks) {
    for (const Complex z : b.entries()) {
      re.push_back(z.real());
      im.push_back(z.imag());
    }
  }
  re.insert(re.end(), im.begin(), im.end());
  return re;
}

std::vector<Matrix> unpack(const std::vector<double>& x, const std::vector<Matrix>& shapes) {
  std::vector<Matrix> out;
  std::size_t k = 0;
  for (const Matrix& s : shapes) {
    Matrix m(s.rows(), s.cols());
    for (std::size_t i = 0; i < s.rows(); ++i) {
      for (std::size_t j = 0; j < s.cols(); ++j) {
        m(i, j) = Complex(x[k], x[k + 1]);
        k += 2;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

Matrix inverse_via_svd(const SvdResult& s) {
  const std::size_t n = s.sigma.values.size();
  Matrix inv(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 1.0 / s.sigma.values[k];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) inv(i, j) += s.v(i, k) * w * std::conj(s.u(j, k));
  }
  return inv;
}

}  // namespace

Matrix gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double re = nd(rng);
      const double im = nd(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

Matrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  Matrix q = Matrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix v = gaussian(n, 1, rng);
    double vv = 0.0;
    for (const Complex z : v.entries()) vv += std::norm(z);
    if (vv == 0.0) continue;
    // q <- q (I - 2 v v^H / v^H v)
    const Matrix qv = q * v;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q(i, j) -= 2.0 / vv * qv(i, 0) * std::conj(v(j, 0));
  }
  return q;
}

PerturbationBlocks blocks_of(const Matrix& u, const Matrix& v, const Matrix& e, std::size_t r) {
  const Matrix h = u.adjoint() * e * v;
  const std::size_t mr = h.rows() - r;
  const std::size_t nr = h.cols() - r;
  return {h.block(0, 0, r, r), h.block(0, r, r, nr), h.block(r, 0, mr, r), h.block(r, r, mr, nr)};
}

Instance gen_instance(const InstanceSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::vector<double> s1(spec.r);
  std::vector<double> s2(std::min(spec.m - spec.r, spec.n - spec.r));
  if (spec.gap.kind == GapProfile::Kind::IntervalSeparated) {
    draw_interval(spec, rng, s1, s2);
  } else {
    draw_interleaved(spec, rng, s1, s2);
  }
  sort_desc(s1);
  sort_desc(s2);
  Instance inst = assemble(spec.m, spec.n, spec.r, std::move(s1), std::move(s2), rng);
  if (spec.pert_scale > 0.0) {
    Matrix z = gaussian(spec.m, spec.n, rng);
    z *= spec.pert_scale / z.frobenius_norm();
    inst.e = std::move(z);
  } else {
    inst.e = Matrix(spec.m, spec.n);
  }
  inst.eb = blocks_of(inst.ctx.u, inst.ctx.v, inst.e, spec.r);
  return inst;
}

Instance gen_offdiag_instance(std::size_t m, std::size_t n, std::size_t r, double width,
                              double ratio, std::uint64_t seed) {
  InstanceSpec spec{m, n, r, GapProfile::interval(width), 0.0, seed};
  validate(spec);
  if (!(ratio >= 0.0)) throw PreconditionError("ratio must be nonnegative");
  std::mt19937_64 rng(seed);
  std::vector<double> s1(r);
  std::vector<double> s2(std::min(m - r, n - r));
  draw_interval(spec, rng, s1, s2);
  sort_desc(s1);
  sort_desc(s2);
  Instance inst = assemble(m, n, r, std::move(s1), std::move(s2), rng);

  const double target = ratio * width;
  auto scaled = [&](std::size_t rows, std::size_t cols) {
    Matrix z = gaussian(rows, cols, rng);
    z *= target / singular_values(z).front();
    return z;
  };
  Matrix h(m, n);
  h.set_block(0, r, scaled(r, n - r));
  h.set_block(r, 0, scaled(m - r, r));
  inst.e = inst.ctx.u * h * inst.ctx.v.adjoint();
  inst.eb = blocks_of(inst.ctx.u, inst.ctx.v, inst.e, r);
  return inst;
}

VectorizedPair vectorized_coupled_solve(const Matrix& a, const Matrix& b, const Matrix& s,
                                        const Matrix& t) {
  const std::size_t r = a.rows();
  if (!a.is_square() || s.rows() != b.rows() || t.rows() != b.cols() || s.cols() != r ||
      t.cols() != r) {
    throw DimensionError("vectorized coupled solve: shapes do not conform");
  }
  const Matrix ah = a.adjoint();
  const Matrix bh = b.adjoint();
  auto apply = [&](const std::vector<Matrix>& xs) {
    return std::vector<Matrix>{xs[0] * a - b * xs[1], xs[1] * ah - bh * xs[0]};
  };
  const std::vector<Matrix> shapes{Matrix(b.rows(), r), Matrix(b.cols(), r)};
  const std::size_t out_len = s.size() + t.size();
  const std::vector<double> op = real_operator(shapes, out_len, apply);
  const std::vector<double> x = gauss_solve(op, real_rhs({s, t}), 2 * out_len);

  // real_operator orders unknowns (re, im) per entry; unpack reads them in pairs
  std::vector<Matrix> xy = unpack(x, shapes);
  VectorizedPair out;
  out.x = std::move(xy[0]);
  out.y = std::move(xy[1]);
  const std::vector<Matrix> res = apply({out.x, out.y});
  out.residual_1 = (res[0] - s).frobenius_norm();
  out.residual_2 = (res[1] - t).frobenius_norm();
  return out;
}

Matrix vectorized_herm_solve(const Matrix& a, const Matrix& b, const Matrix& s) {
  if (!a.is_square() || !b.is_square() || s.rows() != b.rows() || s.cols() != a.rows()) {
    throw DimensionError("vectorized Sylvester solve: shapes do not conform");
  }
  auto apply = [&](const std::vector<Matrix>& xs) {
    return std::vector<Matrix>{xs[0] * a - b * xs[0]};
  };
  const std::vector<Matrix> shapes{Matrix(s.rows(), s.cols())};
  const std::vector<double> op = real_operator(shapes, s.size(), apply);
  const std::vector<double> x = gauss_solve(op, real_rhs({s}), 2 * s.size());
  return unpack(x, shapes)[0];
}

std::vector<std::size_t> greedy_match(const Matrix& u1, const Matrix& v1, const Matrix& ut,
                                      const Matrix& vt, std::size_t r) {
  const std::size_t k = std::min(ut.cols(), vt.cols());
  const Matrix pu = u1.adjoint() * ut;
  const Matrix pv = v1.adjoint() * vt;
  std::vector<double> score(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < pu.rows(); ++i) score[j] += std::norm(pu(i, j));
    for (std::size_t i = 0; i < pv.rows(); ++i) score[j] += std::norm(pv(i, j));
  }
  std::vector<std::size_t> picked;
  std::vector<bool> used(k, false);
  for (std::size_t step = 0; step < r && step < k; ++step) {
    std::size_t best = k;
    for (std::size_t j = 0; j < k; ++j) {
      if (!used[j] && (best == k || score[j] > score[best])) best = j;
    }
    used[best] = true;
    picked.push_back(best);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::optional<RotationOracle> direct_rotation_oracle(const BlockContext& ctx, const Matrix& e) {
  const std::size_t m = ctx.g.rows();
  const std::size_t n = ctx.g.cols();
  const std::size_t r = ctx.r;
  const Matrix gt = ctx.g + e;
  const SvdResult sv = svd(gt);
  const Matrix u1 = ctx.u.cols_range(0, r);
  const Matrix u2 = ctx.u.cols_range(r, m - r);
  const Matrix v1 = ctx.v.cols_range(0, r);
  const Matrix v2 = ctx.v.cols_range(r, n - r);

  RotationOracle out;
  out.selected = greedy_match(u1, v1, sv.u, sv.v, r);
  Matrix ut1(m, r);
  Matrix vt1(n, r);
  for (std::size_t k = 0; k < r; ++k) {
    ut1.set_block(0, k, sv.u.col(out.selected[k]));
    vt1.set_block(0, k, sv.v.col(out.selected[k]));
  }
  const SvdResult cu = svd(u1.adjoint() * ut1);
  const SvdResult cv = svd(v1.adjoint() * vt1);
  const double cond_u = cu.sigma.max() / cu.sigma.min();
  const double cond_v = cv.sigma.max() / cv.sigma.min();
  out.cond = std::max(cond_u, cond_v);
  if (!(out.cond <= 1e8)) return std::nullopt;

  out.gamma = u2.adjoint() * ut1 * inverse_via_svd(cu);
  out.omega = v2.adjoint() * vt1 * inverse_via_svd(cv);

  const PerturbationBlocks eb = blocks_of(ctx.u, ctx.v, e, r);
  const Matrix a = ctx.g1 + eb.e11;
  const Matrix b = ctx.g2 + eb.e22;
  const Matrix& gm = out.gamma;
  const Matrix& om = out.omega;
  out.residual_1 = (gm * a - b * om - eb.e21 + gm * eb.e12 * om).frobenius_norm();
  out.residual_2 =
      (om * a.adjoint() - b.adjoint() * gm - eb.e12.adjoint() + om * eb.e21.adjoint() * gm)
          .frobenius_norm();
  return out;
}

}  // namespace svdpert::oracle
