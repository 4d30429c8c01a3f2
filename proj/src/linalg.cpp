#include "svdpert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "svdpert/errors.hpp"

namespace svdpert {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

struct ColumnStats {
  double alpha;   // ||w_p||^2
  double beta;    // ||w_q||^2
  Complex gamma;  // w_p^H w_q
};

ColumnStats column_stats(const Matrix& w, std::size_t p, std::size_t q) {
  ColumnStats s{0.0, 0.0, Complex{}};
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const Complex a = w(i, p);
    const Complex b = w(i, q);
    s.alpha += std::norm(a);
    s.beta += std::norm(b);
    s.gamma += std::conj(a) * b;
  }
  return s;
}

// Right-multiplies columns p, q of m by the unitary
//   [ c                 s             ]
//   [ -s*conj(phase)    c*conj(phase) ]
void rotate_columns(Matrix& m, std::size_t p, std::size_t q, double c, double s, Complex phase) {
  const Complex ph = std::conj(phase);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const Complex a = m(i, p);
    const Complex b = m(i, q) * ph;
    m(i, p) = c * a - s * b;
    m(i, q) = s * a + c * b;
  }
}

// Columns this short are roundoff; rotating them only reshuffles noise.
double roundoff_norm(const Matrix& w) {
  return kEps * static_cast<double>(w.rows()) * w.frobenius_norm();
}

// One-sided Jacobi on the columns of w (rows >= cols expected). When v is
// non-null the same rotations are accumulated into it.
int one_sided_jacobi(Matrix& w, Matrix* v) {
  const std::size_t n = w.cols();
  const double threshold = std::max(tol::jacobi, kEps * static_cast<double>(w.rows()));
  const double negligible = std::pow(roundoff_norm(w), 2);
  double worst = 0.0;
  for (int sweep = 1; sweep <= tol::max_sweeps; ++sweep) {
    bool rotated = false;
    worst = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const ColumnStats st = column_stats(w, p, q);
        const double g = std::abs(st.gamma);
        const double scale = std::sqrt(st.alpha) * std::sqrt(st.beta);
        if (g <= kTiny || g <= threshold * scale) continue;
        if (std::min(st.alpha, st.beta) <= negligible) continue;
        worst = std::max(worst, g / scale);
        rotated = true;
        const Complex phase = st.gamma / g;
        const double zeta = (st.beta - st.alpha) / (2.0 * g);
        const double t = sign_of(zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate_columns(w, p, q, c, s, phase);
        if (v != nullptr) rotate_columns(*v, p, q, c, s, phase);
      }
    }
    if (!rotated) return sweep;
  }
  throw ConvergenceError("one-sided Jacobi SVD", tol::max_sweeps, worst);
}

double column_norm(const Matrix& w, std::size_t j) {
  return w.cols_range(j, 1).frobenius_norm();
}

// Indices sorted by decreasing key; ties keep original order.
std::vector<std::size_t> order_decreasing(const std::vector<double>& key) {
  std::vector<std::size_t> idx(key.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  return idx;
}

// Fills columns [filled, m) of u with an orthonormal completion of columns [0, filled).
// Each step takes the unit vector e_k farthest from the current span.
void complete_basis(Matrix& u, std::size_t filled) {
  const std::size_t m = u.rows();
  for (std::size_t next = filled; next < m; ++next) {
    std::size_t best = 0;
    double best_res = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
      double in_span = 0.0;
      for (std::size_t j = 0; j < next; ++j) in_span += std::norm(u(k, j));
      if (1.0 - in_span > best_res) {
        best_res = 1.0 - in_span;
        best = k;
      }
    }
    std::vector<Complex> x(m, Complex{});
    x[best] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < next; ++j) {
        Complex dot{};
        for (std::size_t i = 0; i < m; ++i) dot += std::conj(u(i, j)) * x[i];
        for (std::size_t i = 0; i < m; ++i) x[i] -= dot * u(i, j);
      }
    }
    double nrm = 0.0;
    for (const Complex& z : x) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    if (!(nrm > 1e-8)) throw Error("failed to complete orthonormal basis");
    for (std::size_t i = 0; i < m; ++i) u(i, next) = x[i] / nrm;
  }
}

SvdResult svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix w = a;
  Matrix v = Matrix::identity(n);
  const int sweeps = one_sided_jacobi(w, &v);

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = column_norm(w, j);
  const auto order = order_decreasing(norms);

  SvdResult out;
  out.sweeps = sweeps;
  out.u = Matrix(m, m);
  out.v = Matrix(n, n);
  out.sigma.values.resize(n);
  out.sigma.ext_zeros = m - n;
  const double cutoff = std::max(roundoff_norm(a), kTiny / kEps);
  std::size_t nonzero = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma.values[k] = norms[j];
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
    if (norms[j] > cutoff) {
      for (std::size_t i = 0; i < m; ++i) out.u(i, k) = w(i, j) / norms[j];
      nonzero = k + 1;
    }
  }
  // zero singular values sort last, so the nonzero columns form a prefix
  complete_basis(out.u, nonzero);
  return out;
}

void require_square(const Matrix& h, const char* what) {
  if (!h.is_square()) {
    throw DimensionError(std::string(what) + ": matrix must be square, got " +
                         std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
  }
}

}  // namespace

std::vector<double> SingularSpectrum::extended() const {
  std::vector<double> out = values;
  out.insert(out.end(), ext_zeros, 0.0);
  return out;
}

SvdResult svd(const Matrix& a) {
  if (a.empty()) throw DimensionError("svd of empty matrix");
  if (a.rows() >= a.cols()) return svd_tall(a);
  SvdResult t = svd_tall(a.adjoint());
  std::swap(t.u, t.v);
  return t;
}

std::vector<double> singular_values(const Matrix& a) {
  if (a.empty()) throw DimensionError("singular values of empty matrix");
  Matrix w = a.rows() >= a.cols() ? a : a.adjoint();
  one_sided_jacobi(w, nullptr);
  std::vector<double> s(w.cols());
  for (std::size_t j = 0; j < w.cols(); ++j) s[j] = column_norm(w, j);
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

double hermitian_defect(const Matrix& h) {
  require_square(h, "hermitian_defect");
  double worst = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = i; j < h.cols(); ++j)
      worst = std::max(worst, std::abs(h(i, j) - std::conj(h(j, i))));
  return worst;
}

EighResult eigh(const Matrix& h_in) {
  require_square(h_in, "eigh");
  if (h_in.empty()) throw DimensionError("eigh of empty matrix");
  const std::size_t n = h_in.rows();
  const double limit = tol::herm(h_in.frobenius_norm());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double d = std::abs(h_in(i, j) - std::conj(h_in(j, i)));
      if (d > limit) throw NotHermitianError(i, j, d);
    }
  }

  Matrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = h_in(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      h(i, j) = 0.5 * (h_in(i, j) + std::conj(h_in(j, i)));
      h(j, i) = std::conj(h(i, j));
    }
  }
  Matrix q = Matrix::identity(n);

  int sweeps_used = 0;
  double worst = 0.0;
  for (int sweep = 1;; ++sweep) {
    if (sweep > tol::max_sweeps) throw ConvergenceError("Jacobi eigensolver", tol::max_sweeps, worst);
    bool rotated = false;
    worst = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q_ = p + 1; q_ < n; ++q_) {
        const double a = std::abs(h(p, q_));
        const double app = h(p, p).real();
        const double aqq = h(q_, q_).real();
        if (a <= kTiny || a <= tol::jacobi * std::sqrt(std::abs(app * aqq))) continue;
        rotated = true;
        worst = std::max(worst, a);
        const Complex phase = h(p, q_) / a;
        const double theta = (aqq - app) / (2.0 * a);
        const double t = sign_of(theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // h <- h J
        rotate_columns(h, p, q_, c, s, phase);
        // h <- J^H h
        for (std::size_t j = 0; j < n; ++j) {
          const Complex x = h(p, j);
          const Complex y = h(q_, j) * phase;
          h(p, j) = c * x - s * y;
          h(q_, j) = s * x + c * y;
        }
        h(p, p) = app - t * a;
        h(q_, q_) = aqq + t * a;
        h(p, q_) = 0.0;
        h(q_, p) = 0.0;
        rotate_columns(q, p, q_, c, s, phase);
      }
    }
    if (!rotated) {
      sweeps_used = sweep;
      break;
    }
  }

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = h(i, i).real();
  const auto order = order_decreasing(diag);
  EighResult out;
  out.sweeps = sweeps_used;
  out.q = Matrix(n, n);
  out.lambda.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.lambda[k] = diag[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.q(i, k) = q(i, order[k]);
  }
  return out;
}

std::string_view to_string(NormKind k) {
  switch (k) {
    case NormKind::Spectral:
      return "spectral";
    case NormKind::Frobenius:
      return "frobenius";
    case NormKind::Nuclear:
      return "nuclear";
  }
  return "?";
}

NormKind parse_norm_kind(std::string_view s) {
  if (s == "spectral") return NormKind::Spectral;
  if (s == "frobenius") return NormKind::Frobenius;
  if (s == "nuclear") return NormKind::Nuclear;
  throw PreconditionError("unknown norm '" + std::string(s) + "'");
}

std::string_view to_string(PairingNorm::Kind k) {
  return k == PairingNorm::Kind::BlockDiag ? "blockdiag" : "max";
}

PairingNorm::Kind parse_pairing_kind(std::string_view s) {
  if (s == "blockdiag") return PairingNorm::Kind::BlockDiag;
  if (s == "max") return PairingNorm::Kind::MaxOf;
  throw PreconditionError("unknown pairing '" + std::string(s) + "'");
}

std::string describe(PairingNorm p) {
  return std::string(to_string(p.kind)) + "(" + std::string(to_string(p.norm)) + ")";
}

double ui_norm_from_values(const std::vector<double>& sigma, NormKind k) {
  switch (k) {
    case NormKind::Spectral:
      return sigma.empty() ? 0.0 : *std::max_element(sigma.begin(), sigma.end());
    case NormKind::Frobenius: {
      double s = 0.0;
      for (double x : sigma) s += x * x;
      return std::sqrt(s);
    }
    case NormKind::Nuclear:
      return std::accumulate(sigma.begin(), sigma.end(), 0.0);
  }
  return 0.0;
}

double ui_norm(const Matrix& a, NormKind k) {
  if (k == NormKind::Frobenius) return a.frobenius_norm();
  return ui_norm_from_values(singular_values(a), k);
}

double pair_norm(const Matrix& g, const Matrix& w, PairingNorm p) {
  if (p.kind == PairingNorm::Kind::MaxOf) return std::max(ui_norm(g, p.norm), ui_norm(w, p.norm));
  switch (p.norm) {
    case NormKind::Spectral:
      return std::max(ui_norm(g, NormKind::Spectral), ui_norm(w, NormKind::Spectral));
    case NormKind::Frobenius:
      return std::hypot(g.frobenius_norm(), w.frobenius_norm());
    case NormKind::Nuclear:
      return ui_norm(g, NormKind::Nuclear) + ui_norm(w, NormKind::Nuclear);
  }
  return 0.0;
}

namespace {

Matrix identity_plus_gram(const Matrix& g) {
  Matrix m = g.adjoint() * g;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += 1.0;
  return m;
}

}  // namespace

Matrix inv_sqrt_gram(const Matrix& g) {
  const EighResult e = eigh(identity_plus_gram(g));
  return hermitian_function(e, [](double lam) { return 1.0 / std::sqrt(lam); });
}

Matrix sqrt_gram(const Matrix& g) {
  const EighResult e = eigh(identity_plus_gram(g));
  return hermitian_function(e, [](double lam) { return std::sqrt(lam); });
}

SingularSpectrum sv_ext(const Matrix& a) {
  SingularSpectrum s;
  s.values = singular_values(a);
  s.ext_zeros = a.rows() > a.cols() ? a.rows() - a.cols() : a.cols() - a.rows();
  return s;
}

double orthonormality_defect(const Matrix& q) {
  Matrix g = q.adjoint() * q;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return g.frobenius_norm();
}

InterlaceReport interlace_check(const Matrix& b, std::size_t r) {
  const std::size_t m = b.rows();
  const std::size_t n = b.cols();
  if (r < 1 || r >= std::min(m, n)) {
    throw PreconditionError("interlace_check: need 1 <= r < min(m, n), got r=" +
                            std::to_string(r));
  }
  const std::vector<double> s = singular_values(b);
  const double slack = 1e-12 * s.front();

  InterlaceReport rep;
  rep.r = r;
  rep.sigma_r = s[r - 1];
  rep.sigma_r1 = s[r];
  rep.smin_cols = singular_values(b.cols_range(0, r)).back();
  rep.smin_rows = singular_values(b.rows_range(0, r)).back();
  rep.smin_lead = singular_values(b.block(0, 0, r, r)).back();
  rep.smax_tail_cols = singular_values(b.cols_range(r, n - r)).front();
  rep.smax_tail_rows = singular_values(b.rows_range(r, m - r)).front();

  const double block_max = std::max(rep.smin_cols, rep.smin_rows);
  rep.sigma_r_ge_blocks = rep.sigma_r + slack >= block_max;
  rep.blocks_ge_lead = block_max + slack >= rep.smin_lead;
  rep.sigma_r1_le_cols = rep.sigma_r1 <= rep.smax_tail_cols + slack;
  rep.sigma_r1_le_rows = rep.sigma_r1 <= rep.smax_tail_rows + slack;
  return rep;
}

}  // namespace svdpert
