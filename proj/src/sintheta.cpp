#include "svdpert/sintheta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "svdpert/errors.hpp"
#include "svdpert/sylvester.hpp"

namespace svdpert {

namespace {

void require_orthonormal(const Matrix& q, const char* name) {
  const double d = orthonormality_defect(q);
  const double lim = tol::unitary(q.rows());
  if (d > lim) {
    throw PreconditionError(std::string(name) + " does not have orthonormal columns (defect " +
                            std::to_string(d) + ")");
  }
}

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(name) + " must be " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

/// Orthonormal basis of the orthogonal complement of range(q), q with orthonormal columns.
Matrix complement(const Matrix& q) {
  return svd(q).u.cols_range(q.cols(), q.rows() - q.cols());
}

double max_deviation(std::vector<double> sines, const std::vector<double>& sv) {
  // sines has r entries, sv has min(r, m-r); the excess sines must vanish
  double worst = 0.0;
  for (std::size_t i = 0; i < sines.size(); ++i) {
    const double ref = i < sv.size() ? sv[i] : 0.0;
    worst = std::max(worst, std::abs(sines[i] - ref));
  }
  return worst;
}

}  // namespace

CanonicalAngles canonical_angles(const SubspacePair& p) {
  const Matrix& a = p.basis_a;
  const Matrix& b = p.basis_b;
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("canonical angles need bases of equal shape");
  }
  if (a.cols() > a.rows()) throw DimensionError("basis has more columns than rows");
  require_orthonormal(a, "basis_a");
  require_orthonormal(b, "basis_b");
  const std::size_t m = a.rows();
  const std::size_t r = a.cols();

  CanonicalAngles out;
  std::vector<double> cs = singular_values(a.adjoint() * b);  // nonincreasing
  std::reverse(cs.begin(), cs.end());
  for (double& c : cs) c = std::clamp(c, 0.0, 1.0);
  out.cosines = cs;

  out.sines.assign(r, 0.0);
  if (r < m) {
    const std::vector<double> sn = singular_values(complement(a).adjoint() * b);
    std::copy(sn.begin(), sn.end(), out.sines.begin());
  }
  // acos alone loses half the digits near zero; pairing both routes does not
  out.angles.reserve(r);
  for (std::size_t i = 0; i < r; ++i) out.angles.push_back(std::atan2(out.sines[i], out.cosines[i]));
  for (std::size_t i = 0; i < r; ++i) {
    const double d = std::abs(out.cosines[i] * out.cosines[i] + out.sines[i] * out.sines[i] - 1.0);
    out.route_defect = std::max(out.route_defect, d);
  }
  if (out.route_defect > 1e-10) {
    throw VerificationError("cosine and sine routes of canonical angles", out.route_defect, 1e-10);
  }
  return out;
}

std::pair<Matrix, Matrix> residuals(const SinThetaInput& inp) {
  const std::size_t m = inp.g.rows();
  const std::size_t n = inp.g.cols();
  const std::size_t r = inp.u1_t.cols();
  require_shape(inp.u1_t, m, r, "u1t");
  require_shape(inp.v1_t, n, r, "v1t");
  require_shape(inp.g1_t, r, r, "g1t");
  return {inp.g * inp.v1_t - inp.u1_t * inp.g1_t,
          inp.g.adjoint() * inp.u1_t - inp.v1_t * inp.g1_t.adjoint()};
}

SinThetaCertificate sin_theta_certificate(const SinThetaInput& inp, NormKind k) {
  auto [rm, sm] = residuals(inp);
  const std::size_t m = inp.g.rows();
  const std::size_t n = inp.g.cols();
  const std::size_t r = inp.u1_t.cols();
  if (r < 1 || r >= std::min(m, n)) {
    throw PreconditionError("subspace dimension r=" + std::to_string(r) + " outside [1, " +
                            std::to_string(std::min(m, n)) + ")");
  }
  require_orthonormal(inp.u1_t, "u1t");
  require_orthonormal(inp.v1_t, "v1t");

  Matrix u2 = inp.u2;
  Matrix v2 = inp.v2;
  if (u2.empty() != v2.empty()) throw PreconditionError("supply both u2 and v2, or neither");
  if (u2.empty()) {
    const SvdResult s = svd(inp.g);
    u2 = s.u.cols_range(r, m - r);
    v2 = s.v.cols_range(r, n - r);
  } else {
    require_shape(u2, m, m - r, "u2");
    require_shape(v2, n, n - r, "v2");
    require_orthonormal(u2, "u2");
    require_orthonormal(v2, "v2");
  }
  const Matrix g2 = u2.adjoint() * inp.g * v2;
  const double leak = std::hypot((inp.g * v2 - u2 * g2).frobenius_norm(),
                                 (inp.g.adjoint() * u2 - v2 * g2.adjoint()).frobenius_norm());
  const double leak_tol = 1e-12 * inp.g.frobenius_norm();
  if (leak > leak_tol) {
    throw PreconditionError("u2, v2 do not block-diagonalize g (leak " + std::to_string(leak) +
                            ")");
  }
  const Matrix u1 = complement(u2);
  const Matrix v1 = complement(v2);

  SinThetaCertificate cert;
  cert.norm = k;
  const SingularSpectrum st = sv_ext(inp.g1_t);
  const SingularSpectrum s2 = sv_ext(g2);
  cert.delta = nearest_pair(st.values, s2.extended()).gap;
  if (!(cert.delta > 0.0)) {
    throw PreconditionError("sin-theta gap is not positive (delta = " +
                            std::to_string(cert.delta) + ")");
  }
  cert.c = (st.min() > s2.max() || k == NormKind::Frobenius) ? 1.0 : std::numbers::pi / 2.0;

  cert.angles_u = canonical_angles({u1, inp.u1_t});
  cert.angles_v = canonical_angles({v1, inp.v1_t});
  std::vector<double> all = cert.angles_u.sines;
  all.insert(all.end(), cert.angles_v.sines.begin(), cert.angles_v.sines.end());
  std::sort(all.begin(), all.end(), std::greater<>());
  cert.lhs = ui_norm_from_values(all, k);

  cert.sin_identity_defect =
      std::max(max_deviation(cert.angles_u.sines, singular_values(u2.adjoint() * inp.u1_t)),
               max_deviation(cert.angles_v.sines, singular_values(v2.adjoint() * inp.v1_t)));

  cert.r_norm = rm.frobenius_norm();
  cert.s_norm = sm.frobenius_norm();
  cert.rhs_norm = pair_norm(rm, sm, PairingNorm::block_diag(k));
  cert.bound = cert.c * cert.rhs_norm / cert.delta;
  // absolute slack covers roundoff when the pair is exact and both sides vanish
  cert.satisfied = cert.lhs <= cert.bound * (1.0 + 1e-10) + 1e-13;
  return cert;
}

}  // namespace svdpert
