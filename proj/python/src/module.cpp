#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "svdpert/errors.hpp"
#include "svdpert/linalg.hpp"
#include "svdpert/oracle.hpp"
#include "svdpert/perturb.hpp"
#include "svdpert/sintheta.hpp"
#include "svdpert/sylvester.hpp"

namespace py = pybind11;
using namespace svdpert;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const CArray& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-d array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  if (rows == 0 || cols == 0) return Matrix();
  return Matrix(rows, cols, std::vector<Complex>(a.data(), a.data() + a.size()));
}

std::optional<Matrix> to_matrix(const std::optional<CArray>& a) {
  if (!a) return std::nullopt;
  return to_matrix(*a);
}

py::array_t<Complex> to_array(const Matrix& m) {
  py::array_t<Complex> out({m.rows(), m.cols()});
  std::copy(m.entries().begin(), m.entries().end(), out.mutable_data());
  return out;
}

PairingNorm pairing_of(const std::string& kind, const std::string& norm) {
  return {parse_pairing_kind(kind), parse_norm_kind(norm)};
}

py::dict gap_dict(const GapReport& r) {
  py::dict d;
  d["delta"] = r.delta;
  d["delta_under"] = r.delta_under;
  d["epsilon"] = r.epsilon;
  d["g_norm"] = r.g_norm;
  d["kappa2"] = r.kappa2;
  d["c"] = r.c;
  d["separation"] = std::string(to_string(r.separation));
  d["condition_met"] = r.condition_met;
  return d;
}

py::list certs(const std::vector<BoundCertificate>& list) {
  py::list out;
  for (const auto& c : list) {
    py::dict d;
    d["id"] = c.id;
    d["regime"] = std::string(to_string(c.regime));
    d["pairing"] = describe(c.norm);
    d["delta"] = c.delta;
    d["constant"] = c.constant;
    d["bound_value"] = c.bound_value;
    d["measured"] = c.measured;
    d["satisfied"] = c.satisfied;
    out.append(d);
  }
  return out;
}

py::dict bound(const CArray& g, const CArray& e, std::size_t r, const std::optional<CArray>& u,
               const std::optional<CArray>& v, const std::string& norm,
               const std::string& pairing, bool force) {
  const Matrix gm = to_matrix(g);
  const auto um = to_matrix(u), vm = to_matrix(v);
  if (um.has_value() != vm.has_value()) throw PreconditionError("pass u and v together");
  const BlockContext ctx = um ? split_context(gm, *um, *vm, r) : split_context_svd(gm, r);
  const PerturbationBlocks eb = project_perturbation(ctx, to_matrix(e));
  const GapReport rep = gap_quantities(ctx, eb, pairing_of(pairing, norm));

  py::dict out;
  out["gap_report"] = gap_dict(rep);
  const ComparisonReport cmp = corollary_suite(ctx, eb);
  py::dict entries;
  for (const auto& c : cmp.entries) {
    entries[py::str(c.id)] = py::dict(py::arg("condition_met") = c.condition_met,
                                      py::arg("kappa") = c.kappa, py::arg("bound") = c.bound,
                                      py::arg("pairing") = describe(c.measured_in));
  }
  out["corollaries"] = entries;
  if (!rep.condition_met && !force) {
    out["rotation"] = py::none();
    return out;
  }
  const RotationPair rot = solve_rotations(ctx, eb, rep, force);
  const CorrectedDecomposition cd = build_corrected(ctx, eb, rot, rep);
  out["rotation"] = py::dict(
      py::arg("gamma") = to_array(rot.gamma), py::arg("omega") = to_array(rot.omega),
      py::arg("iterations") = rot.iterations, py::arg("pair_norm") = rot.pair_norm,
      py::arg("bound") = rep.condition_met ? rotation_bound(rep) : std::nan(""),
      py::arg("guaranteed") = rot.guaranteed);
  out["corrected"] = py::dict(
      py::arg("u_check") = to_array(cd.u_check), py::arg("v_check") = to_array(cd.v_check),
      py::arg("g1_check") = to_array(cd.g1_check), py::arg("g2_check") = to_array(cd.g2_check),
      py::arg("offdiag_residual") = cd.offdiag_residual,
      py::arg("multiset_defect") = cd.multiset_defect,
      py::arg("u1_distance") = std::vector<double>(cd.u1_dist.begin(), cd.u1_dist.end()),
      py::arg("v1_distance") = std::vector<double>(cd.v1_dist.begin(), cd.v1_dist.end()),
      py::arg("gamma_norm") = std::vector<double>(cd.gamma_norm.begin(), cd.gamma_norm.end()),
      py::arg("omega_norm") = std::vector<double>(cd.omega_norm.begin(), cd.omega_norm.end()));
  return out;
}

py::dict sin_theta(const CArray& g, const CArray& u1t, const CArray& v1t, const CArray& g1t,
                   const std::string& norm, const std::optional<CArray>& u2,
                   const std::optional<CArray>& v2) {
  SinThetaInput inp{to_matrix(g), to_matrix(u1t), to_matrix(v1t), to_matrix(g1t),
                    u2 ? to_matrix(*u2) : Matrix(), v2 ? to_matrix(*v2) : Matrix()};
  const SinThetaCertificate c = sin_theta_certificate(inp, parse_norm_kind(norm));
  return py::dict(py::arg("angles_u") = c.angles_u.angles, py::arg("angles_v") = c.angles_v.angles,
                  py::arg("delta") = c.delta, py::arg("c") = c.c, py::arg("lhs") = c.lhs,
                  py::arg("bound") = c.bound, py::arg("satisfied") = c.satisfied,
                  py::arg("residual_r") = c.r_norm, py::arg("residual_s") = c.s_norm);
}

}  // namespace

PYBIND11_MODULE(_svdpert, m) {
  m.doc() = "Certified perturbation bounds for singular subspaces";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<NotHermitianError>(m, "NotHermitianError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<SingularProblemError>(m, "SingularProblemError", base.ptr());
  py::register_exception<VerificationError>(m, "VerificationError", base.ptr());

  m.def("svd", [](const CArray& a) {
    const SvdResult s = svd(to_matrix(a));
    return py::make_tuple(to_array(s.u), s.sigma.values, to_array(s.v));
  }, "Full SVD: (u, sigma, v) with a = u diag(sigma) v^H");
  m.def("singular_values", [](const CArray& a) { return singular_values(to_matrix(a)); });
  m.def("ui_norm", [](const CArray& a, const std::string& norm) {
    return ui_norm(to_matrix(a), parse_norm_kind(norm));
  }, py::arg("a"), py::arg("norm") = "spectral");
  m.def("pair_norm", [](const CArray& x, const CArray& y, const std::string& pairing,
                        const std::string& norm) {
    return pair_norm(to_matrix(x), to_matrix(y), pairing_of(pairing, norm));
  }, py::arg("x"), py::arg("y"), py::arg("pairing") = "blockdiag", py::arg("norm") = "spectral");

  m.def("solve_coupled", [](const CArray& a, const CArray& b, const CArray& s, const CArray& t) {
    const SolutionPair sol = solve_coupled({to_matrix(a), to_matrix(b), to_matrix(s), to_matrix(t)});
    return py::dict(py::arg("x") = to_array(sol.x), py::arg("y") = to_array(sol.y),
                    py::arg("residual_1") = sol.residual_1, py::arg("residual_2") = sol.residual_2);
  }, "Solve X A - B Y = S, Y A^H - B^H X = T");
  m.def("coupled_bounds", [](const CArray& a, const CArray& b, const CArray& s, const CArray& t) {
    const CoupledSylvesterProblem p{to_matrix(a), to_matrix(b), to_matrix(s), to_matrix(t)};
    return certs(coupled_bounds(p, solve_coupled(p)));
  });
  m.def("equality_witness", [](const CArray& a, const CArray& b) {
    const EqualityWitness w = equality_witness(to_matrix(a), to_matrix(b));
    py::list ratios;
    for (const auto& [p, v] : w.ratios) ratios.append(py::make_tuple(describe(p), v));
    return py::dict(py::arg("x") = to_array(w.x), py::arg("y") = to_array(w.y),
                    py::arg("delta") = w.delta, py::arg("ratios") = ratios,
                    py::arg("worst_deviation") = w.worst_deviation);
  });
  m.def("interlace_check", [](const CArray& b, std::size_t r) {
    return interlace_check(to_matrix(b), r).all();
  });

  m.def("bound", &bound, py::arg("g"), py::arg("e"), py::arg("r"), py::arg("u") = py::none(),
        py::arg("v") = py::none(), py::arg("norm") = "frobenius", py::arg("pairing") = "blockdiag",
        py::arg("force") = false,
        "Gap report, rotation pair (Gamma, Omega) and corrected decomposition for G + E");
  m.def("footnote_distance", &footnote_distance);
  m.def("canonical_angles", [](const CArray& a, const CArray& b) {
    return canonical_angles({to_matrix(a), to_matrix(b)}).angles;
  });
  m.def("sin_theta", &sin_theta, py::arg("g"), py::arg("u1t"), py::arg("v1t"), py::arg("g1t"),
        py::arg("norm") = "spectral", py::arg("u2") = py::none(), py::arg("v2") = py::none());

  m.def("gen_instance", [](std::size_t mm, std::size_t n, std::size_t r, const std::string& profile,
                           double gap, double scale, std::uint64_t seed) {
    oracle::InstanceSpec spec{mm, n, r, {}, scale, seed};
    if (profile == "interval") {
      spec.gap = oracle::GapProfile::interval(gap);
    } else if (profile == "interleaved") {
      spec.gap = oracle::GapProfile::interleaved(gap);
    } else {
      throw PreconditionError("unknown gap profile '" + profile + "'");
    }
    const oracle::Instance inst = oracle::gen_instance(spec);
    return py::dict(py::arg("g") = to_array(inst.ctx.g), py::arg("e") = to_array(inst.e),
                    py::arg("u") = to_array(inst.ctx.u), py::arg("v") = to_array(inst.ctx.v));
  }, py::arg("m"), py::arg("n"), py::arg("r"), py::arg("profile") = "interval",
     py::arg("gap") = 1.0, py::arg("scale") = 0.05, py::arg("seed") = 0);
}
