#ifndef GDUAL_DUALITY_HPP_
#define GDUAL_DUALITY_HPP_

// Approximately dual and g-dual frames of a fixed frame Phi.
//
// All constructions are parameterized by an operator (D with
// T_Phi U_{Phi^ad} = S^{1/2} D, or the target mixed operator A itself) and
// a right annihilator Theta of T_Phi. In matrix form, with T = T_Phi:
//
//   Phi^ad = D* S^{-1/2} T + Theta*        (T Phi^ad* = S^{1/2} D)
//   Phi^ad = A* S^{-1} T + Theta*          (T Phi^ad* = A)
//   Phi^gd = (A^{-1})* S^{-1} T + Theta*   (T Phi^gd* = A^{-1})
//
// and Theta only ever contributes kernel content, so it never changes the
// mixed operator.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>
#include <variant>

#include "gdual/error.hpp"
#include "gdual/frame.hpp"
#include "gdual/oplin.hpp"

namespace gdual {

namespace detail {

struct SqrtPair {
  LinearMap half;      // S^{1/2}
  LinearMap inv_half;  // S^{-1/2}
};

inline SqrtPair frame_operator_roots(const LinearMap &s) {
  return SqrtPair{psd_sqrt(s), psd_inv_sqrt(s)};
}

inline void require_operator_shape(const Frame &phi, const LinearMap &op,
                                   const char *name) {
  if (op.rows() != phi.dim() || op.cols() != phi.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(name) + " must be dim x dim of the frame");
  }
}

inline void require_annihilates(const Frame &phi, const Annihilator &theta) {
  const double defect = theta.defect_against(phi);
  if (defect > tol::kAnnihilator) {
    throw Error(ErrorKind::ContractViolation,
                "Theta does not annihilate T_Phi", defect);
  }
}

inline DualReport factorize(const Frame &phi, const Frame &psi) {
  require_frame(phi, "factorization");
  const LinearMap mixed = mixed_operator(phi, psi);
  const SqrtPair roots = frame_operator_roots(frame_operator(phi));
  DualReport r;
  LinearMap d = roots.inv_half * mixed;
  r.factor_residual = operator_norm(mixed - roots.half * d);
  r.rate = operator_norm(identity(phi.dim()) - roots.half * d);
  const double dn = operator_norm(d);
  r.dd_star_max = dn * dn;
  r.bessel_bound_psi = bessel_bound(psi);
  r.bessel_check = r.dd_star_max <= r.bessel_bound_psi + 1e-9;
  if (is_invertible(mixed)) r.corresponding_op = inverse(mixed);
  r.factor_D = std::move(d);
  return r;
}

}  // namespace detail

// Psi is a g-dual of Phi iff T_Phi U_Psi = S^{1/2} D with D invertible and
// D D* <= M_Psi Id. D is formed explicitly as S^{-1/2} T_Phi U_Psi.
inline DualReport gdual_factorization(const Frame &phi, const Frame &psi) {
  DualReport r = detail::factorize(phi, psi);
  r.kind = is_invertible(*r.factor_D) ? DualKind::gdual : DualKind::none;
  return r;
}

// Same factor D, approximately dual iff ||Id - S^{1/2} D|| < 1.
inline DualReport approx_factorization(const Frame &phi, const Frame &psi) {
  DualReport r = detail::factorize(phi, psi);
  r.kind = r.rate < 1.0 - tol::kStrict ? DualKind::approx : DualKind::none;
  return r;
}

inline Frame approx_dual_from_D(const Frame &phi, const LinearMap &d,
                                const Annihilator &theta) {
  require_frame(phi, "approx_dual_from_D");
  detail::require_operator_shape(phi, d, "D");
  detail::require_annihilates(phi, theta);
  const auto roots = detail::frame_operator_roots(frame_operator(phi));
  const double gap = operator_norm(identity(phi.dim()) - roots.half * d);
  if (!(gap < 1.0 - tol::kStrict)) {
    throw Error(ErrorKind::ContractViolation,
                "||Id - S^{1/2} D|| < 1 fails", gap);
  }
  return Frame(d.adjoint() * roots.inv_half * phi.synthesis() +
               theta.map().adjoint());
}

struct Admissibility {
  bool admissible = false;
  double distance = 0.0;          // ||S^{-1/2} - D||
  double threshold = 0.0;         // 1 / sqrt(M_Phi)
  double implied_rate_bound = 0;  // sqrt(M_Phi) * distance >= ||Id - S^{1/2} D||
};

// ||S^{-1/2} - D|| < 1/sqrt(M_Phi) is sufficient for D to produce an
// approximate dual, since ||Id - S^{1/2}D|| <= sqrt(M_Phi) ||S^{-1/2} - D||.
inline Admissibility admissible_D_check(const Frame &phi, const LinearMap &d) {
  require_frame(phi, "admissible_D_check");
  detail::require_operator_shape(phi, d, "D");
  const LinearMap s = frame_operator(phi);
  const double upper = frame_bounds(phi).upper;
  Admissibility a;
  a.distance = operator_norm(psd_inv_sqrt(s) - d);
  a.threshold = 1.0 / std::sqrt(upper);
  a.implied_rate_bound = std::sqrt(upper) * a.distance;
  a.admissible = a.distance < a.threshold;
  return a;
}

inline Frame approx_dual_from_A(const Frame &phi, const LinearMap &a,
                                const Annihilator &theta) {
  detail::require_operator_shape(phi, a, "A");
  const double gap = operator_norm(identity(phi.dim()) - a);
  if (!(gap < 1.0 - tol::kStrict)) {
    throw Error(ErrorKind::ContractViolation, "||Id - A|| < 1 fails", gap);
  }
  detail::require_annihilates(phi, theta);
  const Frame dual = canonical_dual(phi);
  return Frame(a.adjoint() * dual.synthesis() + theta.map().adjoint());
}

inline Frame gdual_from_A(const Frame &phi, const LinearMap &a,
                          const Annihilator &theta) {
  detail::require_operator_shape(phi, a, "A");
  detail::require_annihilates(phi, theta);
  const LinearMap a_inv = inverse(a);
  const Frame dual = canonical_dual(phi);
  return Frame(a_inv.adjoint() * dual.synthesis() + theta.map().adjoint());
}

struct ApproxDualParameters {
  LinearMap d;
  Annihilator theta;
};

// Inverse of approx_dual_from_D: D = S^{-1/2} T_Phi U_{Phi^ad} and
// Theta = U_{Phi^ad} - U_Phi S^{-1/2} D. Theta is re-projected onto
// ker(T_Phi), which only strips roundoff.
inline ApproxDualParameters recover_parameters(const Frame &phi,
                                               const Frame &phi_ad) {
  require_frame(phi, "recover_parameters");
  require_same_shape(phi, phi_ad);
  const LinearMap mixed = mixed_operator(phi, phi_ad);
  const double rate = operator_norm(identity(phi.dim()) - mixed);
  if (!(rate < 1.0 - tol::kStrict)) {
    throw Error(ErrorKind::NotApproxDual, "||Id - T_Phi U_Phi^ad|| >= 1", rate);
  }
  const LinearMap inv_half = psd_inv_sqrt(frame_operator(phi));
  LinearMap d = inv_half * mixed;
  const LinearMap raw = phi_ad.synthesis().adjoint() -
                        phi.synthesis().adjoint() * inv_half * d;
  const LinearMap kernel = kernel_basis(phi);
  LinearMap theta = kernel * (kernel.adjoint() * raw);
  return ApproxDualParameters{std::move(d), Annihilator(phi, std::move(theta))};
}

struct SqrtFactor {
  LinearMap d;
};
struct TargetOperator {
  LinearMap a;
};
using DualParameter = std::variant<SqrtFactor, TargetOperator>;

// Approximate duals built from an arbitrary exact dual Phi^d, with no
// annihilator supplied explicitly:
//   D:  phi^ad_k = D* S^{-1/2} phi_k - phi_k + S phi^d_k
//   A:  phi^ad_k = A* S^{-1} phi_k  - phi_k + S phi^d_k
inline Frame approx_dual_via_dual(const Frame &phi, const Frame &phi_d,
                                  const DualParameter &param) {
  require_same_shape(phi, phi_d);
  require_frame(phi, "approx_dual_via_dual");
  const double dual_gap = approximation_rate(phi, phi_d);
  if (dual_gap > tol::kDual) {
    throw Error(ErrorKind::NotDualPair, "Phi^d is not a dual of Phi", dual_gap);
  }
  const LinearMap s = frame_operator(phi);
  const LinearMap tail = s * phi_d.synthesis() - phi.synthesis();
  if (const auto *p = std::get_if<SqrtFactor>(&param)) {
    const Admissibility adm = admissible_D_check(phi, p->d);
    if (!adm.admissible) {
      throw Error(ErrorKind::ContractViolation,
                  "||S^{-1/2} - D|| < 1/sqrt(M_Phi) fails", adm.distance);
    }
    return Frame(p->d.adjoint() * psd_inv_sqrt(s) * phi.synthesis() + tail);
  }
  const LinearMap &a = std::get<TargetOperator>(param).a;
  detail::require_operator_shape(phi, a, "A");
  const double gap = operator_norm(identity(phi.dim()) - a);
  if (!(gap < 1.0 - tol::kStrict)) {
    throw Error(ErrorKind::ContractViolation, "||Id - A|| < 1 fails", gap);
  }
  return Frame(a.adjoint() * inverse(s) * phi.synthesis() + tail);
}

// f = sum_k <A_inv f, psi_k> phi_k with A_inv = (T_Phi U_Psi)^{-1}.
inline Vector reconstruct(const Frame &phi, const Frame &psi, const Vector &f) {
  const LinearMap a_inv = inverse(mixed_operator(phi, psi));
  if (f.size() != phi.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "reconstruct: bad vector length");
  }
  return synthesis(phi, analysis(psi, a_inv * f));
}

enum class RangeRelation { Equal, Incomparable, LeftInRight, RightInLeft };

inline std::string_view to_string(RangeRelation r) {
  switch (r) {
    case RangeRelation::Equal: return "Equal";
    case RangeRelation::Incomparable: return "Incomparable";
    case RangeRelation::LeftInRight: return "LeftInRight";
    case RangeRelation::RightInLeft: return "RightInLeft";
  }
  return "Incomparable";
}

namespace detail {

inline LinearMap range_basis(const LinearMap &m) {
  Eigen::BDCSVD<LinearMap> svd(m, Eigen::ComputeThinU);
  const Eigen::Index r = numerical_rank(m);
  return svd.matrixU().leftCols(r);
}

// sin of the largest principal angle between span(q) and span(basis),
// i.e. how far span(q) sticks out of span(basis).
inline double excess(const LinearMap &q, const LinearMap &basis) {
  if (q.cols() == 0) return 0.0;
  if (basis.cols() == 0) return 1.0;
  return operator_norm(q - basis * (basis.adjoint() * q));
}

}  // namespace detail

// Compares Range(U_Phi) and Range(U_Psi) inside C^n. For two frames with the
// same count both ranges have dimension d, so strict inclusion only shows up
// for Bessel sequences that are not frames.
inline RangeRelation range_compare(const Frame &phi, const Frame &psi,
                                   double angle_tol = 1e-9) {
  require_same_shape(phi, psi);
  const LinearMap q1 = detail::range_basis(analysis_operator(phi));
  const LinearMap q2 = detail::range_basis(analysis_operator(psi));
  const bool left_in_right = detail::excess(q1, q2) <= angle_tol;
  const bool right_in_left = detail::excess(q2, q1) <= angle_tol;
  if (left_in_right && right_in_left) return RangeRelation::Equal;
  if (left_in_right) return RangeRelation::LeftInRight;
  if (right_in_left) return RangeRelation::RightInLeft;
  return RangeRelation::Incomparable;
}

// For equivalent frames, (T_Phi U_Psi)^{-1} = T_{Psi~} U_{Phi~}.
inline LinearMap equivalence_inverse(const Frame &phi, const Frame &psi) {
  if (range_compare(phi, psi) != RangeRelation::Equal) {
    throw Error(ErrorKind::NotEquivalent, "Range(U_Phi) != Range(U_Psi)");
  }
  const Frame phi_dual = canonical_dual(phi);
  const Frame psi_dual = canonical_dual(psi);
  LinearMap result = mixed_operator(psi_dual, phi_dual);
  const LinearMap mixed = mixed_operator(phi, psi);
  const LinearMap id = identity(phi.dim());
  const double right = operator_norm(mixed * result - id);
  const double left = operator_norm(result * mixed - id);
  if (right > 1e-9 || left > 1e-9) {
    throw Error(ErrorKind::ContractViolation,
                "T_Psi~ U_Phi~ is not a two-sided inverse", std::max(left, right));
  }
  return result;
}

}  // namespace gdual

#endif  // GDUAL_DUALITY_HPP_
