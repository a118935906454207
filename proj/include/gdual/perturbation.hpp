#ifndef GDUAL_PERTURBATION_HPP_
#define GDUAL_PERTURBATION_HPP_

// Transfer of approximate duals and g-duals from a frame Phi to a nearby
// frame Psi.
//
// Write B = T_Phi U_{Phi^ad} for the mixed operator to preserve and
// Theta for the annihilator with Phi^ad = B* S_Phi^{-1} T_Phi + Theta*.
// The same parameters applied to Psi give
//
//   Omega  = B* S_Psi^{-1} T_Psi + Theta*
//   C      = T_Omega U_Psi (B*)^{-1}  = Id + Theta* (T_Psi - T_Phi)* (B*)^{-1}
//   Psi^ad = C^{-1} Omega
//
// so that T_Psi U_{Psi^ad} = B. ||Id - C|| <= sqrt(M_{Phi-Psi}) ||Theta||
// ||B^{-1}||, and C is guaranteed invertible once that product is below 1.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "gdual/duality.hpp"
#include "gdual/error.hpp"
#include "gdual/frame.hpp"
#include "gdual/oplin.hpp"

namespace gdual {

namespace tol {
// sqrt(M_{Phi-Psi}) ||Theta|| ||B^{-1}|| must stay below 1 - kSmallness.
inline constexpr double kSmallness = 1e-9;
}  // namespace tol

struct TransferResult {
  Frame psi_ad;
  Frame omega;
  LinearMap corrector;  // C
  LinearMap target;     // B, preserved mixed operator
  double predicted_diff_bound = 0.0;
  double measured_diff_bound = 0.0;
  double mixed_match_residual = 0.0;  // ||T_Psi U_{Psi^ad} - B||
  double bessel_diff = 0.0;           // optimal M_{Phi-Psi}
  double theta_norm = 0.0;
  double smallness = 0.0;             // sqrt(M_{Phi-Psi}) ||Theta|| ||B^{-1}||
};

// Closed-form Bessel bound of Phi^ad - Psi^ad:
//   M_{Phi-Psi} (||B^{-1}|| / (1 - x))^2
//     * (||Theta|| sqrt(M_{Phi^ad}) + ||B|| (m_Phi + M_Phi + sqrt(M_Psi M_Phi)) / (m_Phi m_Psi))^2
// with x = sqrt(M_{Phi-Psi}) ||Theta|| ||B^{-1}||.
struct DiffBoundInputs {
  double bessel_diff;
  double theta_norm;
  double target_norm;
  double target_inv_norm;
  double lower_phi, upper_phi;
  double lower_psi, upper_psi;
  double upper_phi_ad;
};

inline double predicted_diff_bound(const DiffBoundInputs &in) {
  const double x = std::sqrt(in.bessel_diff) * in.theta_norm * in.target_inv_norm;
  const double lead = in.target_inv_norm / (1.0 - x);
  const double tail =
      in.theta_norm * std::sqrt(in.upper_phi_ad) +
      in.target_norm *
          (in.lower_phi + in.upper_phi + std::sqrt(in.upper_psi * in.upper_phi)) /
          (in.lower_phi * in.lower_psi);
  return in.bessel_diff * lead * lead * tail * tail;
}

namespace detail {

inline TransferResult transfer(const Frame &phi, const Frame &psi,
                               const Frame &phi_ad) {
  require_same_shape(phi, psi);
  require_same_shape(phi, phi_ad);
  const FrameBounds bphi = frame_bounds(phi);
  const FrameBounds bpsi = frame_bounds(psi);
  if (!is_frame(bphi)) throw Error(ErrorKind::NotAFrame, "Phi is not a frame");
  if (!is_frame(bpsi)) throw Error(ErrorKind::NotAFrame, "Psi is not a frame");

  const LinearMap target = mixed_operator(phi, phi_ad);
  const LinearMap target_inv = inverse(target);

  const Frame phi_dual = canonical_dual(phi);
  const LinearMap raw = phi_ad.synthesis().adjoint() -
                        phi_dual.synthesis().adjoint() * target;
  const LinearMap kernel = kernel_basis(phi);
  const Annihilator theta(phi, kernel * (kernel.adjoint() * raw));

  const double bessel_diff = bessel_bound_difference(phi, psi);
  const double theta_norm = theta.norm();
  const double target_inv_norm = operator_norm(target_inv);
  const double smallness = std::sqrt(bessel_diff) * theta_norm * target_inv_norm;
  if (!(smallness < 1.0 - tol::kSmallness)) {
    throw Error(ErrorKind::SmallnessViolated,
                "sqrt(M_{Phi-Psi}) ||Theta|| ||A^{-1}|| < 1 fails", smallness);
  }

  const Frame psi_dual = canonical_dual(psi);
  Frame omega(target.adjoint() * psi_dual.synthesis() + theta.map().adjoint());
  LinearMap corrector =
      omega.synthesis() * psi.synthesis().adjoint() * target_inv.adjoint();
  Frame psi_ad(inverse(corrector) * omega.synthesis());

  const double residual = operator_norm(mixed_operator(psi, psi_ad) - target);
  const DiffBoundInputs in{bessel_diff,   theta_norm,  operator_norm(target),
                           target_inv_norm, bphi.lower, bphi.upper,
                           bpsi.lower,    bpsi.upper,  bessel_bound(phi_ad)};
  const double measured = bessel_bound_difference(phi_ad, psi_ad);

  return TransferResult{std::move(psi_ad),  std::move(omega),
                        std::move(corrector), target,
                        predicted_diff_bound(in), measured,
                        residual,           bessel_diff,
                        theta_norm,         smallness};
}

}  // namespace detail

// Psi^ad with T_Psi U_{Psi^ad} = T_Phi U_{Phi^ad}, for an approximate dual
// Phi^ad of Phi.
inline TransferResult transfer_approx_dual(const Frame &phi, const Frame &psi,
                                           const Frame &phi_ad) {
  require_same_shape(phi, phi_ad);
  const double rate = approximation_rate(phi, phi_ad);
  if (!(rate < 1.0 - tol::kStrict)) {
    throw Error(ErrorKind::NotApproxDual, "||Id - T_Phi U_Phi^ad|| >= 1", rate);
  }
  return detail::transfer(phi, psi, phi_ad);
}

// Same construction for a g-dual; only invertibility of the mixed operator
// is required.
inline TransferResult transfer_gdual(const Frame &phi, const Frame &psi,
                                     const Frame &phi_gd) {
  return detail::transfer(phi, psi, phi_gd);
}

// Every frame is a g-dual of itself (mixed operator S_Phi), which gives a
// g-dual Psi^gd of Psi with T_Psi U_{Psi^gd} = S_Phi close to Phi.
inline TransferResult self_gdual_transfer(const Frame &phi, const Frame &psi) {
  return detail::transfer(phi, psi, phi);
}

struct RieszDifference {
  double bound = 0.0;        // min of the two terms
  double via_forward = 0.0;  // M_Phi ||Id - D||^2
  double via_inverse = 0.0;  // M_Psi ||Id - D^{-1}||^2
  LinearMap d;               // D phi_k = psi_k
};

inline RieszDifference riesz_difference(const Frame &phi, const Frame &psi) {
  require_same_shape(phi, psi);
  if (!is_riesz(phi)) throw Error(ErrorKind::NotRieszBasis, "Phi is not a Riesz basis");
  if (!is_riesz(psi)) throw Error(ErrorKind::NotRieszBasis, "Psi is not a Riesz basis");
  RieszDifference r;
  r.d = psi.synthesis() * inverse(phi.synthesis());
  const LinearMap id = identity(phi.dim());
  const double fwd = operator_norm(id - r.d);
  const double bwd = operator_norm(id - inverse(r.d));
  r.via_forward = bessel_bound(phi) * fwd * fwd;
  r.via_inverse = bessel_bound(psi) * bwd * bwd;
  r.bound = std::min(r.via_forward, r.via_inverse);
  return r;
}

inline double riesz_difference_bound(const Frame &phi, const Frame &psi) {
  return riesz_difference(phi, psi).bound;
}

}  // namespace gdual

#endif  // GDUAL_PERTURBATION_HPP_
