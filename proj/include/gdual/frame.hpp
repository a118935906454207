#ifndef GDUAL_FRAME_HPP_
#define GDUAL_FRAME_HPP_

// Finite frames for C^d.
//
// A frame of n vectors is stored as its synthesis map T (d x n, column k is
// phi_k). The coefficient space l^2 is C^n with canonical basis delta_k, so
// the analysis map is U = T*, the frame operator is S = T U, and every right
// annihilator of T is an n x d map whose range lies in ker(T).

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include "gdual/error.hpp"
#include "gdual/oplin.hpp"

namespace gdual {

namespace tol {
// lambda_min(S) > kFrame * lambda_max(S) decides frame status.
inline constexpr double kFrame = 1e-10;
// ||Id - T_Phi U_Psi|| at or below this is an exact dual pair.
inline constexpr double kDual = 1e-10;
// Strict "< 1" conditions are enforced as "< 1 - kStrict".
inline constexpr double kStrict = 1e-12;
// ||T Theta|| <= kAnnihilator * ||T|| * ||Theta||.
inline constexpr double kAnnihilator = 1e-10;
}  // namespace tol

class Frame {
 public:
  explicit Frame(LinearMap synthesis) : synthesis_(std::move(synthesis)) {
    if (synthesis_.rows() == 0 || synthesis_.cols() == 0) {
      throw Error(ErrorKind::DimensionMismatch, "a frame needs d >= 1 and n >= 1");
    }
    if (!synthesis_.allFinite()) {
      throw Error(ErrorKind::ContractViolation, "frame vectors must be finite");
    }
  }

  Eigen::Index dim() const noexcept { return synthesis_.rows(); }
  Eigen::Index count() const noexcept { return synthesis_.cols(); }

  // T_Phi, d x n.
  const LinearMap &synthesis() const noexcept { return synthesis_; }

  Vector vector(Eigen::Index k) const { return synthesis_.col(k); }

 private:
  LinearMap synthesis_;
};

struct FrameBounds {
  double lower = 0.0;  // 0 for a Bessel sequence that is not a frame
  double upper = 0.0;
};

inline void require_same_shape(const Frame &phi, const Frame &psi) {
  if (phi.dim() != psi.dim() || phi.count() != psi.count()) {
    throw Error(ErrorKind::DimensionMismatch,
                "frames have shapes " + std::to_string(phi.dim()) + "x" +
                    std::to_string(phi.count()) + " and " +
                    std::to_string(psi.dim()) + "x" + std::to_string(psi.count()));
  }
}

// U_Phi = T_Phi*, n x d.
inline LinearMap analysis_operator(const Frame &phi) {
  return phi.synthesis().adjoint();
}

inline Vector analysis(const Frame &phi, const Vector &f) {
  if (f.size() != phi.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "analysis: vector length " +
                                                  std::to_string(f.size()) +
                                                  " != dim " +
                                                  std::to_string(phi.dim()));
  }
  return phi.synthesis().adjoint() * f;
}

inline Vector synthesis(const Frame &phi, const Vector &c) {
  if (c.size() != phi.count()) {
    throw Error(ErrorKind::DimensionMismatch, "synthesis: coefficient length " +
                                                  std::to_string(c.size()) +
                                                  " != count " +
                                                  std::to_string(phi.count()));
  }
  return phi.synthesis() * c;
}

inline LinearMap frame_operator(const Frame &phi) {
  const LinearMap u = analysis_operator(phi);
  return phi.synthesis() * u;
}

inline FrameBounds frame_bounds(const Frame &phi) {
  const Spectrum sp = herm_eig(frame_operator(phi));
  const double upper = sp.eigenvalues(sp.eigenvalues.size() - 1);
  double lower = sp.eigenvalues(0);
  // Below the frame threshold the smallest eigenvalue is roundoff around 0.
  if (!(upper > 0.0) || lower <= tol::kFrame * upper) lower = 0.0;
  return FrameBounds{lower, upper};
}

inline bool is_frame(const FrameBounds &b) { return b.lower > 0.0; }

inline bool is_frame(const Frame &phi) { return is_frame(frame_bounds(phi)); }

inline void require_frame(const Frame &phi, const char *who) {
  const FrameBounds b = frame_bounds(phi);
  if (!is_frame(b)) {
    throw Error(ErrorKind::NotAFrame,
                std::string(who) + ": lambda_min(S) <= 1e-10 * lambda_max(S)",
                b.upper > 0.0 ? b.lower / b.upper : 0.0);
  }
}

// (S^{-1} phi_k)_k
inline Frame canonical_dual(const Frame &phi) {
  require_frame(phi, "canonical_dual");
  return Frame(inverse(frame_operator(phi)) * phi.synthesis());
}

// T_Phi U_Psi, d x d.
inline LinearMap mixed_operator(const Frame &phi, const Frame &psi) {
  require_same_shape(phi, psi);
  return phi.synthesis() * psi.synthesis().adjoint();
}

inline double approximation_rate(const Frame &phi, const Frame &psi) {
  const LinearMap m = mixed_operator(phi, psi);
  return operator_norm(identity(m.rows()) - m);
}

enum class DualKind { dual, approx, gdual, none };

inline std::string_view to_string(DualKind k) {
  switch (k) {
    case DualKind::dual: return "dual";
    case DualKind::approx: return "approx";
    case DualKind::gdual: return "gdual";
    case DualKind::none: return "none";
  }
  return "none";
}

// Verdicts on a pair (Phi, Psi). `kind` is the finest class that applies;
// dual pairs are approximately dual, and approximately dual pairs are g-dual.
struct DualReport {
  DualKind kind = DualKind::none;
  double rate = 0.0;  // ||Id - T_Phi U_Psi||
  // A = (T_Phi U_Psi)^{-1} when the pair is g-dual.
  std::optional<LinearMap> corresponding_op;
  // D = S_Phi^{-1/2} T_Phi U_Psi, filled in by the factorization checks.
  std::optional<LinearMap> factor_D;
  double factor_residual = 0.0;   // ||T_Phi U_Psi - S^{1/2} D||
  bool bessel_check = false;      // lambda_max(D D*) <= M_Psi (+1e-9)
  double dd_star_max = 0.0;       // lambda_max(D D*)
  double bessel_bound_psi = 0.0;  // optimal M_Psi
};

inline DualReport classify_pair(const Frame &phi, const Frame &psi) {
  const LinearMap m = mixed_operator(phi, psi);
  DualReport r;
  r.rate = operator_norm(identity(m.rows()) - m);
  if (is_invertible(m)) r.corresponding_op = inverse(m);
  if (r.rate <= tol::kDual) {
    r.kind = DualKind::dual;
  } else if (r.rate < 1.0 - tol::kStrict) {
    r.kind = DualKind::approx;
  } else if (r.corresponding_op) {
    r.kind = DualKind::gdual;
  } else {
    r.kind = DualKind::none;
  }
  return r;
}

inline bool is_dual_pair(const Frame &phi, const Frame &psi) {
  return approximation_rate(phi, psi) <= tol::kDual;
}

inline bool is_approx_dual(const Frame &phi, const Frame &psi) {
  return approximation_rate(phi, psi) < 1.0 - tol::kStrict;
}

inline bool is_gdual(const Frame &phi, const Frame &psi) {
  return is_invertible(mixed_operator(phi, psi));
}

// An n x d map Theta with T_Phi Theta = 0.
class Annihilator {
 public:
  Annihilator(const Frame &base, LinearMap map) : map_(std::move(map)) {
    if (map_.rows() != base.count() || map_.cols() != base.dim()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "annihilator must be count x dim of its frame");
    }
    const double defect = defect_against(base);
    if (defect > tol::kAnnihilator) {
      throw Error(ErrorKind::ContractViolation,
                  "range of Theta is not inside ker(T_Phi)", defect);
    }
  }

  static Annihilator zero(const Frame &base) {
    return Annihilator(base, LinearMap::Zero(base.count(), base.dim()));
  }

  const LinearMap &map() const noexcept { return map_; }
  double norm() const { return operator_norm(map_); }

  // ||T_Phi Theta|| / (||T_Phi|| ||Theta||), zero for the zero map.
  double defect_against(const Frame &phi) const {
    if (map_.rows() != phi.count() || map_.cols() != phi.dim()) return INFINITY;
    const double scale = operator_norm(phi.synthesis()) * operator_norm(map_);
    if (scale == 0.0) return 0.0;
    return operator_norm(phi.synthesis() * map_) / scale;
  }

 private:
  LinearMap map_;
};

// Orthonormal basis of ker(T_Phi) (n x (n - rank)).
inline LinearMap kernel_basis(const Frame &phi) {
  Eigen::BDCSVD<LinearMap> svd(phi.synthesis(), Eigen::ComputeFullV);
  const RealVector &sigma = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > tol::kFrame * sigma(0)) ++rank;
  }
  return svd.matrixV().rightCols(phi.count() - rank);
}

// Seeded Gaussian draws projected onto ker(T_Phi), normalized to the given
// operator norm. Riesz bases have a trivial kernel and get the zero map.
inline Annihilator random_annihilator(const Frame &phi, std::uint64_t seed,
                                      double scale) {
  const LinearMap kernel = kernel_basis(phi);
  if (kernel.cols() == 0 || scale == 0.0) return Annihilator::zero(phi);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LinearMap coeffs(kernel.cols(), phi.dim());
  for (Eigen::Index j = 0; j < coeffs.cols(); ++j) {
    for (Eigen::Index i = 0; i < coeffs.rows(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      coeffs(i, j) = Complex(re, im);
    }
  }
  LinearMap theta = kernel * coeffs;
  theta *= scale / operator_norm(theta);
  return Annihilator(phi, std::move(theta));
}

inline bool is_riesz(const Frame &phi) {
  return phi.count() == phi.dim() && is_invertible(phi.synthesis());
}

// Optimal Bessel bound of (phi_k - psi_k)_k.
inline double bessel_bound_difference(const Frame &phi, const Frame &psi) {
  require_same_shape(phi, psi);
  const double n = operator_norm(phi.synthesis() - psi.synthesis());
  return n * n;
}

// Optimal upper bound of a Bessel sequence, ||T||^2.
inline double bessel_bound(const Frame &phi) {
  const double n = operator_norm(phi.synthesis());
  return n * n;
}

}  // namespace gdual

#endif  // GDUAL_FRAME_HPP_
