#ifndef GDUAL_OPLIN_HPP_
#define GDUAL_OPLIN_HPP_

// Dense complex operators between finite-dimensional spaces.
//
// Every operator in the library (synthesis, analysis and frame operators,
// corresponding operators of g-duals, annihilators, correctors) is a plain
// column-major `Eigen::MatrixXcd`. The routines here are the numerical
// backbone: norms from singular values, Hermitian spectra, and the PSD
// square roots that appear in every factorization T_Phi U_Psi = S^{1/2} D.

#include <Eigen/Dense>

#include <complex>
#include <string>

#include "gdual/error.hpp"

namespace gdual {

using Complex = std::complex<double>;
using LinearMap = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
// ||M - M*|| relative to ||M|| (Frobenius) above which M is not Hermitian.
inline constexpr double kHermitian = 1e-12;
// Negative eigenvalues down to -kPsdClamp * ||M|| are roundoff and clamp to 0.
inline constexpr double kPsdClamp = 1e-10;
// sigma_min / sigma_max below this makes a square map singular.
inline constexpr double kSingular = 1e-12;
}  // namespace tol

struct Spectrum {
  RealVector eigenvalues;  // ascending
  LinearMap eigenvectors;  // orthonormal columns
};

inline LinearMap identity(Eigen::Index d) { return LinearMap::Identity(d, d); }

inline LinearMap adjoint(const LinearMap &m) { return m.adjoint(); }

inline bool all_finite(const LinearMap &m) { return m.allFinite(); }

inline RealVector singular_values(const LinearMap &m) {
  if (m.size() == 0) return RealVector();
  Eigen::BDCSVD<LinearMap> svd(m);
  return svd.singularValues();
}

// Largest singular value.
inline double operator_norm(const LinearMap &m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

inline void require_square(const LinearMap &m, const char *what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + " requires a square map, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline double hermitian_defect(const LinearMap &m) {
  const double scale = m.norm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / scale;
}

inline Spectrum herm_eig(const LinearMap &m) {
  require_square(m, "herm_eig");
  const double defect = hermitian_defect(m);
  if (defect > tol::kHermitian) {
    throw Error(ErrorKind::NotHermitian,
                "relative anti-Hermitian part exceeds 1e-12", defect);
  }
  const LinearMap sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<LinearMap> es(sym);
  return Spectrum{es.eigenvalues(), es.eigenvectors()};
}

namespace detail {

inline LinearMap spectral_apply(const Spectrum &sp, const RealVector &f_of_lambda) {
  return sp.eigenvectors * f_of_lambda.cast<Complex>().asDiagonal() *
         sp.eigenvectors.adjoint();
}

// Eigenvalues of a Hermitian PSD map with roundoff negatives clamped.
inline RealVector clamped_psd_eigenvalues(const Spectrum &sp) {
  const RealVector &lambda = sp.eigenvalues;
  const double scale = lambda.cwiseAbs().maxCoeff();
  RealVector out = lambda;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out(i) < 0.0) {
      if (out(i) < -tol::kPsdClamp * scale) {
        throw Error(ErrorKind::NotPSD, "significantly negative eigenvalue",
                    out(i));
      }
      out(i) = 0.0;
    }
  }
  return out;
}

}  // namespace detail

inline LinearMap psd_sqrt(const LinearMap &m) {
  const Spectrum sp = herm_eig(m);
  const RealVector lambda = detail::clamped_psd_eigenvalues(sp);
  return detail::spectral_apply(sp, lambda.cwiseSqrt());
}

inline LinearMap psd_inv_sqrt(const LinearMap &m) {
  const Spectrum sp = herm_eig(m);
  const double lmin = sp.eigenvalues(0);
  const double lmax = sp.eigenvalues(sp.eigenvalues.size() - 1);
  if (!(lmax > 0.0) || lmin <= tol::kSingular * lmax) {
    throw Error(ErrorKind::Singular,
                "smallest eigenvalue below 1e-12 * largest",
                lmax > 0.0 ? lmin / lmax : 0.0);
  }
  return detail::spectral_apply(sp, sp.eigenvalues.cwiseSqrt().cwiseInverse());
}

// Inverse through the SVD, so the conditioning decision and the inverse
// come from the same factorization.
inline LinearMap inverse(const LinearMap &m) {
  require_square(m, "inverse");
  Eigen::BDCSVD<LinearMap> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector &sigma = svd.singularValues();
  const double smax = sigma(0);
  const double smin = sigma(sigma.size() - 1);
  if (!(smax > 0.0) || smin <= tol::kSingular * smax) {
    throw Error(ErrorKind::Singular,
                "smallest singular value below 1e-12 * largest",
                smax > 0.0 ? smin / smax : 0.0);
  }
  const RealVector inv = sigma.cwiseInverse();
  return svd.matrixV() * inv.cast<Complex>().asDiagonal() *
         svd.matrixU().adjoint();
}

inline bool is_invertible(const LinearMap &m) {
  if (m.rows() != m.cols() || m.size() == 0) return false;
  const RealVector sigma = singular_values(m);
  return sigma(0) > 0.0 && sigma(sigma.size() - 1) > tol::kSingular * sigma(0);
}

// Numerical rank with a relative cutoff on the singular values.
inline Eigen::Index numerical_rank(const LinearMap &m, double rel_tol = 1e-10) {
  const RealVector sigma = singular_values(m);
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > rel_tol * sigma(0)) ++r;
  }
  return r;
}

}  // namespace gdual

#endif  // GDUAL_OPLIN_HPP_
