#ifndef GDUAL_GABOR_HPP_
#define GDUAL_GABOR_HPP_

// Gabor systems (E_{mb} T_{na} g) on a sampled periodic line.
//
// The line is [0, P) sampled at s points per unit, x_j = j / s, with indices
// taken mod L = s P. Translation by a is a cyclic shift by a s samples and
// E_{mb} f(x) = exp(2 pi i m b x) f(x). The lattice is commensurate with the
// grid when a s, P / a, s / b and b P are all integers; then there are
// P / a translations and s / b distinct modulations, and all identities that
// hold pointwise for compactly supported windows on the line hold exactly on
// the grid.
//
// Frame vectors are scaled by 1 / sqrt(s), which turns the Euclidean inner
// product on C^L into the Riemann sum of the L^2 inner product. With that
// scaling the painless frame operator is multiplication by G(x) / b.

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "gdual/error.hpp"
#include "gdual/frame.hpp"
#include "gdual/oplin.hpp"

namespace gdual {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational &r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string format_rational(const Rational &r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Accepts "p/q" or "p".
inline Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view part) -> std::int64_t {
    if (part.empty()) throw Error(ErrorKind::ParseError, "empty rational part");
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(std::string(part), &used);
    } catch (const std::exception &) {
      throw Error(ErrorKind::ParseError, "not a rational: '" + std::string(text) + "'");
    }
    if (used != part.size()) {
      throw Error(ErrorKind::ParseError, "not a rational: '" + std::string(text) + "'");
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  const std::int64_t den = parse_int(text.substr(slash + 1));
  if (den == 0) throw Error(ErrorKind::ParseError, "zero denominator");
  return Rational(parse_int(text.substr(0, slash)), den);
}

struct GridSpec {
  int samples_per_unit = 1;  // s
  int period = 1;            // P, in units

  GridSpec() = default;
  GridSpec(int s, int p) : samples_per_unit(s), period(p) {
    if (s <= 0 || p <= 0) {
      throw Error(ErrorKind::OffGrid, "grid needs s > 0 and P > 0");
    }
  }

  Eigen::Index total() const { return Eigen::Index(samples_per_unit) * period; }
  double point(Eigen::Index j) const { return double(j) / samples_per_unit; }
  // x_j mapped into [-P/2, P/2).
  double centered_point(Eigen::Index j) const {
    const double x = point(j);
    return 2 * j < total() ? x : x - period;
  }
  Eigen::Index wrap(Eigen::Index j) const {
    const Eigen::Index l = total();
    return ((j % l) + l) % l;
  }

  bool operator==(const GridSpec &) const = default;
};

struct SampledWindow {
  GridSpec grid;
  Vector values;

  SampledWindow(GridSpec g, Vector v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.total()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "window has " + std::to_string(values.size()) +
                      " samples, grid needs " + std::to_string(grid.total()));
    }
  }

  Complex at(Eigen::Index j) const { return values(grid.wrap(j)); }
};

struct GaborLattice {
  Rational a;  // time step, units
  Rational b;  // frequency step, cycles per unit
};

// Integer sizes of a lattice on a grid.
struct LatticeShape {
  Eigen::Index shift = 0;           // a s, samples per translation step
  Eigen::Index time_shifts = 0;     // P / a
  Eigen::Index modulations = 0;     // s / b
  Eigen::Index janssen_shifts = 0;  // b P, distinct n/b shifts mod P
};

namespace detail {

inline bool integral(const Rational &r) { return r.denominator() == 1; }

inline std::int64_t as_int(const Rational &r) { return r.numerator(); }

}  // namespace detail

inline LatticeShape lattice_shape(const GaborLattice &lat, const GridSpec &grid) {
  if (lat.a <= 0 || lat.b <= 0) {
    throw Error(ErrorKind::LatticeMismatch, "a and b must be positive");
  }
  const Rational s(grid.samples_per_unit);
  const Rational p(grid.period);
  std::string failed;
  const Rational as = lat.a * s, pa = p / lat.a, sb = s / lat.b, bp = lat.b * p;
  if (!detail::integral(as)) failed += " a*s=" + format_rational(as);
  if (!detail::integral(pa)) failed += " P/a=" + format_rational(pa);
  if (!detail::integral(sb)) failed += " s/b=" + format_rational(sb);
  if (!detail::integral(bp)) failed += " b*P=" + format_rational(bp);
  if (!failed.empty()) {
    throw Error(ErrorKind::LatticeMismatch,
                "lattice a=" + format_rational(lat.a) + " b=" + format_rational(lat.b) +
                    " is not commensurate with s=" + std::to_string(grid.samples_per_unit) +
                    " P=" + std::to_string(grid.period) + ":" + failed);
  }
  return LatticeShape{detail::as_int(as), detail::as_int(pa), detail::as_int(sb),
                      detail::as_int(bp)};
}

// Cardinal B-spline with support [0, N], B_1 = chi_[0,1).
inline double bspline_value(int order, double x) {
  if (order <= 1) return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0;
  if (x <= 0.0 || x >= order) return 0.0;
  return (x * bspline_value(order - 1, x) +
          (order - x) * bspline_value(order - 1, x - 1.0)) /
         (order - 1);
}

// B_N on the grid. Each step applies B_{N} = (x B_{N-1}(x) + (N - x) B_{N-1}(x - 1)) / (N - 1),
// the grid form of B_N = B_{N-1} * B_1, which keeps the samples equal to
// the continuous spline at the grid points.
inline SampledWindow sample_bspline(int order, const GridSpec &grid) {
  if (order < 1) throw Error(ErrorKind::SupportOverflow, "B-spline order must be >= 1");
  if (grid.period < order) {
    throw Error(ErrorKind::SupportOverflow,
                "support [0," + std::to_string(order) + "] does not fit period " +
                    std::to_string(grid.period));
  }
  const Eigen::Index s = grid.samples_per_unit;
  const Eigen::Index l = grid.total();
  RealVector cur = RealVector::Zero(l);
  cur.head(s).setOnes();
  for (int n = 2; n <= order; ++n) {
    RealVector next = RealVector::Zero(l);
    for (Eigen::Index j = 0; j < n * s && j < l; ++j) {
      const double left = j < (n - 1) * s ? double(j) * cur(j) : 0.0;
      const double right = j >= s ? double(n * s - j) * cur(j - s) : 0.0;
      next(j) = (left + right) / double((n - 1) * s);
    }
    cur = std::move(next);
  }
  return SampledWindow(grid, cur.cast<Complex>());
}

// chi_[0,c) on the grid.
inline SampledWindow sample_char(const Rational &c, const GridSpec &grid) {
  const Rational cs = c * Rational(grid.samples_per_unit);
  if (c <= 0 || !detail::integral(cs)) {
    throw Error(ErrorKind::OffGrid, "c*s=" + format_rational(cs) + " is not a positive integer");
  }
  if (c > Rational(grid.period)) {
    throw Error(ErrorKind::OffGrid, "c exceeds the period");
  }
  Vector v = Vector::Zero(grid.total());
  v.head(detail::as_int(cs)).setOnes();
  return SampledWindow(grid, std::move(v));
}

// f evaluated at the grid points taken in [-P/2, P/2).
inline SampledWindow sample_centered(const GridSpec &grid,
                                     const std::function<Complex(double)> &f) {
  Vector v(grid.total());
  for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = f(grid.centered_point(j));
  return SampledWindow(grid, std::move(v));
}

// Column (m, n) of the returned frame, at index n * (s/b) + m, is
// E_{mb} T_{na} g / sqrt(s).
inline Frame gabor_frame(const SampledWindow &g, const GaborLattice &lat) {
  const LatticeShape sh = lattice_shape(lat, g.grid);
  const Eigen::Index l = g.grid.total();
  const Eigen::Index q = sh.modulations;
  const double scale = 1.0 / std::sqrt(double(g.grid.samples_per_unit));

  // exp(2 pi i m b x_j) = exp(2 pi i (m j mod q) / q)
  Vector roots(q);
  for (Eigen::Index k = 0; k < q; ++k) {
    roots(k) = std::polar(1.0, 2.0 * std::numbers::pi * double(k) / double(q));
  }
  LinearMap t(l, sh.time_shifts * q);
  for (Eigen::Index n = 0; n < sh.time_shifts; ++n) {
    Vector shifted(l);
    for (Eigen::Index j = 0; j < l; ++j) shifted(j) = scale * g.at(j - n * sh.shift);
    for (Eigen::Index m = 0; m < q; ++m) {
      auto col = t.col(n * q + m);
      for (Eigen::Index j = 0; j < l; ++j) col(j) = roots((m * j) % q) * shifted(j);
    }
  }
  return Frame(std::move(t));
}

// G(x) = sum_n |g(x - n a)|^2 over the P/a translates.
inline SampledWindow walnut_weight(const SampledWindow &g, const Rational &a) {
  const Rational as = a * Rational(g.grid.samples_per_unit);
  const Rational pa = Rational(g.grid.period) / a;
  if (a <= 0 || !detail::integral(as) || !detail::integral(pa)) {
    throw Error(ErrorKind::OffGrid, "a*s and P/a must be integers");
  }
  const Eigen::Index step = detail::as_int(as);
  Vector w = Vector::Zero(g.grid.total());
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    double acc = 0.0;
    for (Eigen::Index n = 0; n < detail::as_int(pa); ++n) acc += std::norm(g.at(j - n * step));
    w(j) = acc;
  }
  return SampledWindow(g.grid, std::move(w));
}

// Last index (exclusive) past which g vanishes, i.e. supp g within [0, N) on
// the grid.
inline bool supported_in(const SampledWindow &g, int units) {
  const Eigen::Index stop = Eigen::Index(units) * g.grid.samples_per_unit;
  for (Eigen::Index j = stop; j < g.values.size(); ++j) {
    if (g.values(j) != Complex(0.0, 0.0)) return false;
  }
  return true;
}

struct PainlessReport {
  bool diagonal = false;
  double off_diagonal_mass = 0.0;  // ||S - diag S||_F / ||S||
  double deviation_g_over_b = 0.0;  // max |S_jj - G_j/b| / max |S_jj|
  double deviation_b_over_g = 0.0;  // max |S_jj - b/G_j| / max |S_jj|
  std::string matched;              // "G/b", "b/G" or "neither"
  FrameBounds bounds;
  RealVector diagonal_entries;
  RealVector walnut;
};

// Materializes S for a compactly supported window with b <= 1/N and reports
// whether S is multiplication by G/b or by b/G.
inline PainlessReport painless_check(const SampledWindow &g, const GaborLattice &lat,
                                     int support_units) {
  lattice_shape(lat, g.grid);
  if (!supported_in(g, support_units)) {
    throw Error(ErrorKind::HypothesisViolated,
                "supp g is not inside [0," + std::to_string(support_units) + ")");
  }
  if (lat.b * Rational(support_units) > 1) {
    throw Error(ErrorKind::HypothesisViolated,
                "b <= 1/N fails: b=" + format_rational(lat.b), to_double(lat.b));
  }
  const RealVector walnut = walnut_weight(g, lat.a).values.real();
  if (!(walnut.minCoeff() > tol::kSingular * walnut.maxCoeff())) {
    throw Error(ErrorKind::HypothesisViolated, "G is not bounded away from 0",
                walnut.minCoeff());
  }
  const double b = to_double(lat.b);
  const LinearMap s = frame_operator(gabor_frame(g, lat));

  PainlessReport r;
  r.walnut = walnut;
  r.diagonal_entries = s.diagonal().real();
  LinearMap off = s;
  off.diagonal().setZero();
  const Spectrum sp = herm_eig(s);
  const double snorm = sp.eigenvalues(sp.eigenvalues.size() - 1);
  r.off_diagonal_mass = off.norm() / snorm;
  r.diagonal = r.off_diagonal_mass <= 1e-10;
  const double dscale = r.diagonal_entries.cwiseAbs().maxCoeff();
  r.deviation_g_over_b =
      (r.diagonal_entries - walnut / b).cwiseAbs().maxCoeff() / dscale;
  r.deviation_b_over_g =
      (r.diagonal_entries - (b * walnut.cwiseInverse())).cwiseAbs().maxCoeff() / dscale;
  if (r.deviation_g_over_b <= 1e-10) {
    r.matched = "G/b";
  } else if (r.deviation_b_over_g <= 1e-10) {
    r.matched = "b/G";
  } else {
    r.matched = "neither";
  }
  r.bounds.upper = snorm;
  r.bounds.lower = sp.eigenvalues(0) > tol::kFrame * snorm ? sp.eigenvalues(0) : 0.0;
  return r;
}

inline void require_same_grid(const SampledWindow &g, const SampledWindow &h) {
  if (!(g.grid == h.grid)) {
    throw Error(ErrorKind::DimensionMismatch, "windows live on different grids");
  }
}

// Per-shift residual max_x |sum_k conj(g(x - n/b - ka)) h(x - ka) - b delta_{n,0}|
// for n in [0, bP).
inline std::vector<double> janssen_table(const SampledWindow &g, const SampledWindow &h,
                                         const GaborLattice &lat) {
  require_same_grid(g, h);
  const LatticeShape sh = lattice_shape(lat, g.grid);
  const double b = to_double(lat.b);
  const Eigen::Index l = g.grid.total();
  std::vector<double> table(static_cast<std::size_t>(sh.janssen_shifts), 0.0);
  for (Eigen::Index n = 0; n < sh.janssen_shifts; ++n) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < l; ++j) {
      Complex acc(0.0, 0.0);
      for (Eigen::Index k = 0; k < sh.time_shifts; ++k) {
        acc += std::conj(g.at(j - n * sh.modulations - k * sh.shift)) *
               h.at(j - k * sh.shift);
      }
      if (n == 0) acc -= b;
      worst = std::max(worst, std::abs(acc));
    }
    table[static_cast<std::size_t>(n)] = worst;
  }
  return table;
}

inline double janssen_residual(const SampledWindow &g, const SampledWindow &h,
                               const GaborLattice &lat) {
  const std::vector<double> t = janssen_table(g, h, lat);
  double worst = 0.0;
  for (double v : t) worst = std::max(worst, v);
  return worst;
}

namespace detail {

// Hypotheses shared by both dual-generator formulas.
inline void require_ck_window(const SampledWindow &g, int order, const Rational &b) {
  if (order < 1 || order > g.grid.period) {
    throw Error(ErrorKind::HypothesisViolated, "need 1 <= N <= P");
  }
  if (b <= 0 || b * Rational(2 * order - 1) > 1) {
    throw Error(ErrorKind::HypothesisViolated,
                "b in (0, 1/(2N-1)] fails: b=" + format_rational(b), to_double(b));
  }
  if (g.values.imag().cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorKind::HypothesisViolated, "g must be real-valued");
  }
  if (!supported_in(g, order)) {
    throw Error(ErrorKind::HypothesisViolated,
                "supp g is not inside [0," + std::to_string(order) + "]");
  }
  const Eigen::Index s = g.grid.samples_per_unit;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < s; ++j) {
    double acc = 0.0;
    for (Eigen::Index n = 0; n < g.grid.period; ++n) acc += g.at(j - n * s).real();
    worst = std::max(worst, std::abs(acc - 1.0));
  }
  if (worst > 1e-10) {
    throw Error(ErrorKind::HypothesisViolated,
                "partition of unity sum_n g(x - n) = 1 fails", worst);
  }
}

}  // namespace detail

// g_1^d(x) = b g(x) + 2b sum_{n=1}^{N-1} g(x + n)
inline SampledWindow ck_dual1(const SampledWindow &g, int order, const Rational &b) {
  detail::require_ck_window(g, order, b);
  const double bd = to_double(b);
  const double two_b = 2.0 * bd;
  const Eigen::Index s = g.grid.samples_per_unit;
  Vector out(g.values.size());
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    Complex tail(0.0, 0.0);
    for (int n = 1; n < order; ++n) tail += g.at(j + n * s);
    out(j) = bd * g.values(j) + two_b * tail;
  }
  return SampledWindow(g.grid, std::move(out));
}

// g_2^d(x) = sum_{n=-N+1}^{N-1} a_n g(x + n), coefficients listed from
// n = -N+1 upwards, with a_0 = b and a_n + a_{-n} = 2b.
inline SampledWindow ck_dual2(const SampledWindow &g, int order, const Rational &b,
                              const std::vector<double> &coeffs) {
  detail::require_ck_window(g, order, b);
  if (coeffs.size() != static_cast<std::size_t>(2 * order - 1)) {
    throw Error(ErrorKind::BadCoefficients,
                "expected " + std::to_string(2 * order - 1) + " coefficients");
  }
  const double bd = to_double(b);
  auto coeff = [&](int n) { return coeffs[static_cast<std::size_t>(n + order - 1)]; };
  std::string bad;
  double worst = 0.0;
  if (std::abs(coeff(0) - bd) > 1e-12) {
    bad += " a_0";
    worst = std::max(worst, std::abs(coeff(0) - bd));
  }
  for (int n = 1; n < order; ++n) {
    const double miss = std::abs(coeff(n) + coeff(-n) - 2.0 * bd);
    if (miss > 1e-12) {
      bad += " a_" + std::to_string(n) + "+a_-" + std::to_string(n);
      worst = std::max(worst, miss);
    }
  }
  if (!bad.empty()) {
    throw Error(ErrorKind::BadCoefficients, "a_0 = b, a_n + a_-n = 2b fails at" + bad,
                worst);
  }
  const Eigen::Index s = g.grid.samples_per_unit;
  Vector out = Vector::Zero(g.values.size());
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    for (int n = -order + 1; n < order; ++n) out(j) += coeff(n) * g.at(j + n * s);
  }
  return SampledWindow(g.grid, std::move(out));
}

// max(||A E_b - E_b A||, ||A T_a - T_a A||); commuting with the generators
// means commuting with every E_{mb} T_{na}.
inline double commutation_check(const LinearMap &a, const GaborLattice &lat,
                                const GridSpec &grid) {
  const LatticeShape sh = lattice_shape(lat, grid);
  const Eigen::Index l = grid.total();
  if (a.rows() != l || a.cols() != l) {
    throw Error(ErrorKind::DimensionMismatch, "operator must be L x L");
  }
  Vector phase(l);
  for (Eigen::Index j = 0; j < l; ++j) {
    phase(j) = std::polar(1.0, 2.0 * std::numbers::pi * double(j % sh.modulations) /
                                   double(sh.modulations));
  }
  const LinearMap mod_diff = a * phase.asDiagonal() - phase.asDiagonal() * a;
  // (T f)(j) = f(j - shift): (A T)(:, k) = A(:, k + shift), (T A)(j, :) = A(j - shift, :)
  LinearMap shift_diff(l, l);
  for (Eigen::Index k = 0; k < l; ++k) {
    for (Eigen::Index j = 0; j < l; ++j) {
      shift_diff(j, k) = a(j, grid.wrap(k + sh.shift)) - a(grid.wrap(j - sh.shift), k);
    }
  }
  return std::max(operator_norm(mod_diff), operator_norm(shift_diff));
}

// g^ad = A* S^{-1} g - g + S g^d, whose Gabor system has T_G U_{G^ad} = A.
inline SampledWindow approx_dual_window(const SampledWindow &g, const SampledWindow &gd,
                                        const LinearMap &a, const GaborLattice &lat) {
  require_same_grid(g, gd);
  const double dual_gap = janssen_residual(g, gd, lat);
  if (dual_gap > 1e-10) {
    throw Error(ErrorKind::NotDualPair, "g^d is not a dual window of g", dual_gap);
  }
  const double comm = commutation_check(a, lat, g.grid);
  if (comm > 1e-9) {
    throw Error(ErrorKind::NotCommuting, "A does not commute with E_b and T_a", comm);
  }
  const double gap = operator_norm(identity(a.rows()) - a);
  if (!(gap < 1.0 - tol::kStrict)) {
    throw Error(ErrorKind::ContractViolation, "||Id - A|| < 1 fails", gap);
  }
  const LinearMap s = frame_operator(gabor_frame(g, lat));
  const Vector s_inv_g = s.ldlt().solve(g.values);
  Vector out = a.adjoint() * s_inv_g - g.values + s * gd.values;
  return SampledWindow(g.grid, std::move(out));
}

struct ScaledGaborOperator {
  LinearMap a;  // S_L / M_L
  FrameBounds bounds;
  double gap = 0.0;  // ||Id - A|| = 1 - m_L / M_L
};

inline ScaledGaborOperator scaled_gabor_operator(const SampledWindow &l,
                                                 const GaborLattice &lat) {
  const LinearMap s = frame_operator(gabor_frame(l, lat));
  const Spectrum sp = herm_eig(s);
  ScaledGaborOperator r;
  r.bounds.upper = sp.eigenvalues(sp.eigenvalues.size() - 1);
  r.bounds.lower = sp.eigenvalues(0);
  if (!(r.bounds.lower > tol::kFrame * r.bounds.upper)) {
    throw Error(ErrorKind::NotAFrame, "the scaling Gabor system is not a frame",
                r.bounds.upper > 0 ? r.bounds.lower / r.bounds.upper : 0.0);
  }
  r.a = s / r.bounds.upper;
  r.gap = 1.0 - r.bounds.lower / r.bounds.upper;
  return r;
}

// Janssen residual of (chi_[0,c), chi_[0,c')) on the lattice (a, 1).
inline double char_dual_residual(const Rational &c, const Rational &c_prime,
                                 const Rational &a, const GridSpec &grid) {
  const GaborLattice lat{a, Rational(1)};
  lattice_shape(lat, grid);
  return janssen_residual(sample_char(c, grid), sample_char(c_prime, grid), lat);
}

inline bool char_dual_check(const Rational &c, const Rational &c_prime,
                            const Rational &a, const GridSpec &grid) {
  return char_dual_residual(c, c_prime, a, grid) <= 1e-10;
}

}  // namespace gdual

#endif  // GDUAL_GABOR_HPP_
