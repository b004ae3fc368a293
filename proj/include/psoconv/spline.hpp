#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace psoconv {

// Boundary closure of the cubic interpolant.
//   Natural:           S''(a) = S''(b) = 0
//   DerivativeMatched: S'(a) = S'(b) and S''(a) = S''(b); values stay free, so a
//                      CDF can run from 0 to 1 while its density wraps around.
//   NotAKnot:          S''' continuous at the second and second-to-last knot
//                      (reproduces cubic polynomials exactly).
enum class BoundaryKind { Natural, DerivativeMatched, NotAKnot };

const char* to_string(BoundaryKind kind);
BoundaryKind boundary_from_string(const std::string& name);

// Strictly increasing abscissae, at least four of them.
class KnotVector {
public:
  explicit KnotVector(std::vector<double> positions);

  static KnotVector equidistant(double lower, double upper, std::size_t count);

  std::span<const double> positions() const { return positions_; }
  std::size_t size() const { return positions_.size(); }
  double operator[](std::size_t i) const { return positions_[i]; }
  double lower() const { return positions_.front(); }
  double upper() const { return positions_.back(); }

  // Index i of the interval [x_i, x_{i+1}] containing x (x must be inside the domain).
  std::size_t interval_of(double x) const;

  bool operator==(const KnotVector&) const = default;

private:
  std::vector<double> positions_;
};

class CubicSpline {
public:
  // Local polynomial on [x_i, x_{i+1}]: a + b t + c t^2 + d t^3 with t = x - x_i.
  struct Piece {
    double a;
    double b;
    double c;
    double d;
  };

  CubicSpline(KnotVector knots, std::vector<double> values, BoundaryKind boundary);

  double eval(double x) const;
  // Same as eval, but starts the interval search at `hint` and updates it.
  // Cheap for monotone query sequences.
  double eval(double x, std::size_t& hint) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  // Exact integral of the piecewise cubic over [a, b].
  double integral(double a, double b) const;
  double integral() const { return integral(lower(), upper()); }

  // Third derivative is constant per piece; this is its jump at knot i
  // (zero at both end knots).
  double third_derivative_jump(std::size_t knot) const;

  const KnotVector& knots() const { return knots_; }
  std::span<const double> values() const { return values_; }
  std::span<const Piece> pieces() const { return pieces_; }
  BoundaryKind boundary() const { return boundary_; }
  double lower() const { return knots_.lower(); }
  double upper() const { return knots_.upper(); }

private:
  void check_domain(double x) const;
  double eval_piece(std::size_t i, double x) const;

  KnotVector knots_;
  std::vector<double> values_;
  BoundaryKind boundary_;
  std::vector<Piece> pieces_;
};

CubicSpline build_spline(KnotVector knots, std::vector<double> values, BoundaryKind boundary);

// Superset of s.knots() with target_count entries. New knots are midpoints of the
// intervals whose bounding knots carry the largest third-derivative jumps; ties go to
// the longer interval, then to the smaller abscissa. If more knots are requested than
// there are intervals, further passes split the children (which inherit the parent's
// signal).
KnotVector refine_knots(const CubicSpline& s, std::size_t target_count);

// sqrt( (1/|D|) * integral over D of (a - b)^2 ), exact for piecewise cubics.
double l2_distance(const CubicSpline& a, const CubicSpline& b);

// Weights w with sum_i w_i y_i == integral of the Natural spline through (x_i, y_i).
// Lets many integrands on one fixed knot set be integrated with a dot product.
class SplineQuadrature {
public:
  explicit SplineQuadrature(const KnotVector& knots);

  double integrate(std::span<const double> values) const;
  std::span<const double> weights() const { return weights_; }
  const KnotVector& knots() const { return knots_; }

private:
  KnotVector knots_;
  std::vector<double> weights_;
};

nlohmann::json to_json(const CubicSpline& s);
CubicSpline spline_from_json(const nlohmann::json& j);

}  // namespace psoconv
