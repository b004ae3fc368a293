#include "psoconv/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "psoconv/error.hpp"

namespace psoconv {

namespace {

// Thomas algorithm; sub[0] and sup[n-1] are ignored.
std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n), d(n), x(n);
  c[0] = sup[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double denom = diag[i] - sub[i] * c[i - 1];
    c[i] = (i + 1 < n) ? sup[i] / denom : 0.0;
    d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

// Tridiagonal plus the two corner entries A[0][n-1] = top and A[n-1][0] = bottom
// (Sherman-Morrison on top of the Thomas solve). Needs n >= 3.
std::vector<double> solve_cyclic(std::span<const double> sub, std::span<const double> diag,
                                 std::span<const double> sup, double top, double bottom,
                                 std::span<const double> rhs) {
  const std::size_t n = diag.size();
  const double gamma = -diag[0];
  std::vector<double> bb(diag.begin(), diag.end());
  bb[0] = diag[0] - gamma;
  bb[n - 1] = diag[n - 1] - bottom * top / gamma;
  std::vector<double> x = solve_tridiagonal(sub, bb, sup, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = bottom;
  const std::vector<double> z = solve_tridiagonal(sub, bb, sup, u);
  const double fact = (x[0] + top * x[n - 1] / gamma) / (1.0 + z[0] + top * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

// Second derivatives at the knots.
std::vector<double> second_derivatives(std::span<const double> x, std::span<const double> y,
                                       BoundaryKind boundary) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x[i + 1] - x[i];
  auto slope = [&](std::size_t i) { return (y[i + 1] - y[i]) / h[i]; };

  std::vector<double> m(n, 0.0);
  switch (boundary) {
    case BoundaryKind::Natural: {
      const std::size_t k = n - 2;
      std::vector<double> sub(k), diag(k), sup(k), rhs(k);
      for (std::size_t r = 0; r < k; ++r) {
        const std::size_t i = r + 1;
        sub[r] = h[i - 1] / 6.0;
        diag[r] = (h[i - 1] + h[i]) / 3.0;
        sup[r] = h[i] / 6.0;
        rhs[r] = slope(i) - slope(i - 1);
      }
      const auto inner = solve_tridiagonal(sub, diag, sup, rhs);
      std::copy(inner.begin(), inner.end(), m.begin() + 1);
      break;
    }
    case BoundaryKind::NotAKnot: {
      const std::size_t k = n - 2;
      std::vector<double> sub(k), diag(k), sup(k), rhs(k);
      for (std::size_t r = 0; r < k; ++r) {
        const std::size_t i = r + 1;
        sub[r] = h[i - 1] / 6.0;
        diag[r] = (h[i - 1] + h[i]) / 3.0;
        sup[r] = h[i] / 6.0;
        rhs[r] = slope(i) - slope(i - 1);
      }
      // Eliminate M_0 = ((h0+h1) M_1 - h0 M_2) / h1 from the first row ...
      diag[0] += h[0] * (h[0] + h[1]) / (6.0 * h[1]);
      sup[0] -= h[0] * h[0] / (6.0 * h[1]);
      // ... and M_{n-1} from the last one.
      const double hl = h[n - 2];
      const double hp = h[n - 3];
      diag[k - 1] += hl * (hp + hl) / (6.0 * hp);
      sub[k - 1] -= hl * hl / (6.0 * hp);
      const auto inner = solve_tridiagonal(sub, diag, sup, rhs);
      std::copy(inner.begin(), inner.end(), m.begin() + 1);
      m[0] = ((h[0] + h[1]) * m[1] - h[0] * m[2]) / h[1];
      m[n - 1] = ((hp + hl) * m[n - 2] - hl * m[n - 3]) / hp;
      break;
    }
    case BoundaryKind::DerivativeMatched: {
      // Unknowns M_0..M_{n-2}; M_{n-1} = M_0 closes the system cyclically.
      const std::size_t k = n - 1;
      std::vector<double> sub(k), diag(k), sup(k), rhs(k);
      for (std::size_t i = 0; i < k; ++i) {
        const double left = (i == 0) ? h[n - 2] : h[i - 1];
        sub[i] = left / 6.0;
        diag[i] = (left + h[i]) / 3.0;
        sup[i] = h[i] / 6.0;
        rhs[i] = slope(i) - ((i == 0) ? slope(n - 2) : slope(i - 1));
      }
      const auto inner = solve_cyclic(sub, diag, sup, sub[0], sup[k - 1], rhs);
      std::copy(inner.begin(), inner.end(), m.begin());
      m[n - 1] = m[0];
      break;
    }
  }
  return m;
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InsufficientKnots: return "InsufficientKnots";
    case ErrorKind::InvalidKnots: return "InvalidKnots";
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NoRefinementNeeded: return "NoRefinementNeeded";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::DegenerateCoefficients: return "DegenerateCoefficients";
    case ErrorKind::SingularMap: return "SingularMap";
    case ErrorKind::SingularInverse: return "SingularInverse";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NoBracket: return "NoBracket";
  }
  return "Unknown";
}

const char* to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Natural: return "natural";
    case BoundaryKind::DerivativeMatched: return "derivative_matched";
    case BoundaryKind::NotAKnot: return "not_a_knot";
  }
  return "natural";
}

BoundaryKind boundary_from_string(const std::string& name) {
  if (name == "natural") return BoundaryKind::Natural;
  if (name == "derivative_matched") return BoundaryKind::DerivativeMatched;
  if (name == "not_a_knot") return BoundaryKind::NotAKnot;
  throw std::invalid_argument("unknown spline boundary '" + name + "'");
}

// ---------------------------------------------------------------------------
// KnotVector

KnotVector::KnotVector(std::vector<double> positions) : positions_(std::move(positions)) {
  if (positions_.size() < 4)
    throw Error(ErrorKind::InsufficientKnots,
                "need at least 4 knots, got " + std::to_string(positions_.size()));
  for (double p : positions_)
    if (!std::isfinite(p)) throw Error(ErrorKind::NonFiniteInput, "knot position is not finite");
  for (std::size_t i = 1; i < positions_.size(); ++i)
    if (!(positions_[i] > positions_[i - 1]))
      throw Error(ErrorKind::InvalidKnots, "knots must be strictly increasing (index " +
                                               std::to_string(i) + ")");
}

KnotVector KnotVector::equidistant(double lower, double upper, std::size_t count) {
  if (count < 4) throw Error(ErrorKind::InsufficientKnots, "need at least 4 knots");
  std::vector<double> p(count);
  const double step = (upper - lower) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) p[i] = lower + step * static_cast<double>(i);
  p.back() = upper;
  return KnotVector(std::move(p));
}

std::size_t KnotVector::interval_of(double x) const {
  const auto it = std::upper_bound(positions_.begin(), positions_.end(), x);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - positions_.begin() - 1, 0));
  return std::min(idx, positions_.size() - 2);
}

// ---------------------------------------------------------------------------
// CubicSpline

CubicSpline::CubicSpline(KnotVector knots, std::vector<double> values, BoundaryKind boundary)
    : knots_(std::move(knots)), values_(std::move(values)), boundary_(boundary) {
  const std::size_t n = knots_.size();
  if (values_.size() != n)
    throw Error(ErrorKind::InvalidKnots, "got " + std::to_string(values_.size()) + " values for " +
                                             std::to_string(n) + " knots");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteInput, "spline value is not finite");

  const auto x = knots_.positions();
  const auto m = second_derivatives(x, values_, boundary_);
  pieces_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x[i + 1] - x[i];
    pieces_[i] = Piece{values_[i],
                       (values_[i + 1] - values_[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0,
                       m[i] / 2.0, (m[i + 1] - m[i]) / (6.0 * h)};
  }
}

void CubicSpline::check_domain(double x) const {
  if (!(x >= lower() && x <= upper()))
    throw Error(ErrorKind::OutOfDomain, "x = " + std::to_string(x) + " outside [" +
                                            std::to_string(lower()) + ", " +
                                            std::to_string(upper()) + "]");
}

double CubicSpline::eval_piece(std::size_t i, double x) const {
  const double t = x - knots_[i];
  const Piece& p = pieces_[i];
  return p.a + t * (p.b + t * (p.c + t * p.d));
}

double CubicSpline::eval(double x) const {
  check_domain(x);
  return eval_piece(knots_.interval_of(x), x);
}

double CubicSpline::eval(double x, std::size_t& hint) const {
  check_domain(x);
  const auto xs = knots_.positions();
  const std::size_t last = xs.size() - 2;
  std::size_t i = std::min(hint, last);
  int steps = 0;
  while (i < last && x >= xs[i + 1] && steps < 8) ++i, ++steps;
  while (i > 0 && x < xs[i] && steps < 8) --i, ++steps;
  if (x < xs[i] || (i < last && x >= xs[i + 1])) i = knots_.interval_of(x);
  hint = i;
  return eval_piece(i, x);
}

double CubicSpline::derivative(double x) const {
  check_domain(x);
  const std::size_t i = knots_.interval_of(x);
  const double t = x - knots_[i];
  const Piece& p = pieces_[i];
  return p.b + t * (2.0 * p.c + t * 3.0 * p.d);
}

double CubicSpline::second_derivative(double x) const {
  check_domain(x);
  const std::size_t i = knots_.interval_of(x);
  const double t = x - knots_[i];
  return 2.0 * pieces_[i].c + 6.0 * pieces_[i].d * t;
}

double CubicSpline::integral(double a, double b) const {
  check_domain(a);
  check_domain(b);
  if (a > b) throw Error(ErrorKind::OutOfDomain, "integral limits reversed");
  auto antiderivative = [this](std::size_t i, double t) {
    const Piece& p = pieces_[i];
    return t * (p.a + t * (p.b / 2.0 + t * (p.c / 3.0 + t * p.d / 4.0)));
  };
  const std::size_t ia = knots_.interval_of(a);
  const std::size_t ib = knots_.interval_of(b);
  if (ia == ib) return antiderivative(ia, b - knots_[ia]) - antiderivative(ia, a - knots_[ia]);
  double sum = antiderivative(ia, knots_[ia + 1] - knots_[ia]) - antiderivative(ia, a - knots_[ia]);
  for (std::size_t i = ia + 1; i < ib; ++i) sum += antiderivative(i, knots_[i + 1] - knots_[i]);
  sum += antiderivative(ib, b - knots_[ib]);
  return sum;
}

double CubicSpline::third_derivative_jump(std::size_t knot) const {
  if (knot == 0 || knot + 1 >= knots_.size()) return 0.0;
  return 6.0 * std::abs(pieces_[knot].d - pieces_[knot - 1].d);
}

CubicSpline build_spline(KnotVector knots, std::vector<double> values, BoundaryKind boundary) {
  return CubicSpline(std::move(knots), std::move(values), boundary);
}

// ---------------------------------------------------------------------------
// Refinement

KnotVector refine_knots(const CubicSpline& s, std::size_t target_count) {
  const auto& knots = s.knots();
  if (target_count <= knots.size())
    throw Error(ErrorKind::NoRefinementNeeded,
                "target " + std::to_string(target_count) + " <= current " +
                    std::to_string(knots.size()));

  struct Interval {
    double left;
    double right;
    double signal;
  };
  std::vector<Interval> intervals;
  intervals.reserve(target_count);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    intervals.push_back(
        {knots[i], knots[i + 1], s.third_derivative_jump(i) + s.third_derivative_jump(i + 1)});

  std::size_t remaining = target_count - knots.size();
  while (remaining > 0) {
    double longest = 0.0;
    for (const auto& iv : intervals) longest = std::max(longest, iv.right - iv.left);
    // Lengths are bucketed so that equidistant grids tie despite rounding noise.
    auto length_bucket = [longest](const Interval& iv) {
      return std::llround((iv.right - iv.left) / longest * 1e9);
    };
    // A kink keeps the largest jump however often its interval is halved; below this
    // width it goes to the back of the queue instead of splitting down to rounding level.
    const double min_width = 1e-9 * (knots.upper() - knots.lower());
    auto too_narrow = [min_width](const Interval& iv) { return iv.right - iv.left < min_width; };
    std::vector<std::size_t> order(intervals.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& ia = intervals[a];
      const auto& ib = intervals[b];
      return std::make_tuple(too_narrow(ia), -ia.signal, -length_bucket(ia), ia.left) <
             std::make_tuple(too_narrow(ib), -ib.signal, -length_bucket(ib), ib.left);
    });
    const std::size_t take = std::min(remaining, intervals.size());
    std::vector<bool> split(intervals.size(), false);
    for (std::size_t k = 0; k < take; ++k) split[order[k]] = true;

    std::vector<Interval> next;
    next.reserve(intervals.size() + take);
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      const auto& iv = intervals[i];
      if (split[i]) {
        const double mid = 0.5 * (iv.left + iv.right);
        next.push_back({iv.left, mid, iv.signal});
        next.push_back({mid, iv.right, iv.signal});
      } else {
        next.push_back(iv);
      }
    }
    intervals = std::move(next);
    remaining -= take;
  }

  std::vector<double> out;
  out.reserve(intervals.size() + 1);
  for (const auto& iv : intervals) out.push_back(iv.left);
  out.push_back(intervals.back().right);
  return KnotVector(std::move(out));
}

// ---------------------------------------------------------------------------
// L2 distance

double l2_distance(const CubicSpline& a, const CubicSpline& b) {
  const double scale = std::max({1.0, std::abs(a.lower()), std::abs(a.upper())});
  if (std::abs(a.lower() - b.lower()) > 1e-12 * scale ||
      std::abs(a.upper() - b.upper()) > 1e-12 * scale)
    throw Error(ErrorKind::DomainMismatch, "splines live on different domains");

  std::vector<double> merged;
  merged.reserve(a.knots().size() + b.knots().size());
  std::merge(a.knots().positions().begin(), a.knots().positions().end(),
             b.knots().positions().begin(), b.knots().positions().end(),
             std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end(),
                           [scale](double x, double y) { return y - x <= 1e-14 * scale; }),
               merged.end());
  merged.front() = a.lower();
  merged.back() = a.upper();

  // 4-point Gauss-Legendre is exact to degree 7; the squared difference has degree 6.
  static constexpr std::array<double, 4> nodes = {-0.8611363115940526, -0.3399810435848563,
                                                  0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> weights = {0.3478548451374538, 0.6521451548625461,
                                                    0.6521451548625461, 0.3478548451374538};
  std::size_t ha = 0, hb = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    const double mid = 0.5 * (merged[i] + merged[i + 1]);
    const double half = 0.5 * (merged[i + 1] - merged[i]);
    for (std::size_t q = 0; q < 4; ++q) {
      const double x = mid + half * nodes[q];
      const double diff = a.eval(x, ha) - b.eval(x, hb);
      sum += half * weights[q] * diff * diff;
    }
  }
  return std::sqrt(sum / (a.upper() - a.lower()));
}

// ---------------------------------------------------------------------------
// SplineQuadrature

SplineQuadrature::SplineQuadrature(const KnotVector& knots) : knots_(knots) {
  const auto x = knots_.positions();
  const std::size_t n = x.size();
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x[i + 1] - x[i];

  // integral = sum_i h_i (y_i + y_{i+1}) / 2 - sum_k s_k M_k,  s_k = (h_{k-1}^3 + h_k^3) / 24,
  // and the interior M solve A M = D y, so the weights are t - D^T A^{-1} s (A symmetric).
  const std::size_t k = n - 2;
  std::vector<double> sub(k), diag(k), sup(k), s(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t i = r + 1;
    sub[r] = h[i - 1] / 6.0;
    diag[r] = (h[i - 1] + h[i]) / 3.0;
    sup[r] = h[i] / 6.0;
    s[r] = (h[i - 1] * h[i - 1] * h[i - 1] + h[i] * h[i] * h[i]) / 24.0;
  }
  const auto z = solve_tridiagonal(sub, diag, sup, s);

  weights_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    weights_[i] += 0.5 * h[i];
    weights_[i + 1] += 0.5 * h[i];
  }
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t i = r + 1;
    weights_[i - 1] -= z[r] / h[i - 1];
    weights_[i] += z[r] * (1.0 / h[i] + 1.0 / h[i - 1]);
    weights_[i + 1] -= z[r] / h[i];
  }
}

double SplineQuadrature::integrate(std::span<const double> values) const {
  if (values.size() != weights_.size())
    throw Error(ErrorKind::InvalidKnots, "value count does not match quadrature knots");
  return std::inner_product(values.begin(), values.end(), weights_.begin(), 0.0);
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const CubicSpline& s) {
  nlohmann::json j;
  j["knots"] = std::vector<double>(s.knots().positions().begin(), s.knots().positions().end());
  j["values"] = std::vector<double>(s.values().begin(), s.values().end());
  j["boundary"] = to_string(s.boundary());
  return j;
}

CubicSpline spline_from_json(const nlohmann::json& j) {
  return CubicSpline(KnotVector(j.at("knots").get<std::vector<double>>()),
                     j.at("values").get<std::vector<double>>(),
                     boundary_from_string(j.at("boundary").get<std::string>()));
}

}  // namespace psoconv
