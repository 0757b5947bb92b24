#include "poa/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "poa/error.hpp"

namespace poa {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double horner(const std::vector<double>& coeffs, double x) {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

double horner_derivative(const std::vector<double>& coeffs, double x) {
  double v = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;)
    v = v * x + static_cast<double>(k) * coeffs[k];
  return v;
}

double horner_second_derivative(const std::vector<double>& coeffs, double x) {
  double v = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 2;)
    v = v * x + static_cast<double>(k * (k - 1)) * coeffs[k];
  return v;
}

// Antiderivative vanishing at 0.
double horner_integral(const std::vector<double>& coeffs, double x) {
  double v = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;)
    v = v * x + coeffs[k] / static_cast<double>(k + 1);
  return v * x;
}

// d/dx [x p(x)] = sum (k+1) a_k x^k.
std::vector<double> marginal_coeffs(const std::vector<double>& coeffs) {
  std::vector<double> out(coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    out[k] = static_cast<double>(k + 1) * coeffs[k];
  return out;
}

void require_nonnegative_load(double x) {
  if (!(x >= 0.0)) {
    std::ostringstream msg;
    msg << "cost evaluated at negative load " << x
        << " without a negative-domain extension";
    throw DomainError(msg.str());
  }
}

constexpr int kMonotoneGridPoints = 1024;
constexpr double kMonotoneGridSpan = 10.0;

template <class F>
bool nondecreasing_on_grid(F&& f, double upper) {
  double prev = f(0.0);
  for (int i = 1; i < kMonotoneGridPoints; ++i) {
    const double x = upper * i / (kMonotoneGridPoints - 1);
    const double v = f(x);
    if (v < prev - 1e-12 * (1.0 + std::abs(prev))) return false;
    prev = v;
  }
  return true;
}

}  // namespace

CostFunction make_affine(double a, double b) {
  CostFunction c = Affine{a, b};
  validate(c);
  return c;
}

CostFunction make_polynomial(std::vector<double> coeffs) {
  CostFunction c = Polynomial{std::move(coeffs)};
  validate(c);
  return c;
}

CostFunction make_bpr(double t0, double capacity, double alpha, double beta) {
  CostFunction c = Bpr{t0, capacity, alpha, beta};
  validate(c);
  return c;
}

CostFunction make_piecewise(double x0, std::vector<double> left,
                            std::vector<double> right) {
  CostFunction c = PiecewiseC1{x0, std::move(left), std::move(right)};
  validate(c);
  return c;
}

void validate(const CostFunction& c) {
  std::visit(
      Overloaded{
          [](const Affine& f) {
            if (!(f.a >= 0.0) || !(f.b >= 0.0) || !std::isfinite(f.a) ||
                !std::isfinite(f.b))
              throw ModelError("affine cost needs finite a >= 0 and b >= 0");
          },
          [](const Polynomial& f) {
            if (f.coeffs.empty())
              throw ModelError("polynomial cost needs at least one coefficient");
            for (double v : f.coeffs)
              if (!(v >= 0.0) || !std::isfinite(v))
                throw ModelError(
                    "polynomial cost coefficients must be finite and >= 0");
          },
          [](const Bpr& f) {
            if (!(f.t0 > 0.0) || !(f.capacity > 0.0) || !(f.alpha >= 0.0) ||
                !(f.beta >= 1.0))
              throw ModelError(
                  "BPR cost needs t0 > 0, capacity > 0, alpha >= 0, beta >= 1");
          },
          [](const PiecewiseC1& f) {
            if (!(f.x0 >= 0.0) || !std::isfinite(f.x0))
              throw ModelError("piecewise cost breakpoint must be >= 0");
            if (f.left.empty() || f.right.empty())
              throw ModelError("piecewise cost pieces must be nonempty");
            const double vl = horner(f.left, f.x0);
            const double vr = horner(f.right, f.x0);
            const double dl = horner_derivative(f.left, f.x0);
            const double dr = horner_derivative(f.right, f.x0);
            if (std::abs(vl - vr) > 1e-9 * (1.0 + std::abs(vl)) ||
                std::abs(dl - dr) > 1e-9 * (1.0 + std::abs(dl)))
              throw ModelError(
                  "piecewise cost pieces must agree in value and derivative "
                  "at the breakpoint");
            if (horner(f.left, 0.0) < -1e-12)
              throw ModelError("piecewise cost must be nonnegative at 0");
            const auto value = [&f](double x) {
              return x <= f.x0 ? horner(f.left, x) : horner(f.right, x);
            };
            if (!nondecreasing_on_grid(value, f.x0 + kMonotoneGridSpan))
              throw ModelError("piecewise cost is not nondecreasing");
          },
      },
      c);
}

double eval(const CostFunction& c, double x) {
  require_nonnegative_load(x);
  return std::visit(
      Overloaded{
          [x](const Affine& f) { return f.a * x + f.b; },
          [x](const Polynomial& f) { return horner(f.coeffs, x); },
          [x](const Bpr& f) {
            return f.t0 * (1.0 + f.alpha * std::pow(x / f.capacity, f.beta));
          },
          [x](const PiecewiseC1& f) {
            return x <= f.x0 ? horner(f.left, x) : horner(f.right, x);
          },
      },
      c);
}

double eval_derivative(const CostFunction& c, double x) {
  require_nonnegative_load(x);
  return std::visit(
      Overloaded{
          [](const Affine& f) { return f.a; },
          [x](const Polynomial& f) { return horner_derivative(f.coeffs, x); },
          [x](const Bpr& f) {
            return f.t0 * f.alpha * f.beta *
                   std::pow(x / f.capacity, f.beta - 1.0) / f.capacity;
          },
          [x](const PiecewiseC1& f) {
            return x <= f.x0 ? horner_derivative(f.left, x)
                             : horner_derivative(f.right, x);
          },
      },
      c);
}

double primitive(const CostFunction& c, double x) {
  require_nonnegative_load(x);
  return std::visit(
      Overloaded{
          [x](const Affine& f) { return 0.5 * f.a * x * x + f.b * x; },
          [x](const Polynomial& f) { return horner_integral(f.coeffs, x); },
          [x](const Bpr& f) {
            return f.t0 * (x + f.alpha * x * std::pow(x / f.capacity, f.beta) /
                                   (f.beta + 1.0));
          },
          [x](const PiecewiseC1& f) {
            if (x <= f.x0) return horner_integral(f.left, x);
            return horner_integral(f.left, f.x0) + horner_integral(f.right, x) -
                   horner_integral(f.right, f.x0);
          },
      },
      c);
}

double eval(const ExtendedCost& c, double x) {
  if (x >= 0.0) return eval(c.base, x);
  return eval(c.base, 0.0) + c.slope * x;
}

double eval_derivative(const ExtendedCost& c, double x) {
  if (x >= 0.0) return eval_derivative(c.base, x);
  return c.slope;
}

double primitive(const ExtendedCost& c, double x) {
  if (x >= 0.0) return primitive(c.base, x);
  return eval(c.base, 0.0) * x + 0.5 * c.slope * x * x;
}

CostFunction marginal(const CostFunction& c) {
  return std::visit(
      Overloaded{
          [](const Affine& f) -> CostFunction { return Affine{2.0 * f.a, f.b}; },
          [](const Polynomial& f) -> CostFunction {
            return Polynomial{marginal_coeffs(f.coeffs)};
          },
          [](const Bpr& f) -> CostFunction {
            return Bpr{f.t0, f.capacity, f.alpha * (f.beta + 1.0), f.beta};
          },
          [](const PiecewiseC1& f) -> CostFunction {
            return PiecewiseC1{f.x0, marginal_coeffs(f.left),
                               marginal_coeffs(f.right)};
          },
      },
      c);
}

bool marginal_is_c1(const CostFunction& c) {
  const auto* pw = std::get_if<PiecewiseC1>(&c);
  if (pw == nullptr) return true;
  const double l = horner_second_derivative(pw->left, pw->x0);
  const double r = horner_second_derivative(pw->right, pw->x0);
  return std::abs(l - r) <= 1e-9 * (1.0 + std::abs(l));
}

bool has_convex_total_cost(const CostFunction& c) {
  const auto* pw = std::get_if<PiecewiseC1>(&c);
  if (pw == nullptr) return true;
  // x c(x) is convex iff its derivative, the marginal cost, is nondecreasing.
  const CostFunction m = marginal(c);
  return nondecreasing_on_grid([&m](double x) { return eval(m, x); },
                               pw->x0 + kMonotoneGridSpan);
}

bool is_strictly_increasing(const CostFunction& c) {
  return std::visit(
      Overloaded{
          [](const Affine& f) { return f.a > 0.0; },
          [](const Polynomial& f) {
            return std::any_of(f.coeffs.begin() + 1, f.coeffs.end(),
                               [](double v) { return v > 0.0; });
          },
          [](const Bpr& f) { return f.alpha > 0.0; },
          [](const PiecewiseC1& f) {
            // Strict growth between consecutive grid points; isolated
            // stationary points (Eq. 12 style pieces) are allowed.
            const double upper = f.x0 + kMonotoneGridSpan;
            double prev = horner(f.left, 0.0);
            for (int i = 1; i < kMonotoneGridPoints; ++i) {
              const double x = upper * i / (kMonotoneGridPoints - 1);
              const double v =
                  x <= f.x0 ? horner(f.left, x) : horner(f.right, x);
              if (!(v > prev)) return false;
              prev = v;
            }
            return true;
          },
      },
      c);
}

bool is_affine(const CostFunction& c) {
  return std::holds_alternative<Affine>(c);
}

double fenchel_conjugate_affine(const Affine& c, double eta) {
  if (!(c.a >= 0.0)) throw DomainError("affine conjugate needs a >= 0");
  if (c.a == 0.0)
    return eta <= c.b ? 0.0 : std::numeric_limits<double>::infinity();
  const double d = std::max(eta - c.b, 0.0);
  return d * d / (2.0 * c.a);
}

ExtendedCost extend_negative(const CostFunction& c, double sigma) {
  if (!(sigma > 0.0))
    throw DomainError("negative-domain extension slope must be positive");
  return ExtendedCost{c, std::max(eval_derivative(c, 0.0), sigma)};
}

std::string describe(const CostFunction& c) {
  std::ostringstream out;
  const auto list = [&out](const std::vector<double>& v) {
    out << '[';
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
    out << ']';
  };
  std::visit(Overloaded{
                 [&](const Affine& f) {
                   out << "affine(a=" << f.a << ", b=" << f.b << ")";
                 },
                 [&](const Polynomial& f) {
                   out << "poly";
                   list(f.coeffs);
                 },
                 [&](const Bpr& f) {
                   out << "bpr(t0=" << f.t0 << ", cap=" << f.capacity
                       << ", alpha=" << f.alpha << ", beta=" << f.beta << ")";
                 },
                 [&](const PiecewiseC1& f) {
                   out << "piecewise(x0=" << f.x0 << ", left=";
                   list(f.left);
                   out << ", right=";
                   list(f.right);
                   out << ")";
                 },
             },
             c);
  return out.str();
}

}  // namespace poa
