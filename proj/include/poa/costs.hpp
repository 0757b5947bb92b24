#pragma once

#include <string>
#include <variant>
#include <vector>

namespace poa {

// c(x) = a x + b with a, b >= 0.
struct Affine {
  double a = 0.0;
  double b = 0.0;
};

// c(x) = sum_k coeffs[k] x^k, nonnegative coefficients (ascending degree).
struct Polynomial {
  std::vector<double> coeffs;
};

// Bureau of Public Roads: c(x) = t0 (1 + alpha (x / capacity)^beta).
struct Bpr {
  double t0 = 1.0;
  double capacity = 1.0;
  double alpha = 0.15;
  double beta = 4.0;
};

// Two polynomial pieces in x (ascending coefficients) joined C^1 at x0:
// `left` on [0, x0], `right` on (x0, inf).
struct PiecewiseC1 {
  double x0 = 0.0;
  std::vector<double> left;
  std::vector<double> right;
};

using CostFunction = std::variant<Affine, Polynomial, Bpr, PiecewiseC1>;

// A cost continued linearly to the whole real line:
// c(x) = c(0) + slope * x for x < 0.
struct ExtendedCost {
  CostFunction base;
  double slope = 0.0;
};

inline constexpr double kDefaultExtensionSlope = 1e-2;

// Validating constructors; all throw ModelError on bad parameters.
CostFunction make_affine(double a, double b);
CostFunction make_polynomial(std::vector<double> coeffs);
CostFunction make_bpr(double t0, double capacity, double alpha, double beta);
CostFunction make_piecewise(double x0, std::vector<double> left,
                            std::vector<double> right);

// Re-runs the constructor checks on an already-built value.
void validate(const CostFunction& c);

// Value, derivative and antiderivative (with C(0) = 0). The CostFunction
// overloads throw DomainError for x < 0. PiecewiseC1 uses the left piece at
// x0 itself; both pieces agree there.
double eval(const CostFunction& c, double x);
double eval(const ExtendedCost& c, double x);
double eval_derivative(const CostFunction& c, double x);
double eval_derivative(const ExtendedCost& c, double x);
double primitive(const CostFunction& c, double x);
double primitive(const ExtendedCost& c, double x);

// Marginal cost c(x) + x c'(x); the social optimum is the Wardrop
// equilibrium of the game played with these costs.
CostFunction marginal(const CostFunction& c);

// False when the marginal cost has a derivative jump (PiecewiseC1 whose
// pieces disagree in second derivative at x0).
bool marginal_is_c1(const CostFunction& c);

// Whether x -> x c(x) is convex on [0, inf). Exact for the closed families,
// checked on a grid for PiecewiseC1.
bool has_convex_total_cost(const CostFunction& c);

// Whether c is strictly increasing on [0, inf).
bool is_strictly_increasing(const CostFunction& c);

bool is_affine(const CostFunction& c);

// Conjugate of C(x) = a x^2 / 2 + b x restricted to x >= 0:
// C*(eta) = max(eta - b, 0)^2 / (2a). For a = 0 the conjugate is the
// indicator of (-inf, b] and +inf is returned above b.
double fenchel_conjugate_affine(const Affine& c, double eta);

// Linear continuation with slope max(c'(0), sigma). Throws DomainError for
// sigma <= 0.
ExtendedCost extend_negative(const CostFunction& c,
                             double sigma = kDefaultExtensionSlope);

std::string describe(const CostFunction& c);

}  // namespace poa
