#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qlab/field.hpp"
#include "qlab/rational.hpp"

namespace qlab {

struct DispersionSymbol;

/// One term lambda (d^3 u)^a (d^2 u)^b (d u)^c u^d with a+b+c+d >= 2.
struct Monomial {
  Rational lambda;
  int a = 0, b = 0, c = 0, d = 0;

  int degree() const { return a + b + c + d; }
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Polynomial nonlinearity as a canonical list of monomials: like terms are
/// merged at construction and zero terms dropped. Immutable.
class Nonlinearity {
 public:
  explicit Nonlinearity(std::vector<Monomial> monomials);

  const std::vector<Monomial>& monomials() const { return monomials_; }
  int p_max() const;

  Nonlinearity negated() const;

 private:
  std::vector<Monomial> monomials_;
};

/// Sum of terms "coef * u3^a * u2^b * u1^c * u0^d"; coef is a rational,
/// optionally parenthesized and signed. ParseError / DegreeTooLow on bad input.
Nonlinearity parse_nonlinearity(std::string_view spec);

std::string to_json(const Nonlinearity& n);
Nonlinearity nonlinearity_from_json(const std::string& text);

/// N(f), dealiased exactly on a (p_max+1)-padded grid.
Field evaluate(const Nonlinearity& n, const Field& f);

/// Polynomial in the jet variables w0..w6 with exact rational coefficients.
/// w_i stands for the i-th spatial derivative of the unknown.
class DiffPolynomial {
 public:
  using Exponents = std::array<int, 7>;

  DiffPolynomial() = default;
  static DiffPolynomial term(const Rational& coef, const Exponents& e);

  void add_term(const Rational& coef, const Exponents& e);

  bool is_zero() const { return terms_.empty(); }
  const std::map<Exponents, Rational>& terms() const { return terms_; }

  /// Highest jet index appearing with a nonzero exponent; -1 for constants.
  int max_jet() const;
  int max_degree() const;

  DiffPolynomial operator+(const DiffPolynomial& o) const;
  DiffPolynomial operator-(const DiffPolynomial& o) const;
  DiffPolynomial scaled(const Rational& c) const;

  /// d/dw_i, exponents and coefficients exact.
  DiffPolynomial partial(int i) const;

  friend bool operator==(const DiffPolynomial&, const DiffPolynomial&) = default;

  /// e.g. "2*w1^2 - 4*w0*w2"; "0" for the zero polynomial.
  std::string str() const;

 private:
  std::map<Exponents, Rational> terms_;
};

/// Jet-space d/dx by the Leibniz rule (w_i -> w_{i+1}). Input must not
/// involve w6, else JetOverflow.
DiffPolynomial total_derivative(const DiffPolynomial& L);

/// E(L) = sum_{i=0}^{3} (-d/dx)^i dL/dw_i for L over w0..w3. For densities
/// without constant term, E(L) = 0 iff int L(jets of f) dx = 0 for every
/// smooth periodic f.
DiffPolynomial euler_operator(const DiffPolynomial& L);

/// Density of the classifier functional: sum_j lambda_j b_j
/// w3^{a_j} w2^{b_j-1} w1^{c_j} w0^{d_j}.
DiffPolynomial p_density(const Nonlinearity& n);

/// Density sum_j lambda_j w3^{a_j} w2^{b_j} w1^{c_j} w0^{d_j} of N itself.
DiffPolynomial full_density(const Nonlinearity& n);

/// Evaluate a jet polynomial at the jets of f, exactly dealiased.
Field evaluate_density(const DiffPolynomial& L, const Field& f);

/// Mean of the classifier density along the jet of f.
double p_functional(const Nonlinearity& n, const Field& f);

enum class ResonanceType { NonParabolic, Parabolic };

/// NonParabolic iff the Euler operator annihilates the classifier density.
/// Decided in exact rational arithmetic.
ResonanceType classify(const Nonlinearity& n);

/// True iff int N(f) dx = 0 for every smooth periodic f, i.e. the flow
/// conserves the mean (divergence form).
bool conserves_mean(const Nonlinearity& n);

/// First time-derivative of P_N along the regularized flow at t = 0:
/// the functional derivative of P_N at phi applied to
/// (-eps d^4 - gamma_0 d^5 - ...)phi + N(phi). The formula differentiates
/// phi up to eighth order, so phi should be resolved well inside the band.
double j1_functional(const Nonlinearity& n, const Field& phi,
                     const DispersionSymbol& sym, double eps);

}  // namespace qlab
