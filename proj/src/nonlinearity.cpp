#include "qlab/nonlinearity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "json.hpp"
#include "qlab/dispersion.hpp"
#include "qlab/fft.hpp"

namespace qlab {

namespace {

std::vector<Monomial> merge_monomials(std::vector<Monomial> in) {
  std::map<std::array<int, 4>, Rational> acc;
  for (const Monomial& m : in) {
    if (m.a < 0 || m.b < 0 || m.c < 0 || m.d < 0)
      throw ParseError("negative power in monomial");
    acc[{m.a, m.b, m.c, m.d}] += m.lambda;
  }
  std::vector<Monomial> out;
  for (const auto& [e, lam] : acc) {
    if (lam.is_zero()) continue;
    Monomial m{lam, e[0], e[1], e[2], e[3]};
    if (m.degree() < 2)
      throw DegreeTooLow("monomial u3^" + std::to_string(m.a) + " u2^" +
                         std::to_string(m.b) + " u1^" + std::to_string(m.c) +
                         " u0^" + std::to_string(m.d) +
                         " has degree < 2 after merging");
    out.push_back(m);
  }
  return out;
}

}  // namespace

Nonlinearity::Nonlinearity(std::vector<Monomial> monomials)
    : monomials_(merge_monomials(std::move(monomials))) {
  if (monomials_.empty())
    throw EmptyNonlinearity("nonlinearity has no surviving monomials");
}

int Nonlinearity::p_max() const {
  int p = 0;
  for (const Monomial& m : monomials_) p = std::max(p, m.degree());
  return p;
}

Nonlinearity Nonlinearity::negated() const {
  std::vector<Monomial> v = monomials_;
  for (Monomial& m : v) m.lambda = -m.lambda;
  return Nonlinearity(std::move(v));
}

// ---------------------------------------------------------------------------
// Parser. Tokens: integer, u0..u3, '^', '*', '+', '-', '/', '(', ')'.

namespace {

struct Lexer {
  std::string_view s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  char get() {
    char c = peek();
    if (pos < s.size()) ++pos;
    return c;
  }
  bool eat(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  long long integer() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos == start) throw ParseError("expected integer at position " +
                                       std::to_string(start));
    try {
      return std::stoll(std::string(s.substr(start, pos - start)));
    } catch (const std::exception&) {
      throw ParseError("integer out of range");
    }
  }
};

Rational parse_rational(Lexer& lx) {
  bool paren = lx.eat('(');
  int sign = 1;
  if (lx.eat('-'))
    sign = -1;
  else
    lx.eat('+');
  long long num = lx.integer();
  long long den = 1;
  if (lx.eat('/')) den = lx.integer();
  if (paren && !lx.eat(')')) throw ParseError("missing ')'");
  return Rational(sign * num, den);
}

// factor := rational | u[0-3] ('^' nat)?
void parse_factor(Lexer& lx, Monomial& m) {
  char c = lx.peek();
  if (c == 'u') {
    lx.get();
    char digit = lx.get();
    if (digit < '0' || digit > '3')
      throw ParseError("unknown jet variable u" + std::string(1, digit));
    int power = 1;
    if (lx.eat('^')) power = static_cast<int>(lx.integer());
    if (power < 0) throw ParseError("negative power");
    switch (digit) {
      case '3': m.a += power; break;
      case '2': m.b += power; break;
      case '1': m.c += power; break;
      case '0': m.d += power; break;
    }
  } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '(') {
    m.lambda *= parse_rational(lx);
  } else {
    throw ParseError(std::string("unexpected character '") + c + "'");
  }
}

Monomial parse_term(Lexer& lx, int sign) {
  Monomial m{Rational(sign), 0, 0, 0, 0};
  parse_factor(lx, m);
  while (lx.eat('*')) parse_factor(lx, m);
  return m;
}

}  // namespace

Nonlinearity parse_nonlinearity(std::string_view spec) {
  Lexer lx{spec};
  std::vector<Monomial> terms;
  int sign = 1;
  if (lx.eat('-'))
    sign = -1;
  else
    lx.eat('+');
  terms.push_back(parse_term(lx, sign));
  while (true) {
    char c = lx.peek();
    if (c == '\0') break;
    if (c == '+')
      sign = 1;
    else if (c == '-')
      sign = -1;
    else
      throw ParseError(std::string("unexpected character '") + c + "'");
    lx.get();
    terms.push_back(parse_term(lx, sign));
  }
  return Nonlinearity(std::move(terms));
}

std::string to_json(const Nonlinearity& n) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Monomial& m : n.monomials()) {
    nlohmann::json j;
    j["lambda"] = {m.lambda.num(), m.lambda.den()};
    j["a"] = m.a;
    j["b"] = m.b;
    j["c"] = m.c;
    j["d"] = m.d;
    arr.push_back(std::move(j));
  }
  return arr.dump();
}

Nonlinearity nonlinearity_from_json(const std::string& text) {
  nlohmann::json arr = nlohmann::json::parse(text);
  if (!arr.is_array()) throw ParseError("nonlinearity JSON must be a list");
  std::vector<Monomial> ms;
  for (const auto& j : arr) {
    const auto& lam = j.at("lambda");
    ms.push_back(Monomial{Rational(lam.at(0).get<long long>(),
                                   lam.at(1).get<long long>()),
                          j.at("a").get<int>(), j.at("b").get<int>(),
                          j.at("c").get<int>(), j.at("d").get<int>()});
  }
  return Nonlinearity(std::move(ms));
}

// ---------------------------------------------------------------------------
// Evaluation. All monomials share one physical grid sized for p_max, so every
// retained spectral mode of N(f) is alias-free.

Field evaluate(const Nonlinearity& n, const Field& f) {
  const int k_grid = f.k_grid();
  const int ngrid = fft::good_size((n.p_max() + 1) * k_grid + 1);

  bool need[4] = {false, false, false, false};
  for (const Monomial& m : n.monomials()) {
    need[0] |= m.d > 0;
    need[1] |= m.c > 0;
    need[2] |= m.b > 0;
    need[3] |= m.a > 0;
  }
  std::vector<double> jet[4];
  for (int i = 0; i < 4; ++i)
    if (need[i]) jet[i] = sample_values(derivative(f, i), ngrid);

  std::vector<double> acc(ngrid, 0.0);
  std::vector<double> term(ngrid);
  for (const Monomial& m : n.monomials()) {
    std::fill(term.begin(), term.end(), m.lambda.to_double());
    const int pw[4] = {m.d, m.c, m.b, m.a};
    for (int i = 0; i < 4; ++i)
      for (int e = 0; e < pw[i]; ++e)
        for (int g = 0; g < ngrid; ++g) term[g] *= jet[i][g];
    for (int g = 0; g < ngrid; ++g) acc[g] += term[g];
  }
  return field_from_samples(acc, k_grid);
}

// ---------------------------------------------------------------------------
// DiffPolynomial.

DiffPolynomial DiffPolynomial::term(const Rational& coef, const Exponents& e) {
  DiffPolynomial p;
  p.add_term(coef, e);
  return p;
}

void DiffPolynomial::add_term(const Rational& coef, const Exponents& e) {
  for (int x : e)
    if (x < 0) throw ParseError("negative jet exponent");
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    if (!coef.is_zero()) terms_.emplace(e, coef);
    return;
  }
  it->second += coef;
  if (it->second.is_zero()) terms_.erase(it);
}

int DiffPolynomial::max_jet() const {
  int top = -1;
  for (const auto& [e, c] : terms_)
    for (int i = 0; i < 7; ++i)
      if (e[i] > 0) top = std::max(top, i);
  return top;
}

int DiffPolynomial::max_degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (int x : e) d += x;
    deg = std::max(deg, d);
  }
  return deg;
}

DiffPolynomial DiffPolynomial::operator+(const DiffPolynomial& o) const {
  DiffPolynomial r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(c, e);
  return r;
}

DiffPolynomial DiffPolynomial::operator-(const DiffPolynomial& o) const {
  DiffPolynomial r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(-c, e);
  return r;
}

DiffPolynomial DiffPolynomial::scaled(const Rational& c) const {
  DiffPolynomial r;
  if (c.is_zero()) return r;
  for (const auto& [e, coef] : terms_) r.add_term(coef * c, e);
  return r;
}

DiffPolynomial DiffPolynomial::partial(int i) const {
  if (i < 0 || i > 6) throw SlotIndexError("jet index out of range");
  DiffPolynomial r;
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponents d = e;
    d[i] -= 1;
    r.add_term(c * Rational(e[i]), d);
  }
  return r;
}

std::string DiffPolynomial::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    Rational coef = c;
    if (first) {
      if (coef.sign() < 0) {
        out += "-";
        coef = -coef;
      }
      first = false;
    } else {
      out += coef.sign() < 0 ? " - " : " + ";
      if (coef.sign() < 0) coef = -coef;
    }
    std::vector<std::string> parts;
    bool monic = true;
    for (int i = 0; i < 7; ++i) {
      if (e[i] == 0) continue;
      monic = false;
      std::string v = "w" + std::to_string(i);
      if (e[i] > 1) v += "^" + std::to_string(e[i]);
      parts.push_back(v);
    }
    if (monic || coef != Rational(1)) parts.insert(parts.begin(), coef.str());
    for (size_t i = 0; i < parts.size(); ++i) {
      if (i) out += "*";
      out += parts[i];
    }
  }
  return out;
}

DiffPolynomial total_derivative(const DiffPolynomial& L) {
  if (L.max_jet() >= 6)
    throw JetOverflow("total derivative would exceed jet variable w6");
  DiffPolynomial r;
  for (const auto& [e, c] : L.terms()) {
    for (int i = 0; i < 6; ++i) {
      if (e[i] == 0) continue;
      DiffPolynomial::Exponents d = e;
      d[i] -= 1;
      d[i + 1] += 1;
      r.add_term(c * Rational(e[i]), d);
    }
  }
  return r;
}

DiffPolynomial euler_operator(const DiffPolynomial& L) {
  if (L.max_jet() > 3)
    throw JetOverflow("euler operator defined for densities over w0..w3");
  DiffPolynomial result;
  for (int i = 0; i <= 3; ++i) {
    DiffPolynomial p = L.partial(i);
    for (int n = 0; n < i; ++n) p = total_derivative(p);
    result = (i % 2 == 0) ? result + p : result - p;
  }
  return result;
}

DiffPolynomial p_density(const Nonlinearity& n) {
  DiffPolynomial dens;
  for (const Monomial& m : n.monomials()) {
    if (m.b == 0) continue;
    dens.add_term(m.lambda * Rational(m.b),
                  {m.d, m.c, m.b - 1, m.a, 0, 0, 0});
  }
  return dens;
}

DiffPolynomial full_density(const Nonlinearity& n) {
  DiffPolynomial dens;
  for (const Monomial& m : n.monomials())
    dens.add_term(m.lambda, {m.d, m.c, m.b, m.a, 0, 0, 0});
  return dens;
}

Field evaluate_density(const DiffPolynomial& L, const Field& f) {
  const int k_grid = f.k_grid();
  const int top = std::max(L.max_jet(), 0);
  const int ngrid = fft::good_size((L.max_degree() + 1) * k_grid + 1);

  std::vector<std::vector<double>> jet(top + 1);
  for (const auto& [e, c] : L.terms())
    for (int i = 0; i <= top; ++i)
      if (e[i] > 0 && jet[i].empty())
        jet[i] = sample_values(derivative(f, i), ngrid);

  std::vector<double> acc(ngrid, 0.0);
  std::vector<double> term(ngrid);
  for (const auto& [e, c] : L.terms()) {
    std::fill(term.begin(), term.end(), c.to_double());
    for (int i = 0; i <= top; ++i)
      for (int p = 0; p < e[i]; ++p)
        for (int g = 0; g < ngrid; ++g) term[g] *= jet[i][g];
    for (int g = 0; g < ngrid; ++g) acc[g] += term[g];
  }
  return field_from_samples(acc, k_grid);
}

double p_functional(const Nonlinearity& n, const Field& f) {
  DiffPolynomial dens = p_density(n);
  if (dens.is_zero()) return 0.0;
  return mean(evaluate_density(dens, f));
}

ResonanceType classify(const Nonlinearity& n) {
  return euler_operator(p_density(n)).is_zero() ? ResonanceType::NonParabolic
                                                : ResonanceType::Parabolic;
}

bool conserves_mean(const Nonlinearity& n) {
  return euler_operator(full_density(n)).is_zero();
}

double j1_functional(const Nonlinearity& n, const Field& phi,
                     const DispersionSymbol& sym, double eps) {
  DiffPolynomial dens = p_density(n);
  if (dens.is_zero()) return 0.0;

  // G = rhs of the regularized equation at phi.
  std::vector<std::complex<double>> g = phi.halfspectrum();
  for (int k = 0; k < static_cast<int>(g.size()); ++k) {
    double k4 = static_cast<double>(k) * k * k * k;
    g[k] *= std::complex<double>(-eps * k4, 0.0) - phi_symbol(sym, k);
  }
  Field rhs = Field::from_halfspectrum(std::move(g)) + evaluate(n, phi);

  double total = 0.0;
  for (int i = 0; i <= 3; ++i) {
    DiffPolynomial p = dens.partial(i);
    if (p.is_zero()) continue;
    total += mean(pointwise_product(evaluate_density(p, phi),
                                    derivative(rhs, i)));
  }
  return total;
}

}  // namespace qlab
