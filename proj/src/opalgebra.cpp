#include "su0/opalgebra.hpp"

#include <json.hpp>

#include <sstream>
#include <stdexcept>

namespace su0::opalg {

Monomial mono_mul(const Monomial& x, const Monomial& y) {
  Monomial out = x;
  for (const auto& [var, exp] : y) {
    int& e = out[var];
    e += exp;
    if (e == 0) out.erase(var);
  }
  return out;
}

Monomial mono_conj(const Monomial& x) {
  Monomial out;
  for (const auto& [var, exp] : x) out.emplace(var, -exp);
  return out;
}

Monomial lambda_var(int var, int exponent) {
  if (var < 1) throw std::invalid_argument("lambda variable index must be >= 1");
  Monomial m;
  if (exponent != 0) m.emplace(var, exponent);
  return m;
}

LaurentScalar::LaurentScalar(Rational value) {
  if (value != 0) terms_.emplace(Monomial{}, std::move(value));
}

LaurentScalar LaurentScalar::monomial(Monomial m, Rational coeff) {
  LaurentScalar s;
  if (coeff != 0) s.terms_.emplace(std::move(m), std::move(coeff));
  return s;
}

LaurentScalar& LaurentScalar::operator+=(const LaurentScalar& o) {
  for (const auto& [m, c] : o.terms_) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

LaurentScalar& LaurentScalar::operator-=(const LaurentScalar& o) {
  for (const auto& [m, c] : o.terms_) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, -c);
    } else {
      it->second -= c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

LaurentScalar operator*(const LaurentScalar& x, const LaurentScalar& y) {
  LaurentScalar out;
  for (const auto& [mx, cx] : x.terms_)
    for (const auto& [my, cy] : y.terms_) {
      Monomial m = mono_mul(mx, my);
      auto it = out.terms_.find(m);
      if (it == out.terms_.end()) {
        out.terms_.emplace(std::move(m), cx * cy);
      } else {
        it->second += cx * cy;
        if (it->second == 0) out.terms_.erase(it);
      }
    }
  return out;
}

LaurentScalar operator-(const LaurentScalar& x) {
  LaurentScalar out;
  for (const auto& [m, c] : x.terms_) out.terms_.emplace(m, -c);
  return out;
}

LaurentScalar LaurentScalar::conj() const {
  LaurentScalar out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(mono_conj(m), c);
  return out;
}

std::complex<double> LaurentScalar::eval(
    const std::vector<std::complex<double>>& lambda) const {
  std::complex<double> acc = 0.0;
  for (const auto& [m, c] : terms_) {
    std::complex<double> term = static_cast<double>(c);
    for (const auto& [var, exp] : m) {
      if (var > static_cast<int>(lambda.size()))
        throw std::invalid_argument("lambda assignment too short for monomial");
      const std::complex<double>& v = lambda[static_cast<std::size_t>(var) - 1];
      // unit modulus: negative powers are powers of the conjugate
      std::complex<double> base = exp >= 0 ? v : std::conj(v);
      for (int t = 0; t < std::abs(exp); ++t) term *= base;
    }
    acc += term;
  }
  return acc;
}

std::string LaurentScalar::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c.str();
    for (const auto& [var, exp] : m) {
      os << "*L" << var;
      if (exp != 1) os << "^" << exp;
    }
  }
  return os.str();
}

Word t_mul(Word x, Word y) {
  const std::uint32_t pop = std::min(x.b, y.a);
  return Word{x.a + (y.a - pop), x.b - pop + y.b};
}

Word t_adjoint(Word x) { return Word{x.b, x.a}; }

bool matrix_entry(Word w, std::uint64_t row, std::uint64_t col) {
  return col >= w.b && row == col - w.b + w.a;
}

TensorOperator::TensorOperator(int factors) : factors_(factors) {
  if (factors < 0) throw std::invalid_argument("factor count must be >= 0");
}

TensorOperator TensorOperator::identity(int factors) {
  TensorOperator out(factors);
  out.terms_.emplace(TensorWord(static_cast<std::size_t>(factors)), LaurentScalar(1));
  return out;
}

TensorOperator TensorOperator::monomial(TensorWord w, LaurentScalar c) {
  TensorOperator out(static_cast<int>(w.size()));
  if (!c.is_zero()) out.terms_.emplace(std::move(w), std::move(c));
  return out;
}

void TensorOperator::add_term(const TensorWord& w, const LaurentScalar& c) {
  if (static_cast<int>(w.size()) != factors_)
    throw std::invalid_argument("tensor word length mismatch");
  if (c.is_zero()) return;
  auto it = terms_.find(w);
  if (it == terms_.end()) {
    terms_.emplace(w, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

namespace {

void require_same_factors(const TensorOperator& x, const TensorOperator& y) {
  if (x.factors() != y.factors())
    throw std::invalid_argument("tensor factor count mismatch");
}

}  // namespace

TensorOperator tensor_add(const TensorOperator& x, const TensorOperator& y) {
  require_same_factors(x, y);
  TensorOperator out = x;
  for (const auto& [w, c] : y.terms()) out.add_term(w, c);
  return out;
}

TensorOperator tensor_sub(const TensorOperator& x, const TensorOperator& y) {
  require_same_factors(x, y);
  TensorOperator out = x;
  for (const auto& [w, c] : y.terms()) out.add_term(w, -c);
  return out;
}

TensorOperator tensor_mul(const TensorOperator& x, const TensorOperator& y) {
  require_same_factors(x, y);
  TensorOperator out(x.factors());
  TensorWord w(static_cast<std::size_t>(x.factors()));
  for (const auto& [wx, cx] : x.terms())
    for (const auto& [wy, cy] : y.terms()) {
      for (std::size_t t = 0; t < w.size(); ++t) w[t] = t_mul(wx[t], wy[t]);
      out.add_term(w, cx * cy);
    }
  return out;
}

TensorOperator tensor_scale(const LaurentScalar& c, const TensorOperator& x) {
  TensorOperator out(x.factors());
  for (const auto& [w, cw] : x.terms()) out.add_term(w, c * cw);
  return out;
}

TensorOperator tensor_adjoint(const TensorOperator& x) {
  TensorOperator out(x.factors());
  TensorWord w(static_cast<std::size_t>(x.factors()));
  for (const auto& [wx, cx] : x.terms()) {
    for (std::size_t t = 0; t < w.size(); ++t) w[t] = t_adjoint(wx[t]);
    out.add_term(w, cx.conj());
  }
  return out;
}

TensorOperator tensor_concat(const TensorOperator& x, const TensorOperator& y) {
  TensorOperator out(x.factors() + y.factors());
  TensorWord w(static_cast<std::size_t>(x.factors() + y.factors()));
  for (const auto& [wx, cx] : x.terms())
    for (const auto& [wy, cy] : y.terms()) {
      std::copy(wx.begin(), wx.end(), w.begin());
      std::copy(wy.begin(), wy.end(), w.begin() + x.factors());
      out.add_term(w, cx * cy);
    }
  return out;
}

TensorOperator embed(int factors, int pos, const TensorOperator& single) {
  if (single.factors() != 1) throw std::invalid_argument("embed expects a 1-factor operator");
  if (pos < 0 || pos >= factors) throw std::invalid_argument("embed position out of range");
  TensorOperator out(factors);
  TensorWord w(static_cast<std::size_t>(factors));
  for (const auto& [ws, cs] : single.terms()) {
    std::fill(w.begin(), w.end(), Word{});
    w[static_cast<std::size_t>(pos)] = ws[0];
    out.add_term(w, cs);
  }
  return out;
}

TensorOperator op_S() { return TensorOperator::monomial({Word{0, 1}}); }
TensorOperator op_Sstar() { return TensorOperator::monomial({Word{1, 0}}); }

TensorOperator op_P0() {
  TensorOperator out(1);
  out.add_term({Word{0, 0}}, LaurentScalar(1));
  out.add_term({Word{1, 1}}, LaurentScalar(-1));
  return out;
}

TensorOperator op_word(Word w) { return TensorOperator::monomial({w}); }

LaurentScalar sigma_char(const TensorOperator& x) {
  // σ maps every shift word to 1, so each term contributes its coefficient.
  LaurentScalar out;
  for (const auto& [w, c] : x.terms()) out += c;
  return out;
}

TensorOperator sigma_last(const TensorOperator& x) {
  if (x.factors() == 0) throw std::invalid_argument("sigma_last needs at least one factor");
  TensorOperator out(x.factors() - 1);
  for (const auto& [w, c] : x.terms())
    out.add_term(TensorWord(w.begin(), w.end() - 1), c);
  return out;
}

bool is_self_adjoint(const TensorOperator& x) { return x == tensor_adjoint(x); }

bool is_projection(const TensorOperator& x) {
  return is_self_adjoint(x) && tensor_mul(x, x) == x;
}

bool is_partial_isometry(const TensorOperator& x) {
  return tensor_mul(tensor_mul(x, tensor_adjoint(x)), x) == x;
}

bool is_normal(const TensorOperator& x) {
  const TensorOperator xs = tensor_adjoint(x);
  return tensor_mul(xs, x) == tensor_mul(x, xs);
}

std::string op_to_json(const TensorOperator& x, int n_lambda) {
  nlohmann::ordered_json j;
  j["factors"] = x.factors();
  j["terms"] = nlohmann::ordered_json::array();
  for (const auto& [w, c] : x.terms()) {
    for (const auto& [m, coeff] : c.terms()) {
      nlohmann::ordered_json term;
      auto& word = term["word"] = nlohmann::ordered_json::array();
      for (const Word& f : w) word.push_back({f.a, f.b});
      std::vector<int> exps(static_cast<std::size_t>(n_lambda), 0);
      for (const auto& [var, e] : m) {
        if (var > n_lambda)
          throw std::invalid_argument("monomial variable exceeds n_lambda");
        exps[static_cast<std::size_t>(var) - 1] = e;
      }
      term["coeff"] = {{"num", boost::multiprecision::numerator(coeff).str()},
                       {"den", boost::multiprecision::denominator(coeff).str()},
                       {"lambda_exponents", exps}};
      j["terms"].push_back(std::move(term));
    }
  }
  return j.dump();
}

TensorOperator op_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  TensorOperator out(j.at("factors").get<int>());
  for (const auto& term : j.at("terms")) {
    TensorWord w;
    for (const auto& f : term.at("word"))
      w.push_back(Word{f.at(0).get<std::uint32_t>(), f.at(1).get<std::uint32_t>()});
    const auto& coeff = term.at("coeff");
    Rational c(boost::multiprecision::cpp_int(coeff.at("num").get<std::string>()),
               boost::multiprecision::cpp_int(coeff.at("den").get<std::string>()));
    Monomial m;
    int var = 1;
    for (const auto& e : coeff.at("lambda_exponents")) {
      if (e.get<int>() != 0) m.emplace(var, e.get<int>());
      ++var;
    }
    out.add_term(w, LaurentScalar::monomial(std::move(m), std::move(c)));
  }
  return out;
}

}  // namespace su0::opalg
