#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace su0::opalg {

using Rational = boost::multiprecision::cpp_rational;

// Laurent monomial in the unimodular parameters λ_1, ..., λ_n.  A negative
// exponent is the conjugate (= inverse on the unit circle).  Stored sparse,
// no zero exponents; the empty map is the constant 1.
using Monomial = std::map<int, int>;

Monomial mono_mul(const Monomial& x, const Monomial& y);
Monomial mono_conj(const Monomial& x);
// λ_var^exponent as a monomial; var >= 1.
Monomial lambda_var(int var, int exponent = 1);

// Finite sum  Σ c_e λ^e  with exact rational c_e, canonical (no zero terms).
// Distinct monomials are linearly independent as functions on the torus, so
// operator== is exact semantic equality.
class LaurentScalar {
 public:
  LaurentScalar() = default;  // zero
  LaurentScalar(int value) : LaurentScalar(Rational(value)) {}
  LaurentScalar(Rational value);
  static LaurentScalar monomial(Monomial m, Rational coeff = 1);

  [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
  [[nodiscard]] bool is_monomial() const noexcept { return terms_.size() == 1; }
  [[nodiscard]] const std::map<Monomial, Rational>& terms() const noexcept { return terms_; }

  LaurentScalar& operator+=(const LaurentScalar& o);
  LaurentScalar& operator-=(const LaurentScalar& o);
  friend LaurentScalar operator+(LaurentScalar x, const LaurentScalar& y) { return x += y; }
  friend LaurentScalar operator-(LaurentScalar x, const LaurentScalar& y) { return x -= y; }
  friend LaurentScalar operator*(const LaurentScalar& x, const LaurentScalar& y);
  friend LaurentScalar operator-(const LaurentScalar& x);

  // Complex conjugate: coefficients are real, so only exponents flip sign.
  [[nodiscard]] LaurentScalar conj() const;
  // Substitute unit-modulus values; lambda[i-1] is the value of λ_i.
  [[nodiscard]] std::complex<double> eval(const std::vector<std::complex<double>>& lambda) const;
  [[nodiscard]] std::string str() const;

  friend bool operator==(const LaurentScalar&, const LaurentScalar&) = default;

 private:
  std::map<Monomial, Rational> terms_;
};

// The shift word (S*)^a S^b on ℓ²(ℕ), where S e_m = e_{m-1}, S e_0 = 0.
// The words are closed under multiplication (S S* = I pops pairs exactly)
// and linearly independent, so every Toeplitz-algebra element used here is a
// canonical sum of words.  (0,0) is the identity; P₀ = I - S*S is a sum.
struct Word {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  auto operator<=>(const Word&) const = default;
};

// (S*)^a S^b · (S*)^c S^d = (S*)^{a+max(c-b,0)} S^{d+max(b-c,0)}.
Word t_mul(Word x, Word y);
// ((S*)^a S^b)* = (S*)^b S^a.
Word t_adjoint(Word x);
// <e_row, (S*)^a S^b e_col> ∈ {0,1}: equals 1 iff col >= b and row == col - b + a.
bool matrix_entry(Word w, std::uint64_t row, std::uint64_t col);

using TensorWord = std::vector<Word>;

// Finite sum of elementary tensors of shift words with LaurentScalar
// coefficients, over a fixed number of factors; canonical expanded form,
// so operator== is exact operator equality.  factors == 0 models scalars.
class TensorOperator {
 public:
  TensorOperator() = default;             // zero on 0 factors
  explicit TensorOperator(int factors);   // zero operator
  static TensorOperator identity(int factors);
  static TensorOperator monomial(TensorWord w, LaurentScalar c = LaurentScalar(1));

  [[nodiscard]] int factors() const noexcept { return factors_; }
  [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
  [[nodiscard]] const std::map<TensorWord, LaurentScalar>& terms() const noexcept {
    return terms_;
  }

  void add_term(const TensorWord& w, const LaurentScalar& c);

  friend bool operator==(const TensorOperator&, const TensorOperator&) = default;

 private:
  int factors_ = 0;
  std::map<TensorWord, LaurentScalar> terms_;
};

TensorOperator tensor_add(const TensorOperator& x, const TensorOperator& y);
TensorOperator tensor_sub(const TensorOperator& x, const TensorOperator& y);
TensorOperator tensor_mul(const TensorOperator& x, const TensorOperator& y);
TensorOperator tensor_scale(const LaurentScalar& c, const TensorOperator& x);
// (A ⊗ B)* = A* ⊗ B* factor-wise; coefficients conjugate.
TensorOperator tensor_adjoint(const TensorOperator& x);
// Outer tensor product: legs of x followed by legs of y.
TensorOperator tensor_concat(const TensorOperator& x, const TensorOperator& y);
// Single-factor operator placed at leg `pos` (0-based) among `factors` legs,
// identity elsewhere.
TensorOperator embed(int factors, int pos, const TensorOperator& single);

// One-factor building blocks.
TensorOperator op_S();
TensorOperator op_Sstar();
TensorOperator op_P0();  // I - S*S
TensorOperator op_word(Word w);

// The Toeplitz character σ (S ↦ 1, S* ↦ 1, so P₀ ↦ 0) applied to every leg.
LaurentScalar sigma_char(const TensorOperator& x);
// σ applied to the last leg only; result has one fewer factor.
TensorOperator sigma_last(const TensorOperator& x);

// Exact algebraic predicates.
bool is_self_adjoint(const TensorOperator& x);
bool is_projection(const TensorOperator& x);         // x = x* = x²
bool is_partial_isometry(const TensorOperator& x);   // x x* x = x
bool is_normal(const TensorOperator& x);             // x*x = xx*

// JSON round-trip per the documented schema:
//   {factors: m, terms: [{word: [[a,b],...], coeff: {num, den, lambda_exponents: [e_1..e_n]}}]}
// One term entry per (word, monomial) pair; num/den are decimal strings;
// lambda_exponents is the dense exponent vector of length n_lambda.
std::string op_to_json(const TensorOperator& x, int n_lambda);
TensorOperator op_from_json(const std::string& text);

}  // namespace su0::opalg
