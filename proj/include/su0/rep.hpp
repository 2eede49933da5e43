#pragma once

#include "su0/opalgebra.hpp"
#include "su0/weyl.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace su0::rep {

using opalg::LaurentScalar;
using opalg::Rational;
using opalg::TensorOperator;

// ---------------------------------------------------------------------------
// *-monomials in the generators z_{i,j}
// ---------------------------------------------------------------------------

// One factor z_{i,j} (star = false) or z_{i,j}^* (star = true), 1-based.
struct ZFactor {
  int i = 1, j = 1;
  bool star = false;
  friend bool operator==(const ZFactor&, const ZFactor&) = default;
  friend auto operator<=>(const ZFactor&, const ZFactor&) = default;
};
using ZWord = std::vector<ZFactor>;

// "z[2,3]*z[1,1]^*": '*' separates factors, trailing "^*" marks the adjoint.
// The empty product prints as "1".
std::string zword_str(const ZWord& w);
ZWord parse_zword(std::string_view text);

// ---------------------------------------------------------------------------
// Representations
// ---------------------------------------------------------------------------

// λ̄_{i-1} λ_i with the conventions λ_0 = λ_{n+1} = 1.
LaurentScalar row_monomial(int n, int i);

// A representation given by its generator images: an (n+1)x(n+1) table of
// TensorOperators over a common number of tensor factors.  λ stays formal;
// numeric λ values enter only when truncating (numeric lane).
class SymbolicRep {
 public:
  SymbolicRep(int n, weyl::NormalForm word, int factors,
              std::vector<std::vector<TensorOperator>> images);

  [[nodiscard]] int rank() const noexcept { return n_; }
  [[nodiscard]] const weyl::NormalForm& word() const noexcept { return word_; }
  [[nodiscard]] int factors() const noexcept { return factors_; }
  [[nodiscard]] const TensorOperator& image(int i, int j) const;  // 1-based
  void set_image(int i, int j, TensorOperator op);                // for fixtures

  friend bool operator==(const SymbolicRep&, const SymbolicRep&) = default;

 private:
  int n_;
  weyl::NormalForm word_;
  int factors_;
  std::vector<std::vector<TensorOperator>> images_;
};

// ψ_{s_r} on one ℓ²(ℕ) factor: z_rr ↦ S, z_{r+1,r+1} ↦ S*,
// z_{r,r+1} ↦ P₀, z_{r+1,r} ↦ P₀, z_ij ↦ δ_ij I otherwise.
SymbolicRep elementary_rep(int n, int r);

// One-dimensional character χ_λ with formal λ: z_ii ↦ λ̄_{i-1}λ_i, rest 0.
SymbolicRep character_rep(int n);

// Convolution (φ * ψ)(z_ij) = Σ_m φ(z_im) ⊗ ψ(z_mj); by default m runs over
// the restricted range [min(i,j), max(i,j)], with full_sum it runs 1..n+1.
SymbolicRep convolve(const SymbolicRep& x, const SymbolicRep& y, bool full_sum = false);

// ψ_{λ,ω} = χ_λ * ψ_{s_{l_1}} * ... * ψ_{s_{l_T}} (letters left to right).
SymbolicRep build(int n, const weyl::NormalForm& word);

// Image of a *-monomial; the empty word evaluates to the identity.
TensorOperator evaluate(const SymbolicRep& rep, const ZWord& w);

// Bundle round-trip: {"n":..,"word":"..","factors":..,"images":[[op,..],..]}.
std::string rep_to_json(const SymbolicRep& rep);
SymbolicRep rep_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Identity suites
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string id;      // relation family, e.g. "rel-4", "proj-2"
  std::string detail;  // witness indices
};

struct SuiteReport {
  int checked = 0;
  std::vector<CheckResult> failures;
  [[nodiscard]] bool all_pass() const noexcept { return failures.empty(); }
  void merge(SuiteReport other);
};

// The nine defining relation families (ids rel-1..rel-9) plus the
// star-of-diagonal-segment identity (rel-10), all exact.
SuiteReport verify_defining_relations(const SymbolicRep& rep);

// Projection/partial-isometry suite (ids proj-*), all exact:
// p/q projections, the four partial-sum identities and their closed-form
// products, partial isometries, annihilation/commutation/shift-link lemmas.
SuiteReport verify_projection_suite(const SymbolicRep& rep);

// ---------------------------------------------------------------------------
// V and E operators
// ---------------------------------------------------------------------------

// V_{j,i} = ψ(v_{j,i}) where v_{1,i} = z_{b_1+1,i} and
// v_{j,i} = z_{b_j+1,i} v_{n(j,i),i+1} while n(j,i) is finite.
// Requires 1 <= j <= k and a_j <= i <= b_j + 1.
TensorOperator V_op(const SymbolicRep& rep, int j, int i);

// Elementary-tensor form of V_{j,i} (chain-resolved), including the global
// λ-monomial, for exact comparison against V_op.
TensorOperator closed_form_V(const SymbolicRep& rep, int j, int i);

// Predicted global λ-monomial of V_{j,i} (product of row monomials along the
// chain).
LaurentScalar v_phase(const SymbolicRep& rep, int j, int i);

// |V_{j,a_j}|·|V_{j-1,a_{j-1}}|···|V_{1,a_1}| with |T| = T*T (T is a partial
// isometry), and its closed form: I legs above section j, P₀ legs below.
TensorOperator absV_product(const SymbolicRep& rep, int j);
TensorOperator closed_form_absV(const SymbolicRep& rep, int j);

// E_{j,i} = V*_{n'(j,i),i} V_{j,i} |V_{j-1,a_{j-1}}|···|V_{1,a_1}|, the V*
// factor dropped when n'(j,i) = -infinity.
TensorOperator E_op(const SymbolicRep& rep, int j, int i);

// Elementary-tensor form of E_{j,i} WITHOUT the global λ-monomial (the
// λ-phase of E is reported by e_phase and checked separately).
TensorOperator closed_form_E(const SymbolicRep& rep, int j, int i);
LaurentScalar e_phase(const SymbolicRep& rep, int j, int i);

// *-monomial in the generators whose image is V_{j,i}: the product of
// z_{b_r+1, c} along the chain, leftmost factor first.  Depends only on the
// word, so evaluate(rep, v_zword(rep.word(), j, i)) == V_op(rep, j, i).
ZWord v_zword(const weyl::NormalForm& word, int j, int i);

// *-monomial whose image is E_{j,i} = V*_{n'(j,i),i} V_{j,i} |V_{j-1}| ... |V_1|
// with each |V| = V*V spelled out factor by factor.
ZWord e_zword(const weyl::NormalForm& word, int j, int i);

// If every coefficient of op is rational times one common λ-monomial, return
// that monomial (as a scalar) and the de-phased operator.
struct PhaseSplit {
  TensorOperator structure;
  LaurentScalar phase;
  bool single_phase = false;
};
PhaseSplit split_global_phase(const TensorOperator& op);

// ---------------------------------------------------------------------------
// Rank-one elements of the image (type-I witness)
// ---------------------------------------------------------------------------

// Sandwich construction of ⊗_t |e_{bra[t]}⟩⟨e_{ket[t]}| (legs left to right)
// inside the image algebra, built from E-operator powers.  The result is
// returned de-phased; the stripped λ-monomial goes to *phase if given.
TensorOperator rank_one_projector(const SymbolicRep& rep, const std::vector<int>& bra,
                                  const std::vector<int>& ket,
                                  LaurentScalar* phase = nullptr);

// ⊗_t |e_{bra[t]}⟩⟨e_{ket[t]}| assembled directly from shift words,
// |e_a⟩⟨e_b| = (S*)^a P₀ S^b.
TensorOperator rank_one_direct(int factors, const std::vector<int>& bra,
                               const std::vector<int>& ket);

// ---------------------------------------------------------------------------
// Bialgebra structure
// ---------------------------------------------------------------------------

// Finite sum of elementary tensors whose legs are z-monomials; a leg equal to
// the empty word is the unit.  Canonical (no zero coefficients), so equality
// is map equality.
class FormalTensorSum {
 public:
  explicit FormalTensorSum(int legs = 0) : legs_(legs) {}
  [[nodiscard]] int legs() const noexcept { return legs_; }
  [[nodiscard]] const std::map<std::vector<ZWord>, Rational>& terms() const noexcept {
    return terms_;
  }
  void add(std::vector<ZWord> t, Rational c);
  friend bool operator==(const FormalTensorSum&, const FormalTensorSum&) = default;

 private:
  int legs_;
  std::map<std::vector<ZWord>, Rational> terms_;
};

// Δ(z_ij) = Σ_{k=min(i,j)}^{max(i,j)} z_ik ⊗ z_kj.
FormalTensorSum coproduct_on_generator(int n, int i, int j);
// Apply Δ to one leg of a formal sum (legs must be products of plain z's).
FormalTensorSum coproduct_on_leg(const FormalTensorSum& x, int leg);
// ε = ψ_id: z_ij ↦ δ_ij; applied to one leg (result has one fewer leg).
FormalTensorSum counit_on_leg(const FormalTensorSum& x, int leg);

// (Δ⊗id)Δ(z_ij) == (id⊗Δ)Δ(z_ij), exactly.
bool check_coassociativity(int n, int i, int j);
// (ε⊗id)Δ(z_ij) == z_ij == (id⊗ε)Δ(z_ij), exactly.
bool check_counit_laws(int n, int i, int j);

// φ: rank-n generators to rank-m ones: z_ij ↦ z_ij if i,j <= m+1, δ_ij else.
FormalTensorSum subsemigroup_morphism(int n, int m, const FormalTensorSum& x);
// (φ⊗φ)Δ_n(z_ij) == Δ_m(φ(z_ij)), exactly.
bool check_morphism_intertwines(int n, int m, int i, int j);

// ---------------------------------------------------------------------------
// Path diagrams
// ---------------------------------------------------------------------------

struct DiagramPath {
  int from = 1, to = 1;
  std::vector<int> levels;  // length = letters + 1, levels[0] = from
};

struct Diagram {
  int n = 1;
  weyl::NormalForm word{1};
  std::vector<int> letters;                        // left to right
  std::vector<std::pair<int, int>> section_spans;  // [first,last] leg per segment,
                                                   // listed left to right (j = k..1)
};

Diagram diagram(int n, const weyl::NormalForm& word);

// All paths contributing to z_{m,l}: step t moves level u -> v across the
// letter c = letters[t] with label I (u = v not touching c, c+1), S (u = v =
// c), S* (u = v = c+1) or P₀ (u,v crossing between c and c+1), subject to the
// convolution range constraints.
std::vector<DiagramPath> diagram_paths(const Diagram& d, int m, int l);

// Σ over paths of λ̄_{m-1}λ_m · ⊗_t (step label), expanded; must equal
// build(n, word).image(m, l).
TensorOperator path_sum(const Diagram& d, int m, int l);

}  // namespace su0::rep
