#pragma once

// Classification and identification of the irreducible representations.
//
// Heart of the module: every irreducible representation is determined by the
// pair (lambda, word), and the two directions of that statement are both
// effective.  `equivalent` decides unitary equivalence of two built
// representations and, when they differ, produces a *-monomial witness whose
// images separate them (exactly zero on one side and of window norm >= 0.5
// on the other, or with spectra at Hausdorff distance >= 1e-6).  `identify`
// runs the converse: it peels elementary factors off an unlabeled
// representation table (symbolically, or numerically via the Wold
// decomposition of the canonical shift) until only a character is left,
// recovering the word and the parameter tuple.

#include "su0/numeric.hpp"
#include "su0/opalgebra.hpp"
#include "su0/rep.hpp"
#include "su0/weyl.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace su0::classify {

using numeric::Complex;

// ---------------------------------------------------------------------------
// r-index
// ---------------------------------------------------------------------------

// Smallest column j with image(n+1, j) != 0, exactly.  Throws
// std::invalid_argument when the whole bottom row vanishes (impossible for a
// representation of the algebra: the diagonal product is the identity).
int r_index(const rep::SymbolicRep& rep);

// Same on a truncated table; window norms below tol count as zero.
int r_index(const numeric::TruncatedRep& trep, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Equivalence
// ---------------------------------------------------------------------------

// Unit-modulus parameter values; std::nullopt keeps lambda formal (the
// canonical tuple of independent unimodular parameters).  Formal and numeric
// specifications cannot be mixed within one comparison.
using LambdaSpec = std::optional<std::vector<Complex>>;

struct EquivalenceVerdict {
  bool equivalent = false;
  // "equal" | "lambda" | "I" | "II" | "III" | "IV"
  std::string case_tag;
  // *-monomial separating the two representations (inequivalent pairs only).
  std::optional<rep::ZWord> witness;
  // Discriminating property: "zero-nonzero" | "spectral".
  std::string kind;
  // Spectra of the witness image in the two representations (spectral kind).
  std::vector<Complex> spectrum_a, spectrum_b;
  double hausdorff = 0.0;     // Hausdorff distance between the spectra
  double nonzero_norm = 0.0;  // materialized window norm on the nonzero side
  bool verified = false;      // the discriminating property was confirmed
  std::string detail;
};

// Decides whether psi_{lambda_a, word_a} and psi_{lambda_b, word_b} are
// unitarily equivalent: they are iff the (lambda, word) pairs coincide
// (formal lambdas are a single canonical tuple, numeric ones compare
// entrywise within 1e-12).  Inequivalent pairs get a witness and a verified
// discriminating property.  The numeric confirmations (window norms,
// fallback spectra) run on a small truncation of leg dimension N.
EquivalenceVerdict equivalent(int n, const LambdaSpec& lambda_a,
                              const weyl::NormalForm& word_a,
                              const LambdaSpec& lambda_b,
                              const weyl::NormalForm& word_b, int N = 8);

std::string verdict_to_json(const EquivalenceVerdict& v);

// ---------------------------------------------------------------------------
// Symbolic factorization
// ---------------------------------------------------------------------------

struct SymbolicPeel {
  int letter = 0;        // r: the elementary factor peeled off
  rep::SymbolicRep pi1;  // remaining representation, one tensor leg fewer
};

// Splits psi = pi1 * psi_{s_r} where r is the last letter of the word, by
// applying the Toeplitz character to the last tensor leg of every image.
// Verifies the exact reconstruction convolve(pi1, psi_{s_r}) == psi and
// throws std::runtime_error when it fails (input not in standard form);
// throws std::invalid_argument when there is no factor to peel.
SymbolicPeel peel_symbolic(const rep::SymbolicRep& rep);

// ---------------------------------------------------------------------------
// Numeric factorization
// ---------------------------------------------------------------------------

struct FactorStep {
  int r = 0;                     // letter peeled
  Complex mu;                    // scalar value of W_{n+1,r} on the window
  double scalar_defect = 0.0;    // off-scalar residual of W_{n+1,r}
  double isometry_defect = 0.0;  // window norm of W*W - I
  double pure_defect = 0.0;      // window norm of W^N (residual unitary part)
  double decomp_residual = 0.0;  // max_ij window norm of Z_ij - sum_k Y1_ik Y2_kj
  double pattern_defect = 0.0;   // window norm of W - I (x) S* (structured only)
  bool structured = false;       // wandering basis found in product form
  numeric::TruncatedRep pi1;     // compression to the wandering fiber
};

// One step of the numeric factorization psi ~= pi1 * psi_{s_r}:
//   1. r = r_index; W_{n+1,r} must be a unimodular scalar mu on the window;
//   2. W = conj(mu) W_{n+1,r+1} must be an isometry with no unitary Wold
//      part; its wandering multiplicity must equal dim / N;
//   3. the dressed table Y1 (Z_ij away from columns r, r+1; Z_ir W at column
//      r; W* Z_{i,r+1} at column r+1) is compressed to the wandering fiber,
//      giving pi1;
//   4. the decomposition Z_ij = sum_{k=min(i,j)}^{max(i,j)} Y1_ik Y2_kj is
//      checked on the window, where Y2 places W* at (r,r), W at (r+1,r+1),
//      I - WW* at the (r, r+1) crossings and delta_ij I elsewhere.
// Throws std::runtime_error when a defect exceeds tol, std::invalid_argument
// when no factorization step applies (no legs, or r = n+1).
FactorStep factor_numeric(const numeric::TruncatedRep& t, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Identification
// ---------------------------------------------------------------------------

struct IdentificationResult {
  int n = 0;
  bool symbolic = true;
  weyl::NormalForm word = weyl::NormalForm(1);  // recovered word
  // Symbolic mode: the recovered parameters as exact Laurent monomials.
  std::vector<opalg::LaurentScalar> lambda_formal;
  // Numeric mode: the recovered unit-modulus parameter values.
  std::vector<Complex> lambda;
  std::vector<std::string> steps;  // per-step diagnostics
  double max_residual = 0.0;       // numeric mode: worst defect seen
};

// Full identification loop: peel elementary factors while r <= m, descend a
// rank when r = m+1 (the corner entry is a unimodular scalar mu_0; set
// lambda_m = conj(mu_0), rescale row m by mu_0 and drop row/column m+1), and
// finish at rank 0 where the remaining entry must be the identity.  Letters
// peeled at one rank must be consecutive, and the collected segments must
// have strictly decreasing b (enforced by the word constructor) -- any
// violation throws rather than silently reordering.
IdentificationResult identify(const rep::SymbolicRep& rep);
IdentificationResult identify(const numeric::TruncatedRep& trep,
                              double tol = 1e-8);

std::string identification_to_json(const IdentificationResult& r);

}  // namespace su0::classify
