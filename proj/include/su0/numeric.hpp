#pragma once

// Finite-dimensional truncations of the symbolic representations.
//
// Every operator in the symbolic layer lives on a tensor power of l^2(N);
// here each factor is cut to dimension N, so an l-leg operator becomes an
// N^l x N^l sparse matrix.  Truncation is exact in the following sense: a
// matrix entry <e_u, T e_v> agrees with the infinite-dimensional value
// whenever all digits of u and v stay below N minus the shift degree of T.
// Quantities are therefore always compared on a window (all digits < W,
// with W <= N/2 by default) where the truncation artifacts cannot reach.
//
// The module also provides the recursively defined operator families used
// by the classification layer: the commutant generators W/U built from
// conjugation sums, the spread operators R/S, and the Wold decomposition
// of an isometry.

#include "su0/opalgebra.hpp"
#include "su0/rep.hpp"
#include "su0/weyl.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <string>
#include <vector>

namespace su0::numeric {

using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Complex>;
using DMat = Eigen::MatrixXcd;

// N x N matrix of the one-leg shift word (S^*)^a S^b:
// entry (row, col) = 1 exactly when col >= b and row == col - b + a.
SpMat word_matrix(const opalg::Word& w, int N);

// Kronecker product, with the left factor owning the most significant digit.
SpMat kron(const SpMat& a, const SpMat& b);

// Materializes a tensor operator: each term becomes the Kronecker product of
// its leg matrices (leg 0 most significant) scaled by the evaluated
// coefficient.  A zero-leg operator materializes as a 1 x 1 matrix.
SpMat materialize(const opalg::TensorOperator& op,
                  const std::vector<Complex>& lambda, int N);

// Row-major list of the full-space indices whose base-N digits are all < W.
std::vector<long long> window_indices(int N, int factors, int window);

// Dense window compression: the W^factors square block of m indexed by
// window_indices(N, factors, window).
DMat window_block(const SpMat& m, int N, int factors, int window);

// Operator (spectral) norm of a dense matrix via SVD.
double op_norm(const DMat& m);

// Operator norm of the window compression.
double window_norm(const SpMat& m, int N, int factors, int window);

// Eigenvalues of a dense matrix.  Dense solves are restricted to dimension
// < 4096; larger matrices are rejected (callers should compress first).
std::vector<Complex> spectrum(const DMat& m);

// Mean of the window diagonal of m, and the window norm of m minus that
// multiple of the identity (the scalar defect).
std::pair<Complex, double> scalar_part(const SpMat& m, int N, int factors,
                                       int window);

// A numerically truncated representation: the (n+1)^2 generator images of a
// rank-n representation on `factors` legs, each leg cut to dimension N,
// together with the window size used for comparisons and the parameter
// values that were substituted.  The table may also hold intermediate data
// produced during identification (smaller logical rank, rescaled rows), so
// the fields are plain and public.
struct TruncatedRep {
  int n = 1;
  int N = 2;
  int factors = 0;
  int window = 1;
  std::vector<Complex> lambda;
  std::vector<std::vector<SpMat>> images;  // (n+1) x (n+1), images[i-1][j-1]

  const SpMat& image(int i, int j) const;  // 1-based
  SpMat& image(int i, int j);
  long long dim() const;  // N^factors
};

// Truncates a symbolic representation at leg dimension N, substituting the
// given parameter values (size = rank).  window < 0 selects N/2.
TruncatedRep truncate_rep(const rep::SymbolicRep& srep, int N,
                          const std::vector<Complex>& lambda,
                          int window = -1);

// Maximum window-compressed residual of the defining relations over all
// applicable index tuples (products that must vanish, commutators, the
// diagonal product, and the adjoint formulas).
double relation_residual(const TruncatedRep& t);

// Truncated conjugation sum  sum_{k=0..cap} x^k t (x^*)^k.  The loop stops
// early once x^k vanishes, which always happens for shift-type x at k = N.
SpMat conj_sum(const SpMat& x, const SpMat& t, int cap);

// Commutant generator W_{i,j} (j <= i <= n+1): W_{j,j} is the bottom-row
// image Z_{n+1,j}; each step up conjugates by the next bottom-row image,
// W_{i,j} = sum_k Z_{n+1,i}^k W_{i-1,j} (Z_{n+1,i}^*)^k, truncated at k = N.
SpMat W_op(const TruncatedRep& t, int i, int j);

// First column (1-based) of the bottom row whose image has window norm > tol,
// or 0 when the whole bottom row vanishes on the window.
int bottom_row_first_nonzero(const TruncatedRep& t, double tol = 1e-10);

// Defect operator U_i (r+2 <= i <= n+1, where r is the first nonzero bottom
// row column): U_{r+1} = Z_{n+1,r}, then the same conjugation recursion as
// W.  U_op(t, i) resolves r internally.
SpMat U_op(const TruncatedRep& t, int i, double tol = 1e-10);

// Spread operators attached to a word with sections (a_r, b_r), r = 1..k.
// The pattern forms place a single S^* on the leg of section j at column
// i-1, with P0 (for R) or I (for S) on the higher columns of section j and
// identity everywhere else.  The formula forms build the same operators from
// the representation by iterated conjugation sums:
//   R(1,i) = V_{1,i};  R(j,i), j >= 2, spreads E_{j,i} over all columns of
//   sections 1..j-1 with x = S(r, 1+c);  S(j, b_j+1) = R(j, b_j+1), and
//   S(j,i) for i <= b_j spreads R(j,i) over columns i+1..b_j+1 of its own
//   section with x = R(j, c).
// Both carry the same global phase as E_{j,i}.  Valid for a_j+1 <= i <=
// b_j+1.  RSBuilder memoizes the recursion.
opalg::TensorOperator R_pattern(const weyl::NormalForm& w, int j, int i);
opalg::TensorOperator S_pattern(const weyl::NormalForm& w, int j, int i);

class RSBuilder {
 public:
  RSBuilder(const TruncatedRep& t, const rep::SymbolicRep& srep);
  const SpMat& R(int j, int i);
  const SpMat& S(int j, int i);

 private:
  const TruncatedRep& t_;
  const rep::SymbolicRep& srep_;
  std::vector<std::vector<SpMat>> r_, s_;
  std::vector<std::vector<char>> r_done_, s_done_;
};

// Wold decomposition data for an isometry W on the truncated space.  The
// wandering subspace is K = ker W^*; when W acts as a pure shift of
// multiplicity d the columns of K are an orthonormal wandering basis and
// the map Phi(kappa ox e_q) = W^q kappa identifies the space with K ox l^2.
//
// The structured path recognizes the product form W = phase . (I ox S^*)
// (last leg a pure right shift): the candidate basis is the slice
// { e_{v N} : v < N^{factors-1} } in natural order.  If the candidates fail
// the kernel test, a dense SVD of W supplies an orthonormal kernel basis
// instead (structured = false; that basis is canonical only up to a unitary
// of K).
struct WoldResult {
  bool structured = false;
  int d = 0;            // wandering multiplicity = dim ker W^*
  DMat K;               // dim x d, orthonormal columns spanning ker W^*
  double isometry_defect = 0.0;  // window norm of W^*W - I
  double unitary_defect = 0.0;   // window norm of WW^* - I
};

WoldResult wold(const SpMat& w, int N, int factors, int window,
                double tol = 1e-10);

}  // namespace su0::numeric
