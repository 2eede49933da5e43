#pragma once

// Numeric construction of the q-deformed representations at truncation and
// measurement of their q -> 0+ convergence to the crystal representations.
//
// For q in (0,1) the elementary images use the five-case deformation
//   u_{r,r}     = S sqrt(I - q^{2 Nhat}),
//   u_{r+1,r+1} = sqrt(I - q^{2 Nhat}) S*,
//   u_{r,r+1}   = -q^{Nhat + 1},
//   u_{r+1,r}   = q^{Nhat},
//   u_{i,j}     = delta_{ij} I otherwise,
// with Nhat = diag(0..N-1), and representations are assembled by convolution
// with the full index sum over k = 1..n+1.  The convergence statement
// compares the scaled images (-q)^{min(i-j,0)} psi^(q)(u_{ij}) with the
// crystal images on a window.
//
// q = 0 is supported as a documented special path: the images built then are
// the entrywise limits of the scaled family (the convolution collapses to
// the restricted index range), which reproduce the crystal images exactly.

#include "su0/numeric.hpp"
#include "su0/rep.hpp"
#include "su0/weyl.hpp"

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace su0::qlimit {

using Complex = std::complex<double>;
using numeric::DMat;
using numeric::SpMat;

struct QRep {
  int n = 1;
  double q = 0.5;
  int N = 2;
  int factors = 0;
  weyl::NormalForm word{1};
  std::vector<Complex> lambda;
  std::vector<std::vector<SpMat>> images;  // (n+1) x (n+1)

  const SpMat& image(int i, int j) const;  // 1-based
  long long dim() const;
};

// Elementary q-deformed representation on one leg; lambda is set to ones.
// Requires 0 <= q < 1 and N >= 2 (q = 0 gives the scaled-limit images).
QRep q_elementary(int n, int r, double q, int N);

// chi_lambda * psi^(q)_{s_{l_1}} * ... built left-to-right over the letters
// of the word.  The index sum is full (k = 1..n+1) for q > 0; full_sum =
// false selects the restricted range [min(i,j), max(i,j)] for cross-checks.
// q = 0 forces the restricted range (the full sum only collapses to it in
// the scaled limit).
QRep q_build(const std::vector<Complex>& lambda, const weyl::NormalForm& nf,
             double q, int N, bool full_sum = true);

// (-q)^{min(i-j,0)} . image(i,j); for q = 0 the images are already the
// scaled limits and are returned unchanged.
SpMat scaled_generator(const QRep& qr, int i, int j);

// Per-generator window distances between the scaled images and the crystal
// images of srep materialized at the same lambda and truncation.
struct LimitDistances {
  int n = 1;
  std::vector<std::vector<double>> dist;  // (n+1) x (n+1)
  double max() const;
};

LimitDistances limit_distance(const QRep& qr, const rep::SymbolicRep& srep,
                              int window);

// Unitarity defect of the block matrix [u_{ij}] on the window: the norm of
// B*B - I where B is the (n+1) x (n+1) block matrix of window-compressed
// images.
double corep_unitarity_defect(const QRep& qr, int window);

// Text exports: sparse triplets "row col re im" (one entry per line), and a
// CSV convergence table "q,i,j,distance".
std::string triplets_text(const SpMat& m);
std::string limit_csv(const std::vector<std::pair<double, LimitDistances>>& rows);

}  // namespace su0::qlimit
