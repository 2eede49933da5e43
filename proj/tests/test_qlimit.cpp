#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "su0/numeric.hpp"
#include "su0/qlimit.hpp"
#include "su0/rep.hpp"
#include "su0/weyl.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

using namespace su0;
using qlimit::Complex;
using qlimit::DMat;
using qlimit::SpMat;

namespace {

const std::vector<Complex> kUnitPair = {Complex(0.6, 0.8),
                                        Complex(5.0 / 13.0, 12.0 / 13.0)};

double max_entry_diff(const SpMat& a, const SpMat& b, int N, int factors,
                      int window) {
  const DMat da = numeric::window_block(a, N, factors, window);
  const DMat db = numeric::window_block(b, N, factors, window);
  return (da - db).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("deformed elementary images") {
  const double q = 0.1;
  const auto e = qlimit::q_elementary(1, 1, q, 4);
  CHECK(e.dim() == 4);

  // Annihilation-type entry (0, 1) = sqrt(1 - q^2).
  CHECK(std::abs(e.image(1, 1).coeff(0, 1) - Complex(0.99498743710662, 0.0)) <
        1e-9);
  // Lower corner is diag(1, q, q^2, ...).
  for (int m = 0; m < 4; ++m)
    CHECK(std::abs(e.image(2, 1).coeff(m, m) - std::pow(q, m)) < 1e-15);
  // Upper corner is -q^{Nhat + 1}.
  for (int m = 0; m < 4; ++m)
    CHECK(std::abs(e.image(1, 2).coeff(m, m) - Complex(-std::pow(q, m + 1), 0)) <
          1e-15);
  // Creation-type entries (m+1, m) = sqrt(1 - q^{2(m+1)}).
  for (int m = 0; m + 1 < 4; ++m)
    CHECK(std::abs(e.image(2, 2).coeff(m + 1, m) -
                   std::sqrt(1.0 - std::pow(q, 2 * (m + 1)))) < 1e-15);

  // Away from the crossing the images are Kronecker deltas.
  const auto e2 = qlimit::q_elementary(2, 1, q, 3);
  CHECK(SpMat(e2.image(3, 3) - numeric::word_matrix({0, 0}, 3)).norm() == 0.0);
  CHECK(e2.image(1, 3).nonZeros() == 0);
  CHECK(e2.image(3, 1).nonZeros() == 0);

  CHECK_THROWS(qlimit::q_elementary(2, 3, q, 4));
  CHECK_THROWS(qlimit::q_elementary(2, 1, 1.0, 4));
  CHECK_THROWS(qlimit::q_elementary(2, 1, q, 1));
}

TEST_CASE("building the deformed representation") {
  // Identity word: the diagonal character.
  const auto chi = qlimit::q_build(kUnitPair, weyl::NormalForm(2), 0.2, 4);
  CHECK(chi.dim() == 1);
  CHECK(std::abs(chi.image(1, 1).coeff(0, 0) - kUnitPair[0]) < 1e-15);
  CHECK(std::abs(chi.image(2, 2).coeff(0, 0) -
                 std::conj(kUnitPair[0]) * kUnitPair[1]) < 1e-15);
  CHECK(chi.image(1, 2).nonZeros() == 0);

  // Two letters give dimension N^2.
  const auto two = qlimit::q_build(kUnitPair, weyl::parse_word(2, "s[1,2]"),
                                   0.2, 5);
  CHECK(two.factors == 2);
  CHECK(two.dim() == 25);
  CHECK(two.image(1, 1).rows() == 25);

  // The block matrix of images is unitary on the window up to the
  // documented tolerance.
  const double q = 0.3;
  const int N = 6;
  const auto full = qlimit::q_build(kUnitPair, weyl::longest_word(2), q, N);
  const double defect = qlimit::corep_unitarity_defect(full, N / 2);
  CHECK(defect <= 10.0 * std::pow(q, N / 2.0));

  CHECK_THROWS(qlimit::q_build({Complex(1.0, 0.0)}, weyl::longest_word(2), q, N));
}

TEST_CASE("scaled generators") {
  const double q = 0.2;
  const std::vector<Complex> ones = {Complex(1, 0)};
  const auto qr = qlimit::q_build(ones, weyl::NormalForm(1, {{1, 1}}), q, 5);

  // No scaling at or below the diagonal.
  CHECK(SpMat(qlimit::scaled_generator(qr, 2, 1) - qr.image(2, 1)).norm() ==
        0.0);
  CHECK(SpMat(qlimit::scaled_generator(qr, 1, 1) - qr.image(1, 1)).norm() ==
        0.0);

  // Above the diagonal: (-q)^{-1} . (-q^{Nhat+1}) = q^{Nhat} -> P0.
  const SpMat scaled = qlimit::scaled_generator(qr, 1, 2);
  for (int m = 0; m < 5; ++m)
    CHECK(std::abs(scaled.coeff(m, m) - std::pow(q, m)) < 1e-14);
}

TEST_CASE("convergence to the crystal representation") {
  const auto word = weyl::longest_word(2);
  const auto srep = rep::build(2, word);
  const int N = 8, W = 4;

  // q = 0 substitutes the scaled limits directly: distance exactly zero.
  const auto at0 = qlimit::q_build(kUnitPair, word, 0.0, N);
  CHECK(qlimit::limit_distance(at0, srep, W).max() < 1e-14);

  // Linear-rate convergence along a decreasing q grid.
  std::vector<double> grid = {0.3, 0.1, 0.05};
  std::vector<double> dist;
  for (double q : grid) {
    const auto qr = qlimit::q_build(kUnitPair, word, q, N);
    const auto d = qlimit::limit_distance(qr, srep, W);
    CHECK(d.max() <= 4.0 * q);
    dist.push_back(d.max());

    // Entrywise gap at most q on the window.
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) {
        const SpMat crystal =
            numeric::materialize(srep.image(i, j), kUnitPair, N);
        CHECK(max_entry_diff(qlimit::scaled_generator(qr, i, j), crystal, N,
                             qr.factors, W) <= q + 1e-12);
      }
  }
  CHECK(dist[1] < dist[0]);
  CHECK(dist[2] < dist[1]);
  // Halving q from 0.1 to 0.05 at least nearly halves the distance.
  CHECK(dist[2] <= 0.8 * dist[1]);

  // Shape mismatch is rejected.
  const auto other = rep::build(2, weyl::parse_word(2, "s[1,2]"));
  const auto qr = qlimit::q_build(kUnitPair, word, 0.1, N);
  CHECK_THROWS(qlimit::limit_distance(qr, other, W));
  CHECK_THROWS(qlimit::limit_distance(qr, srep, N));
}

TEST_CASE("full and restricted sums collapse together") {
  const auto word = weyl::longest_word(2);
  const int N = 6, W = 3;
  double prev = -1.0;
  for (double q : {0.1, 0.01}) {
    const auto full = qlimit::q_build(kUnitPair, word, q, N, true);
    const auto restr = qlimit::q_build(kUnitPair, word, q, N, false);
    double worst = 0.0;
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) {
        const SpMat diff = SpMat(qlimit::scaled_generator(full, i, j) -
                                 qlimit::scaled_generator(restr, i, j));
        worst = std::max(worst,
                         numeric::window_norm(diff, N, full.factors, W));
      }
    if (prev >= 0.0) CHECK(worst <= 0.15 * prev);
    prev = worst;
  }
  CHECK(prev < 0.1);
}

TEST_CASE("text exports") {
  SpMat p0(3, 3);
  p0.insert(0, 0) = Complex(1.0, 0.0);
  CHECK(qlimit::triplets_text(p0) == "0 0 1 0\n");

  qlimit::LimitDistances d;
  d.n = 1;
  d.dist = {{0.0, 0.25}, {0.5, 0.125}};
  const std::string csv = qlimit::limit_csv({{0.1, d}});
  CHECK(csv == "q,i,j,distance\n0.1,1,1,0\n0.1,1,2,0.25\n0.1,2,1,0.5\n0.1,2,2,0.125\n");
}
