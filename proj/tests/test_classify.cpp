#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "su0/classify.hpp"
#include "su0/numeric.hpp"
#include "su0/opalgebra.hpp"
#include "su0/rep.hpp"
#include "su0/weyl.hpp"

#include <json.hpp>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

using namespace su0;
using classify::Complex;
using classify::LambdaSpec;
using numeric::SpMat;
using opalg::LaurentScalar;
using opalg::TensorOperator;

namespace {

const std::vector<Complex> kUnitPair{Complex(0.6, 0.8),
                                     Complex(5.0 / 13.0, 12.0 / 13.0)};

const LambdaSpec kFormal = std::nullopt;

rep::SymbolicRep built(int n, const std::string& word) {
  return rep::build(n, weyl::parse_word(n, word));
}

// Distance from z to the closest point of s.
double dist_to(const std::vector<Complex>& s, Complex z) {
  double best = 1e300;
  for (Complex p : s) best = std::min(best, std::abs(p - z));
  return best;
}

}  // namespace

TEST_CASE("witness words reproduce the V and E operators") {
  const weyl::NormalForm w = weyl::parse_word(3, "s[2,2] s[1,3]");
  const rep::SymbolicRep r = rep::build(3, w);
  for (int j = 1; j <= w.size(); ++j) {
    const auto& seg = w.segments()[static_cast<std::size_t>(j) - 1];
    for (int i = seg.a; i <= seg.b + 1; ++i) {
      CAPTURE(j);
      CAPTURE(i);
      CHECK(rep::evaluate(r, rep::v_zword(w, j, i)) == rep::V_op(r, j, i));
      CHECK(rep::evaluate(r, rep::e_zword(w, j, i)) == rep::E_op(r, j, i));
    }
  }
  // serialization round-trip of a witness word
  const rep::ZWord e22 = rep::e_zword(w, 2, 2);
  CHECK(rep::parse_zword(rep::zword_str(e22)) == e22);
  CHECK(rep::v_zword(w, 1, 2) == rep::ZWord{{4, 2, false}});
  CHECK_THROWS_AS(rep::v_zword(w, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(rep::v_zword(w, 2, 4), std::invalid_argument);
}

TEST_CASE("r-index: symbolic and truncated") {
  // words with b_1 = n have r = a_1; otherwise the bottom row starts at n+1
  CHECK(classify::r_index(built(2, "s[1,1] s[1,2]")) == 1);
  CHECK(classify::r_index(built(2, "s[2,2]")) == 2);
  CHECK(classify::r_index(built(2, "s[1,1]")) == 3);
  CHECK(classify::r_index(built(2, "e")) == 3);
  CHECK(classify::r_index(built(3, "s[1,3]")) == 1);

  for (const std::string word : {"s[1,1] s[1,2]", "s[2,2]", "s[1,1]", "e"}) {
    const auto t = numeric::truncate_rep(built(2, word), 8, kUnitPair, 4);
    CHECK(classify::r_index(t) == classify::r_index(built(2, word)));
  }

  // an all-zero table is not a representation
  std::vector<std::vector<TensorOperator>> zero(2, std::vector<TensorOperator>(2));
  const rep::SymbolicRep bad(1, weyl::NormalForm(1), 0, zero);
  CHECK_THROWS_AS(classify::r_index(bad), std::invalid_argument);
}

TEST_CASE("equivalence: lambda mismatch witnesses") {
  const weyl::NormalForm w = weyl::parse_word(2, "s[1,2]");

  SUBCASE("mismatch away from the b-values: generator witness") {
    const LambdaSpec la = std::vector<Complex>{Complex(0.6, 0.8), Complex(1.0, 0.0)};
    const LambdaSpec lb = std::vector<Complex>{Complex(0.6, -0.8), Complex(1.0, 0.0)};
    const auto v = classify::equivalent(2, la, w, lb, w);
    CHECK_FALSE(v.equivalent);
    CHECK(v.case_tag == "lambda");
    CHECK(v.kind == "spectral");
    REQUIRE(v.witness.has_value());
    CHECK(rep::zword_str(*v.witness) == "z[2,3]");
    CHECK(v.hausdorff == doctest::Approx(1.0));
    CHECK(v.verified);
    // spectra are {0, conj(lambda_1) lambda_2}
    CHECK(dist_to(v.spectrum_a, Complex(0.0)) < 1e-12);
    CHECK(dist_to(v.spectrum_a, Complex(0.6, -0.8)) < 1e-12);
    CHECK(dist_to(v.spectrum_b, Complex(0.6, 0.8)) < 1e-12);
  }

  SUBCASE("mismatch at a b-value, empty chain tail") {
    const LambdaSpec la = std::vector<Complex>{Complex(1.0, 0.0), Complex(0.6, 0.8)};
    const LambdaSpec lb = std::vector<Complex>{Complex(1.0, 0.0), Complex(-1.0, 0.0)};
    const auto v = classify::equivalent(2, la, w, lb, w);
    CHECK_FALSE(v.equivalent);
    CHECK(v.case_tag == "lambda");
    REQUIRE(v.witness.has_value());
    CHECK(rep::zword_str(*v.witness) == "z[3,1]");
    CHECK(v.hausdorff == doctest::Approx(1.0));
    CHECK(v.verified);
    CHECK(dist_to(v.spectrum_a, Complex(0.6, -0.8)) < 1e-12);
    CHECK(dist_to(v.spectrum_b, Complex(-1.0, 0.0)) < 1e-12);
  }

  SUBCASE("mismatch at a b-value with a finite chain tail") {
    const weyl::NormalForm w3 = weyl::parse_word(3, "s[2,2] s[1,3]");
    const Complex c(0.8, 0.6);
    const LambdaSpec la = std::vector<Complex>{Complex(1.0, 0.0), Complex(0.0, 1.0), c};
    const LambdaSpec lb = std::vector<Complex>{Complex(1.0, 0.0), Complex(0.0, -1.0), c};
    const auto v = classify::equivalent(3, la, w3, lb, w3);
    CHECK_FALSE(v.equivalent);
    CHECK(v.case_tag == "lambda");
    CHECK(v.verified);
    CHECK(v.hausdorff == doctest::Approx(1.0));
    // nonzero spectral points differ exactly by the sign of lambda_2
    Complex pa(0.0), pb(0.0);
    for (Complex z : v.spectrum_a)
      if (std::abs(z) > 0.5) pa = z;
    for (Complex z : v.spectrum_b)
      if (std::abs(z) > 0.5) pb = z;
    CHECK(std::abs(pa) == doctest::Approx(1.0));
    CHECK(std::abs(pa + pb) < 1e-12);
    CHECK(dist_to(v.spectrum_a, Complex(0.0)) < 1e-12);
  }
}

TEST_CASE("equivalence: word cases") {
  SUBCASE("Case I: different b at the first differing section") {
    const auto v = classify::equivalent(2, kFormal, weyl::parse_word(2, "s[2,2]"),
                                        kFormal, weyl::parse_word(2, "s[1,1]"));
    CHECK_FALSE(v.equivalent);
    CHECK(v.case_tag == "I");
    CHECK(v.kind == "zero-nonzero");
    REQUIRE(v.witness.has_value());
    CHECK(rep::zword_str(*v.witness) == "z[2,3]");
    CHECK(v.nonzero_norm >= 0.5);
    CHECK(v.verified);

    const auto vr = classify::equivalent(2, kFormal, weyl::parse_word(2, "s[1,1]"),
                                         kFormal, weyl::parse_word(2, "s[2,2]"));
    CHECK(vr.case_tag == "I");
    CHECK(rep::zword_str(*vr.witness) == "z[2,3]");
    CHECK(vr.verified);
  }

  SUBCASE("Case II: same b, different a; projection vs shifted word") {
    const auto v = classify::equivalent(2, kFormal, weyl::parse_word(2, "s[2,2]"),
                                        kFormal, weyl::parse_word(2, "s[1,2]"));
    CHECK_FALSE(v.equivalent);
    CHECK(v.case_tag == "II");
    CHECK(v.kind == "spectral");
    REQUIRE(v.witness.has_value());
    CHECK(rep::zword_str(*v.witness) == "z[3,2]");
    CHECK(v.hausdorff == doctest::Approx(1.0));
    CHECK(v.verified);
    CHECK(dist_to(v.spectrum_a, Complex(1.0, 0.0)) < 1e-12);  // projection side
    CHECK(v.spectrum_b.size() == 1);                          // nilpotent side {0}
    CHECK(dist_to(v.spectrum_b, Complex(0.0)) < 1e-12);
  }

  SUBCASE("Cases III and IV: proper prefix") {
    const auto v = classify::equivalent(2, kFormal, weyl::parse_word(2, "s[1,1] s[2,2]"),
                                        kFormal, weyl::parse_word(2, "s[2,2]"));
    CHECK_FALSE(v.equivalent);
    CHECK(v.case_tag == "III");
    CHECK(v.kind == "zero-nonzero");
    REQUIRE(v.witness.has_value());
    CHECK(rep::zword_str(*v.witness) == "z[1,3]");
    CHECK(v.verified);

    const auto vr = classify::equivalent(2, kFormal, weyl::parse_word(2, "s[2,2]"),
                                         kFormal, weyl::parse_word(2, "s[1,1] s[2,2]"));
    CHECK(vr.case_tag == "IV");
    CHECK(rep::zword_str(*vr.witness) == "z[1,3]");
    CHECK(vr.verified);
  }
}

TEST_CASE("equivalence: full sweep at rank 2 and validation") {
  const auto words = weyl::all_normal_forms(2);
  REQUIRE(words.size() == 6);

  // formal-parameter pairs: equivalent iff the words coincide, and every
  // inequivalent verdict must come with a verified witness
  for (const auto& wa : words)
    for (const auto& wb : words) {
      const auto v = classify::equivalent(2, kFormal, wa, kFormal, wb);
      CAPTURE(wa.str());
      CAPTURE(wb.str());
      CHECK(v.equivalent == (wa == wb));
      CHECK(v.verified);
      const auto vr = classify::equivalent(2, kFormal, wb, kFormal, wa);
      if (v.case_tag == "III")
        CHECK(vr.case_tag == "IV");
      else if (v.case_tag == "IV")
        CHECK(vr.case_tag == "III");
      else
        CHECK(vr.case_tag == v.case_tag);
    }

  // numeric lambda mismatch at every index, for every word
  for (const auto& w : words)
    for (int j = 1; j <= 2; ++j) {
      std::vector<Complex> la = kUnitPair, lb = kUnitPair;
      lb[static_cast<std::size_t>(j) - 1] = std::conj(lb[static_cast<std::size_t>(j) - 1]);
      const auto v = classify::equivalent(2, LambdaSpec(la), w, LambdaSpec(lb), w);
      CAPTURE(w.str());
      CAPTURE(j);
      CHECK_FALSE(v.equivalent);
      CHECK(v.case_tag == "lambda");
      CHECK(v.verified);
    }

  // rank-3 lambda sweep on a two-section word
  const weyl::NormalForm w3 = weyl::parse_word(3, "s[2,2] s[1,3]");
  for (int j = 1; j <= 3; ++j) {
    std::vector<Complex> la{Complex(0.6, 0.8), Complex(0.0, 1.0), Complex(5.0 / 13.0, 12.0 / 13.0)};
    std::vector<Complex> lb = la;
    lb[static_cast<std::size_t>(j) - 1] = std::conj(lb[static_cast<std::size_t>(j) - 1]);
    const auto v = classify::equivalent(3, LambdaSpec(la), w3, LambdaSpec(lb), w3);
    CAPTURE(j);
    CHECK_FALSE(v.equivalent);
    CHECK(v.case_tag == "lambda");
    CHECK(v.verified);
  }

  // equal numeric pairs
  const auto same = classify::equivalent(2, LambdaSpec(kUnitPair), words[3],
                                         LambdaSpec(kUnitPair), words[3]);
  CHECK(same.equivalent);
  CHECK(same.case_tag == "equal");
  CHECK(same.verified);

  // input validation
  const weyl::NormalForm w2 = weyl::parse_word(2, "s[1,2]");
  CHECK_THROWS_AS(classify::equivalent(3, kFormal, w2, kFormal, w2), std::invalid_argument);
  CHECK_THROWS_AS(classify::equivalent(2, kFormal, w2, LambdaSpec(kUnitPair), w2),
                  std::invalid_argument);
  CHECK_THROWS_AS(classify::equivalent(2, LambdaSpec(std::vector<Complex>{Complex(1.0, 0.0)}),
                                       w2, LambdaSpec(kUnitPair), w2),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      classify::equivalent(2, LambdaSpec(std::vector<Complex>{Complex(2.0, 0.0), Complex(1.0, 0.0)}),
                           w2, LambdaSpec(kUnitPair), w2),
      std::invalid_argument);
  CHECK_THROWS_AS(classify::equivalent(2, kFormal, w2, kFormal, w2, 2), std::invalid_argument);
}

TEST_CASE("symbolic peel and reconstruction") {
  const rep::SymbolicRep full = built(2, "s[1,1] s[1,2]");

  const auto p1 = classify::peel_symbolic(full);
  CHECK(p1.letter == 1);
  CHECK(p1.pi1 == built(2, "s[1,1] s[2,2]"));
  CHECK(classify::r_index(p1.pi1) == 2);  // r increments after a peel

  const auto p2 = classify::peel_symbolic(p1.pi1);
  CHECK(p2.letter == 2);
  CHECK(p2.pi1 == built(2, "s[1,1]"));

  const auto p3 = classify::peel_symbolic(p2.pi1);
  CHECK(p3.letter == 1);
  CHECK(p3.pi1 == built(2, "e"));
  CHECK(p3.pi1.factors() == 0);

  CHECK_THROWS_AS(classify::peel_symbolic(p3.pi1), std::invalid_argument);

  // a corrupted table is rejected by the reconstruction check
  rep::SymbolicRep broken = built(2, "s[1,2]");
  broken.set_image(1, 1, TensorOperator::identity(broken.factors()));
  CHECK_THROWS_AS(classify::peel_symbolic(broken), std::runtime_error);
}

TEST_CASE("numeric factorization step") {
  const auto t = numeric::truncate_rep(built(2, "s[1,1] s[1,2]"), 12, kUnitPair, 6);
  const auto st = classify::factor_numeric(t, 1e-8);

  CHECK(st.r == 1);
  CHECK(st.structured);
  CHECK(std::abs(std::abs(st.mu) - 1.0) < 1e-10);
  CHECK(st.scalar_defect < 1e-10);
  CHECK(st.isometry_defect < 1e-10);
  CHECK(st.pure_defect < 1e-12);
  CHECK(st.decomp_residual < 1e-9);
  CHECK(st.pattern_defect < 1e-9);

  // the wandering-fiber compression is the truncation of the peeled word
  const auto ref = numeric::truncate_rep(built(2, "s[1,1] s[2,2]"), 12, kUnitPair, 6);
  CHECK(st.pi1.factors == 2);
  CHECK(st.pi1.n == 2);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      CHECK(SpMat(st.pi1.image(i, j) - ref.image(i, j)).norm() < 1e-10);
    }

  // no factorization step applies to a character or at r = n+1
  const auto tc = numeric::truncate_rep(built(2, "e"), 12, kUnitPair, 6);
  CHECK_THROWS_AS(classify::factor_numeric(tc, 1e-8), std::invalid_argument);
  const auto ts = numeric::truncate_rep(built(2, "s[1,1]"), 12, kUnitPair, 6);
  CHECK_THROWS_AS(classify::factor_numeric(ts, 1e-8), std::invalid_argument);
}

TEST_CASE("numeric factorization rejects a unitary Wold part") {
  // a table whose shift candidate is a cyclic permutation: the corner
  // conjugation sum telescopes to the identity (7 equal contributions of
  // I/7) and the isometry test passes, but W^N has norm 1, so the
  // pure-shift check must throw
  numeric::TruncatedRep t;
  t.n = 1;
  t.N = 6;
  t.factors = 1;
  t.window = 3;
  t.lambda = {Complex(1.0, 0.0)};
  SpMat id7(6, 6);
  id7.setIdentity();
  id7 = SpMat(Complex(1.0 / 7.0, 0.0) * id7);
  SpMat cyc(6, 6);
  {
    std::vector<Eigen::Triplet<Complex>> trip;
    for (int v = 0; v < 6; ++v) trip.emplace_back((v + 1) % 6, v, Complex(1.0, 0.0));
    cyc.setFromTriplets(trip.begin(), trip.end());
  }
  t.images = {{SpMat(6, 6), SpMat(6, 6)}, {id7, cyc}};
  bool threw = false;
  try {
    classify::factor_numeric(t, 1e-8);
  } catch (const std::runtime_error& err) {
    threw = true;
    CHECK(std::string(err.what()).find("unitary Wold part") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("symbolic identification round-trips") {
  for (const auto& w : weyl::all_normal_forms(2)) {
    const auto res = classify::identify(rep::build(2, w));
    CAPTURE(w.str());
    CHECK(res.symbolic);
    CHECK(res.word == w);
    REQUIRE(res.lambda_formal.size() == 2);
    for (int i = 1; i <= 2; ++i)
      CHECK(res.lambda_formal[static_cast<std::size_t>(i) - 1] ==
            LaurentScalar::monomial(opalg::lambda_var(i)));
  }

  for (const std::string word :
       {"s[1,3]", "s[2,2] s[1,3]", "s[1,1] s[2,2] s[3,3]", "s[2,3]", "s[1,1] s[1,2] s[1,3]"}) {
    const weyl::NormalForm w = weyl::parse_word(3, word);
    const auto res = classify::identify(rep::build(3, w));
    CAPTURE(word);
    CHECK(res.word == w);
    for (int i = 1; i <= 3; ++i)
      CHECK(res.lambda_formal[static_cast<std::size_t>(i) - 1] ==
            LaurentScalar::monomial(opalg::lambda_var(i)));
  }

  // corrupted input fails loudly
  rep::SymbolicRep broken = built(2, "s[1,2]");
  broken.set_image(2, 2, opalg::tensor_scale(LaurentScalar(2), broken.image(2, 2)));
  CHECK_THROWS_AS(classify::identify(broken), std::runtime_error);
}

TEST_CASE("numeric identification round-trips") {
  for (const std::string word : {"e", "s[1,1]", "s[1,2]", "s[1,1] s[1,2]"}) {
    const weyl::NormalForm w = weyl::parse_word(2, word);
    const auto t = numeric::truncate_rep(rep::build(2, w), 12, kUnitPair, 6);
    const auto res = classify::identify(t, 1e-8);
    CAPTURE(word);
    CHECK_FALSE(res.symbolic);
    CHECK(res.word == w);
    CHECK(res.max_residual < 1e-8);
    REQUIRE(res.lambda.size() == 2);
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(res.lambda[static_cast<std::size_t>(i)] -
                     kUnitPair[static_cast<std::size_t>(i)]) < 1e-6);
  }

  // degenerate parameters
  const std::vector<Complex> ones{Complex(1.0, 0.0), Complex(1.0, 0.0)};
  const auto t1 = numeric::truncate_rep(built(2, "s[1,1] s[1,2]"), 12, ones, 6);
  const auto res1 = classify::identify(t1, 1e-8);
  CHECK(res1.word == weyl::parse_word(2, "s[1,1] s[1,2]"));
  for (Complex v : res1.lambda) CHECK(std::abs(v - Complex(1.0, 0.0)) < 1e-6);

  // corrupted truncation fails loudly
  auto bad = numeric::truncate_rep(built(2, "s[1,2]"), 12, kUnitPair, 6);
  bad.image(2, 2) = SpMat(Complex(2.0, 0.0) * bad.image(2, 2));
  CHECK_THROWS_AS(classify::identify(bad, 1e-8), std::runtime_error);
}

TEST_CASE("numeric identification in a foreign basis uses the SVD fallback") {
  // conjugate every image by a window-preserving unitary: the structured
  // wandering-basis detection must fail and the SVD path take over, while
  // the recovered word and parameters stay exact (they are basis-invariant)
  const weyl::NormalForm w = weyl::parse_word(2, "s[1,1]");
  const auto t0 = numeric::truncate_rep(rep::build(2, w), 6,
                                        {Complex(0.6, 0.8), Complex(5.0 / 13.0, 12.0 / 13.0)}, 3);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(6, 6);
  {
    Eigen::Vector3cd v;
    v << Complex(1.0, 0.0), Complex(1.0, 1.0), Complex(0.0, -1.0);
    u.topLeftCorner(3, 3) -= 2.0 / v.squaredNorm() * (v * v.adjoint());
  }
  numeric::TruncatedRep t = t0;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      const Eigen::MatrixXcd conj = u.adjoint() * t0.image(i, j) * u;
      std::vector<Eigen::Triplet<Complex>> trip;
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
          if (std::abs(conj(r, c)) > 1e-14) trip.emplace_back(r, c, conj(r, c));
      SpMat s(6, 6);
      s.setFromTriplets(trip.begin(), trip.end());
      t.image(i, j) = std::move(s);
    }

  const auto res = classify::identify(t, 1e-8);
  CHECK(res.word == w);
  CHECK(std::abs(res.lambda[0] - Complex(0.6, 0.8)) < 1e-8);
  CHECK(std::abs(res.lambda[1] - Complex(5.0 / 13.0, 12.0 / 13.0)) < 1e-8);
  bool saw_svd = false;
  for (const std::string& s : res.steps)
    if (s.find("SVD basis") != std::string::npos) saw_svd = true;
  CHECK(saw_svd);
}

TEST_CASE("json serialization of verdicts and identifications") {
  const auto v = classify::equivalent(2, kFormal, weyl::parse_word(2, "s[2,2]"),
                                      kFormal, weyl::parse_word(2, "s[1,1]"));
  const auto jv = nlohmann::json::parse(classify::verdict_to_json(v));
  CHECK(jv["equivalent"] == false);
  CHECK(jv["case"] == "I");
  CHECK(jv["witness"] == "z[2,3]");
  CHECK(jv["kind"] == "zero-nonzero");
  CHECK(jv["verified"] == true);

  const auto eq = classify::equivalent(2, kFormal, weyl::parse_word(2, "s[2,2]"),
                                       kFormal, weyl::parse_word(2, "s[2,2]"));
  const auto jeq = nlohmann::json::parse(classify::verdict_to_json(eq));
  CHECK(jeq["equivalent"] == true);
  CHECK(jeq["witness"].is_null());

  const auto res = classify::identify(built(2, "s[1,1] s[1,2]"));
  const auto jr = nlohmann::json::parse(classify::identification_to_json(res));
  CHECK(jr["mode"] == "symbolic");
  CHECK(jr["word"] == "s[1,1] s[1,2]");
  CHECK(jr["lambda"].size() == 2);

  const auto tn = numeric::truncate_rep(built(2, "s[1,2]"), 12, kUnitPair, 6);
  const auto resn = classify::identify(tn, 1e-8);
  const auto jn = nlohmann::json::parse(classify::identification_to_json(resn));
  CHECK(jn["mode"] == "numeric");
  CHECK(jn["word"] == "s[1,2]");
  CHECK(jn["lambda"][0].size() == 2);
  CHECK(jn["max_residual"].get<double>() < 1e-8);
}
