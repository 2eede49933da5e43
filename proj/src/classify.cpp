#include "su0/classify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace su0::classify {

using numeric::DMat;
using numeric::SpMat;
using opalg::LaurentScalar;
using opalg::TensorOperator;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }
[[noreturn]] void defect(const std::string& msg) { throw std::runtime_error(msg); }

std::size_t idx(int one_based) { return static_cast<std::size_t>(one_based) - 1; }

}  // namespace

// ---------------------------------------------------------------------------
// r-index
// ---------------------------------------------------------------------------

int r_index(const rep::SymbolicRep& rep) {
  const int n = rep.rank();
  for (int j = 1; j <= n + 1; ++j)
    if (!rep.image(n + 1, j).is_zero()) return j;
  fail("r-index: the bottom row vanishes; not a representation of the algebra");
}

int r_index(const numeric::TruncatedRep& trep, double tol) {
  const int r = numeric::bottom_row_first_nonzero(trep, tol);
  if (r == 0) fail("r-index: the bottom row vanishes below tolerance");
  return r;
}

// ---------------------------------------------------------------------------
// Equivalence
// ---------------------------------------------------------------------------

namespace {

double hausdorff_dist(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  const auto directed = [](const std::vector<Complex>& x, const std::vector<Complex>& y) {
    double worst = 0.0;
    for (const Complex p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const Complex q : y) best = std::min(best, std::abs(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

// Exact spectral points of a witness image evaluated at lambda.  Covers the
// two shapes the classification witnesses take: a projection times a single
// unimodular monomial ({phase} for the identity, {0, phase} otherwise), and
// a sum of elementary tensors sharing one leg that shifts strictly in a
// common direction.  The net shift b-a of a word is additive under word
// multiplication, so every term of the k-th power of such a sum shifts by at
// least k at that leg and the operator is nilpotent on any truncation ({0}).
// ok = false means neither applies.
struct SpectrumResult {
  std::vector<Complex> points;
  bool ok = false;
};

SpectrumResult witness_spectrum(const TensorOperator& img,
                                const std::vector<Complex>& lam, int factors) {
  if (img.is_zero()) return {{Complex(0.0)}, true};
  const rep::PhaseSplit split = rep::split_global_phase(img);
  if (split.single_phase && opalg::is_projection(split.structure)) {
    std::vector<Complex> pts;
    if (!(split.structure == TensorOperator::identity(factors)))
      pts.push_back(Complex(0.0));
    pts.push_back(split.phase.eval(lam));
    return {pts, true};
  }
  for (int leg = 0; leg < factors; ++leg) {
    bool all_down = true, all_up = true;
    for (const auto& term : img.terms()) {
      const opalg::Word w = term.first[static_cast<std::size_t>(leg)];
      all_down = all_down && w.b > w.a;
      all_up = all_up && w.a > w.b;
    }
    if (all_down || all_up) return {{Complex(0.0)}, true};
  }
  return {};
}

// Numeric fallback: spectrum of the window compression on a small truncation
// whose dense block stays below 512 x 512.
std::vector<Complex> window_spectrum_points(const TensorOperator& img,
                                            const std::vector<Complex>& lam,
                                            int factors) {
  int window = 2;
  while (factors >= 1 && std::pow(static_cast<double>(window + 1), factors) <= 512.0)
    ++window;
  const int N = 2 * window;
  const SpMat m = numeric::materialize(img, lam, N);
  return numeric::spectrum(numeric::window_block(m, N, factors, window));
}

std::vector<Complex> lambda_or_ones(const LambdaSpec& l, int n) {
  return l ? *l : std::vector<Complex>(static_cast<std::size_t>(n), Complex(1.0));
}

// Fills a zero-nonzero verdict: the witness image must be exactly zero under
// wzero and exactly nonzero under wnon, confirmed by a materialized window
// norm >= 0.5 (window 2 on a truncation of leg dimension N).
void finish_zero_nonzero(EquivalenceVerdict& out, const std::string& tag,
                         const rep::ZWord& wit, int n,
                         const weyl::NormalForm& wnon, const weyl::NormalForm& wzero,
                         const std::vector<Complex>& lam_non, bool first_is_nonzero,
                         int N) {
  out.case_tag = tag;
  out.kind = "zero-nonzero";
  out.witness = wit;
  const rep::SymbolicRep rn = rep::build(n, wnon);
  const rep::SymbolicRep rz = rep::build(n, wzero);
  const TensorOperator inon = rep::evaluate(rn, wit);
  const TensorOperator izer = rep::evaluate(rz, wit);
  const bool zero_ok = izer.is_zero();
  const bool non_ok = !inon.is_zero();
  out.nonzero_norm =
      non_ok ? numeric::window_norm(numeric::materialize(inon, lam_non, N), N,
                                    rn.factors(), 2)
             : 0.0;
  out.verified = zero_ok && non_ok && out.nonzero_norm >= 0.5;
  std::ostringstream d;
  d << "witness " << rep::zword_str(wit) << " vanishes in the "
    << (first_is_nonzero ? "second" : "first")
    << " representation and has window norm " << out.nonzero_norm << " in the "
    << (first_is_nonzero ? "first" : "second");
  out.detail = d.str();
}

}  // namespace

EquivalenceVerdict equivalent(int n, const LambdaSpec& lambda_a,
                              const weyl::NormalForm& word_a,
                              const LambdaSpec& lambda_b,
                              const weyl::NormalForm& word_b, int N) {
  if (word_a.rank() != n || word_b.rank() != n)
    fail("equivalence: word rank mismatch");
  if (N < 4) fail("equivalence: N must be at least 4");
  if (lambda_a.has_value() != lambda_b.has_value())
    fail("equivalence: formal and numeric parameter tuples cannot be compared");
  for (const LambdaSpec* l : {&lambda_a, &lambda_b}) {
    if (!l->has_value()) continue;
    if (static_cast<int>((*l)->size()) != n)
      fail("equivalence: lambda must have exactly n entries");
    for (const Complex v : **l)
      if (std::abs(std::abs(v) - 1.0) > 1e-12)
        fail("equivalence: lambda entries must be unimodular");
  }

  EquivalenceVerdict out;
  const bool words_equal = (word_a == word_b);
  int jmax = 0;  // largest parameter index where the tuples differ
  if (lambda_a)
    for (int i = 1; i <= n; ++i)
      if (std::abs((*lambda_a)[idx(i)] - (*lambda_b)[idx(i)]) > 1e-12) jmax = i;

  if (words_equal && jmax == 0) {
    out.equivalent = true;
    out.case_tag = "equal";
    out.verified = true;
    out.detail = lambda_a ? "same word, parameters equal entrywise within 1e-12"
                          : "same word, same formal parameter tuple";
    return out;
  }

  if (words_equal) {
    // Parameter mismatch at index j: if j is the b of some section, the
    // witness is the E operator of that section at its left column;
    // otherwise it is the generator z_{j+1, m_1(j+1)}.  Either image is a
    // projection (or the identity) times a monomial, so the spectra are
    // exact and differ precisely at the monomial value.
    const int j = jmax;
    const auto& seg = word_a.segments();
    int sec = 0;
    for (int i = 1; i <= static_cast<int>(seg.size()); ++i)
      if (seg[idx(i)].b == j) {
        sec = i;
        break;
      }
    const rep::ZWord wit =
        sec == 0 ? rep::ZWord{{j + 1, weyl::m_invariant(word_a, j + 1), false}}
                 : rep::e_zword(word_a, sec, seg[idx(sec)].a);
    const rep::SymbolicRep r = rep::build(n, word_a);
    const TensorOperator img = rep::evaluate(r, wit);
    const SpectrumResult sa = witness_spectrum(img, *lambda_a, r.factors());
    const SpectrumResult sb = witness_spectrum(img, *lambda_b, r.factors());
    out.case_tag = "lambda";
    out.kind = "spectral";
    out.witness = wit;
    out.spectrum_a =
        sa.ok ? sa.points : window_spectrum_points(img, *lambda_a, r.factors());
    out.spectrum_b =
        sb.ok ? sb.points : window_spectrum_points(img, *lambda_b, r.factors());
    out.hausdorff = hausdorff_dist(out.spectrum_a, out.spectrum_b);
    out.verified = out.hausdorff >= 1e-6;
    std::ostringstream d;
    d << "parameters differ at index " << j << "; witness "
      << rep::zword_str(wit) << "; spectra separated by " << out.hausdorff;
    out.detail = d.str();
    return out;
  }

  // Words differ: find the first differing section.
  const auto& sa = word_a.segments();
  const auto& sb = word_b.segments();
  const int k = static_cast<int>(sa.size());
  const int kp = static_cast<int>(sb.size());
  int j = 0;
  for (int i = 1; i <= std::min(k, kp); ++i)
    if (!(sa[idx(i)] == sb[idx(i)])) {
      j = i;
      break;
    }

  if (j > 0 && sa[idx(j)].b != sb[idx(j)].b) {
    // Case I: the section with the larger b reaches a column the other word
    // cannot: z_{b_j, m_1(b_j)} is nonzero there and zero in the other.
    const bool first_big = sa[idx(j)].b > sb[idx(j)].b;
    const weyl::NormalForm& wbig = first_big ? word_a : word_b;
    const weyl::NormalForm& wsml = first_big ? word_b : word_a;
    const int bj = wbig.segments()[idx(j)].b;
    const rep::ZWord wit{{bj, weyl::m_invariant(wbig, bj), false}};
    finish_zero_nonzero(out, "I", wit, n, wbig, wsml,
                        lambda_or_ones(first_big ? lambda_a : lambda_b, n),
                        first_big, N);
    return out;
  }

  if (j > 0) {
    // Case II: same b, different a.  The E operator of the larger-a section
    // is a projection modulo a unimodular monomial in its own
    // representation, but a shifted tensor word (spectrum {0} on any
    // truncation) in the other.
    const bool first_big = sa[idx(j)].a > sb[idx(j)].a;
    const weyl::NormalForm& wbig = first_big ? word_a : word_b;
    const weyl::NormalForm& wsml = first_big ? word_b : word_a;
    const std::vector<Complex> lam_big =
        lambda_or_ones(first_big ? lambda_a : lambda_b, n);
    const std::vector<Complex> lam_sml =
        lambda_or_ones(first_big ? lambda_b : lambda_a, n);
    const rep::ZWord wit = rep::e_zword(wbig, j, wbig.segments()[idx(j)].a);
    const rep::SymbolicRep rbig = rep::build(n, wbig);
    const rep::SymbolicRep rsml = rep::build(n, wsml);
    const TensorOperator ibig = rep::evaluate(rbig, wit);
    const TensorOperator isml = rep::evaluate(rsml, wit);
    out.case_tag = "II";
    out.witness = wit;
    if (isml.is_zero()) {
      finish_zero_nonzero(out, "II", wit, n, wbig, wsml, lam_big, first_big, N);
      return out;
    }
    out.kind = "spectral";
    const rep::PhaseSplit pb = rep::split_global_phase(ibig);
    const bool big_proj = pb.single_phase && opalg::is_projection(pb.structure);
    const SpectrumResult qb = witness_spectrum(ibig, lam_big, rbig.factors());
    const SpectrumResult qs = witness_spectrum(isml, lam_sml, rsml.factors());
    const std::vector<Complex> pts_big =
        qb.ok ? qb.points : window_spectrum_points(ibig, lam_big, rbig.factors());
    const std::vector<Complex> pts_sml =
        qs.ok ? qs.points : window_spectrum_points(isml, lam_sml, rsml.factors());
    out.spectrum_a = first_big ? pts_big : pts_sml;
    out.spectrum_b = first_big ? pts_sml : pts_big;
    out.hausdorff = hausdorff_dist(out.spectrum_a, out.spectrum_b);
    out.verified = big_proj && out.hausdorff >= 1e-6;
    std::ostringstream d;
    d << "witness " << rep::zword_str(wit) << " is a projection modulo phase in the "
      << (first_big ? "first" : "second")
      << " representation and a shifted tensor word in the "
      << (first_big ? "second" : "first") << "; spectra separated by "
      << out.hausdorff;
    out.detail = d.str();
    return out;
  }

  // Cases III / IV: one section list is a proper prefix of the other; the
  // extra section of the longer word reaches a row/column pair the shorter
  // word cannot.
  const bool first_long = k > kp;
  const weyl::NormalForm& wlong = first_long ? word_a : word_b;
  const weyl::NormalForm& wshort = first_long ? word_b : word_a;
  const int kk = first_long ? k : kp;
  const int bk = wlong.segments()[idx(kk)].b;
  const rep::ZWord wit{{bk, weyl::m_invariant(wlong, bk), false}};
  finish_zero_nonzero(out, first_long ? "III" : "IV", wit, n, wlong, wshort,
                      lambda_or_ones(first_long ? lambda_a : lambda_b, n),
                      first_long, N);
  return out;
}

std::string verdict_to_json(const EquivalenceVerdict& v) {
  nlohmann::json j;
  j["equivalent"] = v.equivalent;
  j["case"] = v.case_tag;
  if (v.witness)
    j["witness"] = rep::zword_str(*v.witness);
  else
    j["witness"] = nullptr;
  j["kind"] = v.kind;
  const auto pts = [](const std::vector<Complex>& s) {
    nlohmann::json a = nlohmann::json::array();
    for (const Complex z : s) a.push_back({z.real(), z.imag()});
    return a;
  };
  j["spectrum_a"] = pts(v.spectrum_a);
  j["spectrum_b"] = pts(v.spectrum_b);
  j["hausdorff"] = v.hausdorff;
  j["nonzero_norm"] = v.nonzero_norm;
  j["verified"] = v.verified;
  j["detail"] = v.detail;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Symbolic factorization
// ---------------------------------------------------------------------------

SymbolicPeel peel_symbolic(const rep::SymbolicRep& rep) {
  const int n = rep.rank();
  if (rep.factors() == 0 || rep.word().empty())
    fail("peel: no elementary factor to remove");
  const auto& seg = rep.word().segments();
  const int letter = seg.front().a;  // last letter of to_letters()
  std::vector<weyl::Segment> rest(seg.begin(), seg.end());
  if (rest.front().a == rest.front().b)
    rest.erase(rest.begin());
  else
    rest.front().a += 1;
  weyl::NormalForm w1(n, std::move(rest));

  const std::size_t sz = static_cast<std::size_t>(n) + 1;
  std::vector<std::vector<TensorOperator>> imgs(sz, std::vector<TensorOperator>(sz));
  for (int i = 1; i <= n + 1; ++i)
    for (int j = 1; j <= n + 1; ++j)
      imgs[idx(i)][idx(j)] = opalg::sigma_last(rep.image(i, j));
  rep::SymbolicRep pi1(n, std::move(w1), rep.factors() - 1, std::move(imgs));

  const rep::SymbolicRep back = rep::convolve(pi1, rep::elementary_rep(n, letter));
  for (int i = 1; i <= n + 1; ++i)
    for (int j = 1; j <= n + 1; ++j)
      if (!(back.image(i, j) == rep.image(i, j)))
        defect("peel: reconstruction failed at entry (" + std::to_string(i) + "," +
               std::to_string(j) + "); representation is not in standard form");
  return {letter, std::move(pi1)};
}

// ---------------------------------------------------------------------------
// Numeric factorization
// ---------------------------------------------------------------------------

FactorStep factor_numeric(const numeric::TruncatedRep& t, double tol) {
  if (t.factors < 1) fail("factor: the representation has no tensor legs");
  const int m = t.n;
  FactorStep st;
  st.r = r_index(t, tol);
  if (st.r > m)
    fail("factor: r = n+1 calls for a rank descent, not a factorization step");

  const SpMat wr = numeric::W_op(t, m + 1, st.r);
  const auto scal = numeric::scalar_part(wr, t.N, t.factors, t.window);
  st.mu = scal.first;
  st.scalar_defect = scal.second;
  if (st.scalar_defect > tol)
    defect("factor: W_{n+1,r} is not scalar on the window (defect " +
           std::to_string(st.scalar_defect) + ")");
  if (std::abs(std::abs(st.mu) - 1.0) > std::max(tol, 1e-6))
    defect("factor: the scalar of W_{n+1,r} is not unimodular");
  const Complex u = st.mu / std::abs(st.mu);

  const SpMat w = SpMat(std::conj(u) * numeric::W_op(t, m + 1, st.r + 1));
  const numeric::WoldResult wres =
      numeric::wold(w, t.N, t.factors, t.window, std::min(tol, 1e-8));
  st.structured = wres.structured;
  st.isometry_defect = wres.isometry_defect;
  if (st.isometry_defect > tol)
    defect("factor: W is not an isometry on the window (defect " +
           std::to_string(st.isometry_defect) + ")");

  // A pure shift is nilpotent on the truncation: W^N must vanish.
  SpMat wp = w;
  for (int p = 1; p < t.N; ++p) wp = SpMat(w * wp);
  st.pure_defect = numeric::window_norm(wp, t.N, t.factors, t.window);
  if (st.pure_defect > tol)
    defect("factor: unitary Wold part present; W is not a pure shift");

  const long long dim = t.dim();
  if (wres.d != static_cast<int>(dim / t.N))
    defect("factor: wandering multiplicity " + std::to_string(wres.d) +
           " does not match a tensor leg");

  // Dressed table Y1 and the model factor Y2.
  const int rows = m + 2;  // table is (m+1) x (m+1), 1-based loops below
  const SpMat wh = SpMat(w.adjoint());
  std::vector<std::vector<SpMat>> y1(static_cast<std::size_t>(rows),
                                     std::vector<SpMat>(static_cast<std::size_t>(rows)));
  for (int i = 1; i <= m + 1; ++i)
    for (int jj = 1; jj <= m + 1; ++jj) {
      if (jj == st.r)
        y1[idx(i)][idx(jj)] = SpMat(t.image(i, jj) * w);
      else if (jj == st.r + 1)
        y1[idx(i)][idx(jj)] = SpMat(wh * t.image(i, jj));
      else
        y1[idx(i)][idx(jj)] = t.image(i, jj);
    }

  SpMat id_full(dim, dim);
  id_full.setIdentity();
  const SpMat pdef = SpMat(id_full - SpMat(w * wh));
  const auto y2 = [&](int a, int b) -> SpMat {
    if (a == st.r && b == st.r) return wh;
    if (a == st.r + 1 && b == st.r + 1) return w;
    if ((a == st.r && b == st.r + 1) || (a == st.r + 1 && b == st.r)) return pdef;
    if (a == b) return id_full;
    return SpMat(dim, dim);
  };

  double worst = 0.0;
  for (int i = 1; i <= m + 1; ++i)
    for (int jj = 1; jj <= m + 1; ++jj) {
      SpMat acc(dim, dim);
      for (int kk = std::min(i, jj); kk <= std::max(i, jj); ++kk)
        acc = SpMat(acc + SpMat(y1[idx(i)][idx(kk)] * y2(kk, jj)));
      worst = std::max(worst, numeric::window_norm(SpMat(t.image(i, jj) - acc),
                                                   t.N, t.factors, t.window));
    }
  st.decomp_residual = worst;
  if (st.decomp_residual > tol)
    defect("factor: decomposition residual " + std::to_string(st.decomp_residual) +
           " exceeds tolerance");

  if (wres.structured) {
    SpMat idd(wres.d, wres.d);
    idd.setIdentity();
    const SpMat model = numeric::kron(idd, numeric::word_matrix({1, 0}, t.N));
    st.pattern_defect =
        numeric::window_norm(SpMat(w - model), t.N, t.factors, t.window);
  }

  // Compression to the wandering fiber.
  numeric::TruncatedRep pi1;
  pi1.n = t.n;
  pi1.N = t.N;
  pi1.factors = t.factors - 1;
  pi1.window = t.window;
  pi1.lambda = t.lambda;
  pi1.images.assign(static_cast<std::size_t>(m) + 1,
                    std::vector<SpMat>(static_cast<std::size_t>(m) + 1));
  for (int i = 1; i <= m + 1; ++i)
    for (int jj = 1; jj <= m + 1; ++jj) {
      const DMat comp = wres.K.adjoint() * (y1[idx(i)][idx(jj)] * wres.K);
      std::vector<Eigen::Triplet<Complex>> trip;
      for (int r = 0; r < comp.rows(); ++r)
        for (int c = 0; c < comp.cols(); ++c)
          if (std::abs(comp(r, c)) > 1e-13) trip.emplace_back(r, c, comp(r, c));
      SpMat s(wres.d, wres.d);
      s.setFromTriplets(trip.begin(), trip.end());
      pi1.images[idx(i)][idx(jj)] = std::move(s);
    }
  st.pi1 = std::move(pi1);
  return st;
}

// ---------------------------------------------------------------------------
// Identification
// ---------------------------------------------------------------------------

IdentificationResult identify(const rep::SymbolicRep& rep) {
  const int n = rep.rank();
  IdentificationResult out;
  out.n = n;
  out.symbolic = true;
  out.lambda_formal.assign(static_cast<std::size_t>(n), LaurentScalar(1));

  int m = n;
  int factors = rep.factors();
  const std::size_t sz = static_cast<std::size_t>(n) + 1;
  std::vector<std::vector<TensorOperator>> table(sz, std::vector<TensorOperator>(sz));
  for (int i = 1; i <= n + 1; ++i)
    for (int j = 1; j <= n + 1; ++j) table[idx(i)][idx(j)] = rep.image(i, j);

  std::vector<weyl::Segment> segs;
  int seg_start = 0, last_peeled = 0, expected = -1;

  while (m >= 1) {
    int r = 0;
    for (int j = 1; j <= m + 1 && r == 0; ++j)
      if (!table[idx(m + 1)][idx(j)].is_zero()) r = j;
    if (r == 0)
      defect("identify: bottom row vanishes at rank " + std::to_string(m));

    if (r <= m) {
      if (factors == 0)
        defect("identify: no tensor legs left but the bottom row still has a shift column");
      if (expected >= 0 && r != expected)
        defect("identify: letters at rank " + std::to_string(m) +
               " are not consecutive; word not in standard form");
      if (seg_start == 0) seg_start = r;
      last_peeled = r;
      expected = r + 1;

      const std::size_t msz = static_cast<std::size_t>(m) + 1;
      std::vector<std::vector<TensorOperator>> peeled(msz, std::vector<TensorOperator>(msz));
      for (int i = 1; i <= m + 1; ++i)
        for (int j = 1; j <= m + 1; ++j)
          peeled[idx(i)][idx(j)] = opalg::sigma_last(table[idx(i)][idx(j)]);
      const rep::SymbolicRep pi1(m, weyl::NormalForm(m), factors - 1, peeled);
      const rep::SymbolicRep back = rep::convolve(pi1, rep::elementary_rep(m, r));
      for (int i = 1; i <= m + 1; ++i)
        for (int j = 1; j <= m + 1; ++j)
          if (!(back.image(i, j) == table[idx(i)][idx(j)]))
            defect("identify: reconstruction failed after peeling letter " +
                   std::to_string(r) + " at rank " + std::to_string(m));
      for (int i = 1; i <= m + 1; ++i)
        for (int j = 1; j <= m + 1; ++j) table[idx(i)][idx(j)] = peeled[idx(i)][idx(j)];
      --factors;
      out.steps.push_back("rank " + std::to_string(m) + ": peeled letter " +
                          std::to_string(r) + " (exact reconstruction)");
    } else {
      if (seg_start > 0) {
        segs.push_back({seg_start, last_peeled});
        seg_start = 0;
      }
      expected = -1;

      const TensorOperator& corner = table[idx(m + 1)][idx(m + 1)];
      LaurentScalar mu0;
      bool ok = !corner.is_zero() && corner.terms().size() == 1;
      if (ok) {
        const auto& term = *corner.terms().begin();
        for (const opalg::Word& leg : term.first)
          if (leg.a != 0 || leg.b != 0) {
            ok = false;
            break;
          }
        if (ok) {
          mu0 = term.second;
          ok = mu0.is_monomial();
          if (ok) {
            const auto& coeff = mu0.terms().begin()->second;
            ok = (coeff == 1 || coeff == -1);
          }
        }
      }
      if (!ok)
        defect("identify: corner entry is not a unimodular scalar at rank " +
               std::to_string(m));
      for (int i = 1; i <= m; ++i)
        if (!table[idx(i)][idx(m + 1)].is_zero())
          defect("identify: last column does not vanish at rank " + std::to_string(m));

      out.lambda_formal[idx(m)] = mu0.conj();
      for (int j = 1; j <= m; ++j)
        table[idx(m)][idx(j)] = opalg::tensor_scale(mu0, table[idx(m)][idx(j)]);
      out.steps.push_back("rank " + std::to_string(m) + ": descent, lambda_" +
                          std::to_string(m) + " = " + out.lambda_formal[idx(m)].str());
      --m;
    }
  }

  if (!(table[0][0] == TensorOperator::identity(factors)))
    defect("identify: residual entry is not the identity");
  out.word = weyl::NormalForm(n, segs);
  return out;
}

IdentificationResult identify(const numeric::TruncatedRep& trep, double tol) {
  IdentificationResult out;
  out.n = trep.n;
  out.symbolic = false;
  out.lambda.assign(static_cast<std::size_t>(trep.n), Complex(1.0));

  numeric::TruncatedRep t = trep;
  std::vector<weyl::Segment> segs;
  int seg_start = 0, last_peeled = 0, expected = -1;
  double worst = 0.0;

  while (t.n >= 1) {
    const int m = t.n;
    const int r = r_index(t, tol);

    if (r <= m) {
      if (expected >= 0 && r != expected)
        defect("identify: letters at rank " + std::to_string(m) +
               " are not consecutive; word not in standard form");
      if (seg_start == 0) seg_start = r;
      last_peeled = r;
      expected = r + 1;

      FactorStep st = factor_numeric(t, tol);
      worst = std::max({worst, st.scalar_defect, st.isometry_defect,
                        st.pure_defect, st.decomp_residual});
      std::ostringstream s;
      s << "rank " << m << ": peeled letter " << st.r << " (scalar defect "
        << st.scalar_defect << ", decomposition residual " << st.decomp_residual
        << (st.structured ? ", structured basis)" : ", SVD basis)");
      out.steps.push_back(s.str());
      t = std::move(st.pi1);
    } else {
      if (seg_start > 0) {
        segs.push_back({seg_start, last_peeled});
        seg_start = 0;
      }
      expected = -1;

      auto scal = numeric::scalar_part(t.image(m + 1, m + 1), t.N, t.factors, t.window);
      Complex mu0 = scal.first;
      worst = std::max(worst, scal.second);
      if (scal.second > tol)
        defect("identify: corner entry is not scalar at rank " + std::to_string(m) +
               " (defect " + std::to_string(scal.second) + ")");
      if (std::abs(std::abs(mu0) - 1.0) > std::max(tol, 1e-6))
        defect("identify: corner scalar is not unimodular at rank " + std::to_string(m));
      mu0 /= std::abs(mu0);
      double colmax = 0.0;
      for (int i = 1; i <= m; ++i)
        colmax = std::max(colmax, numeric::window_norm(t.image(i, m + 1), t.N,
                                                       t.factors, t.window));
      worst = std::max(worst, colmax);
      if (colmax > tol)
        defect("identify: last column does not vanish at rank " + std::to_string(m));

      out.lambda[idx(m)] = std::conj(mu0);
      numeric::TruncatedRep next;
      next.n = m - 1;
      next.N = t.N;
      next.factors = t.factors;
      next.window = t.window;
      next.lambda = t.lambda;
      next.images.assign(static_cast<std::size_t>(m),
                         std::vector<SpMat>(static_cast<std::size_t>(m)));
      for (int i = 1; i <= m; ++i)
        for (int jj = 1; jj <= m; ++jj)
          next.images[idx(i)][idx(jj)] =
              (i == m) ? SpMat(mu0 * t.image(i, jj)) : t.image(i, jj);
      std::ostringstream s;
      s << "rank " << m << ": descent, lambda_" << m << " = " << out.lambda[idx(m)]
        << " (scalar defect " << scal.second << ")";
      out.steps.push_back(s.str());
      t = std::move(next);
    }
  }

  SpMat idm(t.dim(), t.dim());
  idm.setIdentity();
  const double idres =
      numeric::window_norm(SpMat(t.image(1, 1) - idm), t.N, t.factors, t.window);
  worst = std::max(worst, idres);
  if (idres > tol)
    defect("identify: residual entry is not the identity (defect " +
           std::to_string(idres) + ")");

  out.word = weyl::NormalForm(out.n, segs);
  out.max_residual = worst;
  return out;
}

std::string identification_to_json(const IdentificationResult& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["mode"] = r.symbolic ? "symbolic" : "numeric";
  j["word"] = r.word.str();
  nlohmann::json lam = nlohmann::json::array();
  if (r.symbolic)
    for (const auto& l : r.lambda_formal) lam.push_back(l.str());
  else
    for (const Complex z : r.lambda) lam.push_back({z.real(), z.imag()});
  j["lambda"] = lam;
  j["steps"] = r.steps;
  j["max_residual"] = r.max_residual;
  return j.dump(2);
}

}  // namespace su0::classify
