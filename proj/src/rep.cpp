#include "su0/rep.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace su0::rep {

using opalg::Monomial;
using opalg::Word;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

// ---------------------------------------------------------------------------
// z-words
// ---------------------------------------------------------------------------

std::string zword_str(const ZWord& w) {
  if (w.empty()) return "1";
  std::string out;
  for (const ZFactor& f : w) {
    if (!out.empty()) out += '*';
    out += "z[" + std::to_string(f.i) + "," + std::to_string(f.j) + "]";
    if (f.star) out += "^*";
  }
  return out;
}

ZWord parse_zword(std::string_view text) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto read_int = [&]() -> int {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) fail("expected integer in z-word: '" + std::string(text) + "'");
    return std::stoi(std::string(text.substr(start, pos - start)));
  };
  auto expect = [&](char c) {
    if (pos >= text.size() || text[pos] != c)
      fail(std::string("expected '") + c + "' in z-word: '" + std::string(text) + "'");
    ++pos;
  };

  skip_ws();
  if (pos < text.size() && text[pos] == '1') {
    ++pos;
    skip_ws();
    if (pos != text.size()) fail("trailing characters after '1'");
    return {};
  }
  ZWord out;
  while (true) {
    skip_ws();
    expect('z');
    expect('[');
    skip_ws();
    int i = read_int();
    skip_ws();
    expect(',');
    skip_ws();
    int j = read_int();
    skip_ws();
    expect(']');
    bool star = false;
    if (pos + 1 < text.size() && text[pos] == '^' && text[pos + 1] == '*') {
      star = true;
      pos += 2;
    }
    out.push_back({i, j, star});
    skip_ws();
    if (pos == text.size()) break;
    expect('*');
  }
  return out;
}

// ---------------------------------------------------------------------------
// representation carriers
// ---------------------------------------------------------------------------

LaurentScalar row_monomial(int n, int i) {
  if (i < 1 || i > n + 1) fail("row index out of range");
  Monomial m;
  if (i >= 2 && i - 1 <= n) m = opalg::mono_mul(m, opalg::lambda_var(i - 1, -1));
  if (i <= n) m = opalg::mono_mul(m, opalg::lambda_var(i));
  return LaurentScalar::monomial(std::move(m));
}

SymbolicRep::SymbolicRep(int n, weyl::NormalForm word, int factors,
                         std::vector<std::vector<TensorOperator>> images)
    : n_(n), word_(std::move(word)), factors_(factors), images_(std::move(images)) {
  const std::size_t N = static_cast<std::size_t>(n) + 1;
  if (images_.size() != N) fail("image table must be (n+1) x (n+1)");
  for (const auto& row : images_) {
    if (row.size() != N) fail("image table must be (n+1) x (n+1)");
    for (const auto& op : row)
      if (op.factors() != factors_) fail("image factor count mismatch");
  }
}

const TensorOperator& SymbolicRep::image(int i, int j) const {
  if (i < 1 || i > n_ + 1 || j < 1 || j > n_ + 1) fail("generator index out of range");
  return images_[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(j) - 1];
}

void SymbolicRep::set_image(int i, int j, TensorOperator op) {
  if (i < 1 || i > n_ + 1 || j < 1 || j > n_ + 1) fail("generator index out of range");
  if (op.factors() != factors_) fail("image factor count mismatch");
  images_[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(j) - 1] = std::move(op);
}

SymbolicRep elementary_rep(int n, int r) {
  if (r < 1 || r > n) fail("elementary representation needs 1 <= r <= n");
  const std::size_t N = static_cast<std::size_t>(n) + 1;
  std::vector<std::vector<TensorOperator>> images(
      N, std::vector<TensorOperator>(N, TensorOperator(1)));
  for (std::size_t i = 0; i < N; ++i) images[i][i] = TensorOperator::identity(1);
  images[static_cast<std::size_t>(r) - 1][static_cast<std::size_t>(r) - 1] = opalg::op_S();
  images[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)] = opalg::op_Sstar();
  images[static_cast<std::size_t>(r) - 1][static_cast<std::size_t>(r)] = opalg::op_P0();
  images[static_cast<std::size_t>(r)][static_cast<std::size_t>(r) - 1] = opalg::op_P0();
  return SymbolicRep(n, weyl::NormalForm(n), 1, std::move(images));
}

SymbolicRep character_rep(int n) {
  const std::size_t N = static_cast<std::size_t>(n) + 1;
  std::vector<std::vector<TensorOperator>> images(
      N, std::vector<TensorOperator>(N, TensorOperator(0)));
  for (int i = 1; i <= n + 1; ++i)
    images[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(i) - 1] =
        TensorOperator::monomial({}, row_monomial(n, i));
  return SymbolicRep(n, weyl::NormalForm(n), 0, std::move(images));
}

SymbolicRep convolve(const SymbolicRep& x, const SymbolicRep& y, bool full_sum) {
  if (x.rank() != y.rank()) fail("convolution rank mismatch");
  const int n = x.rank();
  const std::size_t N = static_cast<std::size_t>(n) + 1;
  const int factors = x.factors() + y.factors();
  std::vector<std::vector<TensorOperator>> images(
      N, std::vector<TensorOperator>(N, TensorOperator(factors)));
  for (int i = 1; i <= n + 1; ++i)
    for (int j = 1; j <= n + 1; ++j) {
      const int lo = full_sum ? 1 : std::min(i, j);
      const int hi = full_sum ? n + 1 : std::max(i, j);
      TensorOperator acc(factors);
      for (int m = lo; m <= hi; ++m)
        acc = tensor_add(acc, tensor_concat(x.image(i, m), y.image(m, j)));
      images[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(j) - 1] =
          std::move(acc);
    }
  // The word metadata of a bare convolution is not tracked; build() attaches it.
  return SymbolicRep(n, weyl::NormalForm(n), factors, std::move(images));
}

SymbolicRep build(int n, const weyl::NormalForm& word) {
  if (word.rank() != n) fail("word rank mismatch");
  SymbolicRep rep = character_rep(n);
  for (int letter : word.to_letters()) rep = convolve(rep, elementary_rep(n, letter));
  const std::size_t N = static_cast<std::size_t>(n) + 1;
  std::vector<std::vector<TensorOperator>> images(N, std::vector<TensorOperator>(N));
  for (int i = 1; i <= n + 1; ++i)
    for (int j = 1; j <= n + 1; ++j)
      images[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(j) - 1] =
          rep.image(i, j);
  return SymbolicRep(n, word, rep.factors(), std::move(images));
}

TensorOperator evaluate(const SymbolicRep& rep, const ZWord& w) {
  TensorOperator acc = TensorOperator::identity(rep.factors());
  for (const ZFactor& f : w) {
    const TensorOperator& im = rep.image(f.i, f.j);
    acc = tensor_mul(acc, f.star ? tensor_adjoint(im) : im);
  }
  return acc;
}

std::string rep_to_json(const SymbolicRep& rep) {
  nlohmann::ordered_json j;
  j["n"] = rep.rank();
  j["word"] = rep.word().str();
  j["lambda"] = "formal";  // symbolic bundles always carry formal parameters
  j["factors"] = rep.factors();
  auto& rows = j["images"] = nlohmann::ordered_json::array();
  for (int i = 1; i <= rep.rank() + 1; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int c = 1; c <= rep.rank() + 1; ++c)
      row.push_back(nlohmann::ordered_json::parse(opalg::op_to_json(rep.image(i, c), rep.rank())));
    rows.push_back(std::move(row));
  }
  return j.dump();
}

SymbolicRep rep_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const int n = j.at("n").get<int>();
  const weyl::NormalForm word = weyl::parse_word(n, j.at("word").get<std::string>());
  if (j.contains("lambda") && j.at("lambda") != "formal")
    fail("bundle lambda mode must be \"formal\"");
  const int factors = j.at("factors").get<int>();
  const std::size_t N = static_cast<std::size_t>(n) + 1;
  const auto& rows = j.at("images");
  if (rows.size() != N) fail("bundle image table has wrong row count");
  std::vector<std::vector<TensorOperator>> images;
  images.reserve(N);
  for (const auto& row : rows) {
    if (row.size() != N) fail("bundle image table has wrong column count");
    std::vector<TensorOperator> out_row;
    out_row.reserve(N);
    for (const auto& op : row) out_row.push_back(opalg::op_from_json(op.dump()));
    images.push_back(std::move(out_row));
  }
  return SymbolicRep(n, word, factors, std::move(images));
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

void SuiteReport::merge(SuiteReport other) {
  checked += other.checked;
  failures.insert(failures.end(), std::make_move_iterator(other.failures.begin()),
                  std::make_move_iterator(other.failures.end()));
}

namespace {

class Suite {
 public:
  explicit Suite(SuiteReport& report) : report_(report) {}

  void check(bool pass, const std::string& id, const std::string& detail) {
    ++report_.checked;
    if (!pass) report_.failures.push_back({id, detail});
  }

 private:
  SuiteReport& report_;
};

std::string idx(std::initializer_list<std::pair<const char*, int>> vals) {
  std::string out;
  for (const auto& [name, v] : vals) {
    if (!out.empty()) out += ' ';
    out += name;
    out += '=';
    out += std::to_string(v);
  }
  return out;
}

}  // namespace

SuiteReport verify_defining_relations(const SymbolicRep& rep) {
  SuiteReport report;
  Suite suite(report);
  const int N = rep.rank() + 1;
  const TensorOperator one = TensorOperator::identity(rep.factors());
  auto Z = [&](int i, int j) -> const TensorOperator& { return rep.image(i, j); };
  auto Zs = [&](int i, int j) { return tensor_adjoint(rep.image(i, j)); };
  auto mul = [](const TensorOperator& a, const TensorOperator& b) {
    return tensor_mul(a, b);
  };
  auto comm = [&](const TensorOperator& a, const TensorOperator& b) {
    return tensor_sub(mul(a, b), mul(b, a));
  };

  // rel-1: rows annihilate rightwards, rel-2: columns annihilate downwards.
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j)
      for (int l = j + 1; l <= N; ++l)
        suite.check(mul(Z(i, j), Z(i, l)).is_zero(), "rel-1",
                    idx({{"i", i}, {"j", j}, {"l", l}}));
  for (int j = 1; j <= N; ++j)
    for (int i = 1; i <= N; ++i)
      for (int k = i + 1; k <= N; ++k)
        suite.check(mul(Z(i, j), Z(k, j)).is_zero(), "rel-2",
                    idx({{"i", i}, {"j", j}, {"k", k}}));

  // rel-3..rel-6: pairs i<k, j<l.
  for (int i = 1; i <= N; ++i)
    for (int k = i + 1; k <= N; ++k)
      for (int j = 1; j <= N; ++j)
        for (int l = j + 1; l <= N; ++l) {
          suite.check(comm(Z(i, l), Z(k, j)).is_zero(), "rel-3",
                      idx({{"i", i}, {"l", l}, {"k", k}, {"j", j}}));
          const int mx = std::max(i, j), mn = std::min(k, l);
          if (mx >= mn)
            suite.check(mul(Z(i, l), Z(k, j)).is_zero(), "rel-4",
                        idx({{"i", i}, {"l", l}, {"k", k}, {"j", j}}));
          if (mx + 1 == mn)
            suite.check(comm(Z(i, j), Z(k, l)) == mul(Z(i, l), Z(k, j)), "rel-5",
                        idx({{"i", i}, {"j", j}, {"k", k}, {"l", l}}));
          if (mx + 1 < mn)
            suite.check(comm(Z(i, j), Z(k, l)).is_zero(), "rel-6",
                        idx({{"i", i}, {"j", j}, {"k", k}, {"l", l}}));
        }

  // rel-7: the diagonal product is the unit.
  {
    TensorOperator prod = one;
    for (int i = 1; i <= N; ++i) prod = mul(prod, Z(i, i));
    suite.check(prod == one, "rel-7", "");
  }

  // rel-8: z_{i,j} commutes with z*_{r,s} when i != r and j != s.
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j)
      for (int r = 1; r <= N; ++r)
        for (int s = 1; s <= N; ++s) {
          if (i == r || j == s) continue;
          suite.check(comm(Z(i, j), Zs(r, s)).is_zero(), "rel-8",
                      idx({{"i", i}, {"j", j}, {"r", r}, {"s", s}}));
        }

  // rel-9: adjoints are monomials in the generators.
  auto diag_run = [&](int from, int to) {  // z_{from,from} ... z_{to,to}
    TensorOperator acc = one;
    for (int t = from; t <= to; ++t) acc = mul(acc, Z(t, t));
    return acc;
  };
  for (int r = 1; r <= N; ++r)
    for (int s = 1; s <= N; ++s) {
      TensorOperator expect = diag_run(1, std::min(r, s) - 1);
      if (r > s) {
        for (int t = s; t <= r - 1; ++t) expect = mul(expect, Z(t, t + 1));
      } else if (r < s) {
        for (int t = r; t <= s - 1; ++t) expect = mul(expect, Z(t + 1, t));
      }
      expect = mul(expect, diag_run(std::max(r, s) + 1, N));
      suite.check(Zs(r, s) == expect, "rel-9", idx({{"r", r}, {"s", s}}));
    }

  // rel-10: (z_{i,i} ... z_{j,j})* = (z_{1,1}..z_{i-1,i-1})(z_{j+1,j+1}..z_{N,N}).
  for (int i = 1; i <= N; ++i)
    for (int j = i; j <= N; ++j) {
      const TensorOperator lhs = tensor_adjoint(diag_run(i, j));
      const TensorOperator rhs = mul(diag_run(1, i - 1), diag_run(j + 1, N));
      suite.check(lhs == rhs, "rel-10", idx({{"i", i}, {"j", j}}));
    }

  return report;
}

SuiteReport verify_projection_suite(const SymbolicRep& rep) {
  SuiteReport report;
  Suite suite(report);
  const int N = rep.rank() + 1;
  const TensorOperator one = TensorOperator::identity(rep.factors());
  auto Z = [&](int i, int j) -> const TensorOperator& { return rep.image(i, j); };
  auto mul = [](const TensorOperator& a, const TensorOperator& b) {
    return tensor_mul(a, b);
  };
  auto p = [&](int i, int j) { return mul(tensor_adjoint(Z(i, j)), Z(i, j)); };
  auto q = [&](int i, int j) { return mul(Z(i, j), tensor_adjoint(Z(i, j))); };

  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j) {
      suite.check(opalg::is_projection(p(i, j)) && opalg::is_projection(q(i, j)),
                  "proj-projections", idx({{"i", i}, {"j", j}}));
      suite.check(opalg::is_partial_isometry(Z(i, j)), "proj-partial-isometry",
                  idx({{"i", i}, {"j", j}}));
    }

  auto sum_q_col = [&](int upto, int j) {  // Σ_{k=1}^{upto} q_{k,j}
    TensorOperator acc(rep.factors());
    for (int k = 1; k <= upto; ++k) acc = tensor_add(acc, q(k, j));
    return acc;
  };
  auto sum_p_row = [&](int i, int from) {  // Σ_{k=from}^{N} p_{i,k}
    TensorOperator acc(rep.factors());
    for (int k = from; k <= N; ++k) acc = tensor_add(acc, p(i, k));
    return acc;
  };
  auto sum_q_row = [&](int i, int upto) {  // Σ_{k=1}^{upto} q_{i,k}
    TensorOperator acc(rep.factors());
    for (int k = 1; k <= upto; ++k) acc = tensor_add(acc, q(i, k));
    return acc;
  };
  auto sum_p_col = [&](int from, int j) {  // Σ_{k=from}^{N} p_{k,j}
    TensorOperator acc(rep.factors());
    for (int k = from; k <= N; ++k) acc = tensor_add(acc, p(k, j));
    return acc;
  };
  auto diag_run = [&](int from, int to) {
    TensorOperator acc = one;
    for (int t = from; t <= to; ++t) acc = mul(acc, Z(t, t));
    return acc;
  };

  // Upper-triangular family (i <= j).
  for (int i = 1; i <= N; ++i)
    for (int j = i; j <= N; ++j)
      suite.check(sum_q_col(i, j) == sum_p_row(i, j), "proj-1", idx({{"i", i}, {"j", j}}));
  for (int j = 1; j <= N; ++j)
    suite.check(sum_q_col(j, j) == one && sum_p_row(j, j) == one, "proj-2",
                idx({{"j", j}}));
  for (int i = 1; i <= N; ++i)
    for (int j = i + 1; j <= N; ++j) {
      TensorOperator closed = diag_run(1, i - 1);
      closed = mul(closed, Z(i, j));
      for (int t = i; t <= j - 1; ++t) closed = mul(closed, Z(t + 1, t));
      closed = mul(closed, diag_run(j + 1, N));
      suite.check(sum_q_col(i, j) == closed, "proj-3", idx({{"i", i}, {"j", j}}));
      suite.check(sum_p_row(i, j) == closed, "proj-4", idx({{"i", i}, {"j", j}}));
    }

  // Lower-triangular family (j <= i).
  for (int j = 1; j <= N; ++j)
    for (int i = j; i <= N; ++i)
      suite.check(sum_q_row(i, j) == sum_p_col(i, j), "proj-5", idx({{"i", i}, {"j", j}}));
  for (int i = 1; i <= N; ++i)
    suite.check(sum_q_row(i, i) == one && sum_p_col(i, i) == one, "proj-6",
                idx({{"i", i}}));
  for (int j = 1; j <= N; ++j)
    for (int i = j + 1; i <= N; ++i) {
      TensorOperator closed = diag_run(1, j - 1);
      closed = mul(closed, Z(i, j));
      for (int t = j; t <= i - 1; ++t) closed = mul(closed, Z(t, t + 1));
      closed = mul(closed, diag_run(i + 1, N));
      suite.check(sum_q_row(i, j) == closed, "proj-7", idx({{"i", i}, {"j", j}}));
      suite.check(sum_p_col(i, j) == closed, "proj-8", idx({{"i", i}, {"j", j}}));
    }

  // Annihilation: i < k, j < l with i >= l or k <= j.
  for (int i = 1; i <= N; ++i)
    for (int k = i + 1; k <= N; ++k)
      for (int j = 1; j <= N; ++j)
        for (int l = j + 1; l <= N; ++l) {
          if (!(i >= l || k <= j)) continue;
          const bool ok = mul(Z(i, l), tensor_adjoint(Z(k, j))).is_zero() &&
                          mul(tensor_adjoint(Z(i, l)), Z(k, j)).is_zero();
          suite.check(ok, "proj-ann", idx({{"i", i}, {"l", l}, {"k", k}, {"j", j}}));
        }

  // Commutation with the bottom row: i,j <= s < k.
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j)
      for (int k = std::max(i, j) + 1; k <= N; ++k) {
        const TensorOperator qij = q(i, j);
        const TensorOperator znk = Z(N, k);
        const bool comm_q = tensor_mul(qij, znk) == tensor_mul(znk, qij);
        const TensorOperator pnk = p(N, k);
        const bool comm_p = tensor_mul(Z(i, j), pnk) == tensor_mul(pnk, Z(i, j));
        suite.check(comm_q && comm_p, "proj-comm", idx({{"i", i}, {"j", j}, {"k", k}}));
      }

  // Shift link: z_{i,j+1} z*_{N,j+1} = z*_{N,j} z_{i,j} for 1 <= i <= j <= n.
  for (int j = 1; j <= N - 1; ++j)
    for (int i = 1; i <= j; ++i) {
      const bool ok = mul(Z(i, j + 1), tensor_adjoint(Z(N, j + 1))) ==
                      mul(tensor_adjoint(Z(N, j)), Z(i, j));
      suite.check(ok, "proj-shiftlink", idx({{"i", i}, {"j", j}}));
    }

  return report;
}

// ---------------------------------------------------------------------------
// V / E operators
// ---------------------------------------------------------------------------

namespace {

struct ChainHit {
  int section;  // r
  int column;   // the column at which the chain enters section r
};

// v_{j,i} chain: start at (j, i); while the current section is >= 2 and
// n(c, col) is finite, step to (n(c, col), col + 1).
std::vector<ChainHit> v_chain(const weyl::NormalForm& w, int j, int i) {
  std::vector<ChainHit> hits{{j, i}};
  int c = j, col = i;
  while (c >= 2) {
    const auto m = weyl::n_index(w, c, col);
    if (!m) break;
    c = *m;
    ++col;
    hits.push_back({c, col});
  }
  return hits;
}

void require_v_domain(const SymbolicRep& rep, int j, int i) {
  const auto& seg = rep.word().segments();
  if (j < 1 || j > static_cast<int>(seg.size())) fail("V operator: section out of range");
  const auto& s = seg[static_cast<std::size_t>(j) - 1];
  if (i < s.a || i > s.b + 1) fail("V operator: column out of range");
}

// Leg index of column c inside section r: sections k..1 left to right,
// columns b_r..a_r left to right within a section.
int leg_of(const weyl::NormalForm& w, int r, int c) {
  const auto& seg = w.segments();
  int off = 0;
  for (int t = static_cast<int>(seg.size()); t > r; --t)
    off += seg[static_cast<std::size_t>(t) - 1].b - seg[static_cast<std::size_t>(t) - 1].a + 1;
  return off + (seg[static_cast<std::size_t>(r) - 1].b - c);
}

}  // namespace

TensorOperator V_op(const SymbolicRep& rep, int j, int i) {
  require_v_domain(rep, j, i);
  const auto& seg = rep.word().segments();
  TensorOperator acc = TensorOperator::identity(rep.factors());
  for (const ChainHit& h : v_chain(rep.word(), j, i)) {
    const int row = seg[static_cast<std::size_t>(h.section) - 1].b + 1;
    acc = tensor_mul(acc, rep.image(row, h.column));
  }
  return acc;
}

LaurentScalar v_phase(const SymbolicRep& rep, int j, int i) {
  require_v_domain(rep, j, i);
  const auto& seg = rep.word().segments();
  LaurentScalar phase(1);
  for (const ChainHit& h : v_chain(rep.word(), j, i))
    phase = phase * row_monomial(rep.rank(), seg[static_cast<std::size_t>(h.section) - 1].b + 1);
  return phase;
}

TensorOperator closed_form_V(const SymbolicRep& rep, int j, int i) {
  require_v_domain(rep, j, i);
  const auto& seg = rep.word().segments();
  const int k = static_cast<int>(seg.size());
  std::vector<std::optional<int>> hit_col(static_cast<std::size_t>(k) + 1);
  for (const ChainHit& h : v_chain(rep.word(), j, i))
    hit_col[static_cast<std::size_t>(h.section)] = h.column;

  TensorOperator acc = TensorOperator::identity(0);
  for (int r = k; r >= 1; --r) {
    const auto& s = seg[static_cast<std::size_t>(r) - 1];
    for (int c = s.b; c >= s.a; --c) {
      TensorOperator piece = TensorOperator::identity(1);
      if (hit_col[static_cast<std::size_t>(r)]) {
        const int h = *hit_col[static_cast<std::size_t>(r)];
        if (c >= h)
          piece = opalg::op_P0();
        else if (i >= s.a + 1 && c == i - 1)
          piece = opalg::op_Sstar();
      }
      acc = tensor_concat(acc, piece);
    }
  }
  return tensor_scale(v_phase(rep, j, i), acc);
}

TensorOperator absV_product(const SymbolicRep& rep, int j) {
  TensorOperator acc = TensorOperator::identity(rep.factors());
  for (int s = j; s >= 1; --s) {
    const TensorOperator v = V_op(rep, s, rep.word().segments()[static_cast<std::size_t>(s) - 1].a);
    acc = tensor_mul(acc, tensor_mul(tensor_adjoint(v), v));
  }
  return acc;
}

TensorOperator closed_form_absV(const SymbolicRep& rep, int j) {
  const auto& seg = rep.word().segments();
  const int k = static_cast<int>(seg.size());
  if (j < 1 || j > k) fail("absV: section out of range");
  TensorOperator acc = TensorOperator::identity(0);
  for (int r = k; r >= 1; --r) {
    const auto& s = seg[static_cast<std::size_t>(r) - 1];
    for (int c = s.b; c >= s.a; --c)
      acc = tensor_concat(acc, r <= j ? opalg::op_P0() : TensorOperator::identity(1));
  }
  return acc;
}

TensorOperator E_op(const SymbolicRep& rep, int j, int i) {
  require_v_domain(rep, j, i);
  const auto np = weyl::nprime_index(rep.word(), j, i);
  TensorOperator acc = V_op(rep, j, i);
  if (np) acc = tensor_mul(tensor_adjoint(V_op(rep, *np, i)), acc);
  if (j >= 2) acc = tensor_mul(acc, absV_product(rep, j - 1));
  return acc;
}

LaurentScalar e_phase(const SymbolicRep& rep, int j, int i) {
  const auto np = weyl::nprime_index(rep.word(), j, i);
  LaurentScalar phase = v_phase(rep, j, i);
  if (np) phase = v_phase(rep, *np, i).conj() * phase;
  return phase;
}

ZWord v_zword(const weyl::NormalForm& word, int j, int i) {
  const auto& seg = word.segments();
  if (j < 1 || j > static_cast<int>(seg.size())) fail("V word: section out of range");
  const auto& s = seg[static_cast<std::size_t>(j) - 1];
  if (i < s.a || i > s.b + 1) fail("V word: column out of range");
  ZWord out;
  for (const ChainHit& h : v_chain(word, j, i))
    out.push_back({seg[static_cast<std::size_t>(h.section) - 1].b + 1, h.column, false});
  return out;
}

namespace {

// Appends w* = the factors of w reversed and starred.
void append_adjoint(ZWord& out, const ZWord& w) {
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back({it->i, it->j, !it->star});
}

}  // namespace

ZWord e_zword(const weyl::NormalForm& word, int j, int i) {
  ZWord out;
  if (const auto np = weyl::nprime_index(word, j, i))
    append_adjoint(out, v_zword(word, *np, i));
  const ZWord vj = v_zword(word, j, i);
  out.insert(out.end(), vj.begin(), vj.end());
  const auto& seg = word.segments();
  for (int s = j - 1; s >= 1; --s) {
    const ZWord vs = v_zword(word, s, seg[static_cast<std::size_t>(s) - 1].a);
    append_adjoint(out, vs);
    out.insert(out.end(), vs.begin(), vs.end());
  }
  return out;
}

TensorOperator closed_form_E(const SymbolicRep& rep, int j, int i) {
  require_v_domain(rep, j, i);
  const auto& seg = rep.word().segments();
  const int k = static_cast<int>(seg.size());
  TensorOperator acc = TensorOperator::identity(0);
  for (int r = k; r >= 1; --r) {
    const auto& s = seg[static_cast<std::size_t>(r) - 1];
    for (int c = s.b; c >= s.a; --c) {
      TensorOperator piece = TensorOperator::identity(1);
      if (r < j || (r == j && i == s.a)) {
        piece = opalg::op_P0();
      } else if (r == j) {
        if (c >= i)
          piece = opalg::op_P0();
        else if (c == i - 1)
          piece = opalg::op_Sstar();
      }
      acc = tensor_concat(acc, piece);
    }
  }
  return acc;
}

PhaseSplit split_global_phase(const TensorOperator& op) {
  PhaseSplit out{TensorOperator(op.factors()), LaurentScalar(1), true};
  if (op.is_zero()) return out;
  const auto& first_coeff = op.terms().begin()->second;
  if (!first_coeff.is_monomial()) {
    out.single_phase = false;
    out.structure = op;
    return out;
  }
  const Monomial mono = first_coeff.terms().begin()->first;
  const LaurentScalar inv = LaurentScalar::monomial(opalg::mono_conj(mono));
  for (const auto& [w, c] : op.terms()) {
    if (!c.is_monomial() || c.terms().begin()->first != mono) {
      out.single_phase = false;
      out.structure = op;
      out.phase = LaurentScalar(1);
      return out;
    }
    out.structure.add_term(w, c * inv);
  }
  out.phase = LaurentScalar::monomial(mono);
  return out;
}

// ---------------------------------------------------------------------------
// rank-one elements
// ---------------------------------------------------------------------------

namespace {

TensorOperator op_pow(const TensorOperator& x, int p) {
  TensorOperator acc = TensorOperator::identity(x.factors());
  for (int t = 0; t < p; ++t) acc = tensor_mul(acc, x);
  return acc;
}

}  // namespace

TensorOperator rank_one_projector(const SymbolicRep& rep, const std::vector<int>& bra,
                                  const std::vector<int>& ket, LaurentScalar* phase) {
  const auto& seg = rep.word().segments();
  const int k = static_cast<int>(seg.size());
  const std::size_t L = static_cast<std::size_t>(rep.factors());
  if (bra.size() != L || ket.size() != L) fail("rank-one index tuples must have one entry per factor");
  if (k == 0) {
    if (phase) *phase = LaurentScalar(1);
    return TensorOperator::identity(0);
  }
  TensorOperator M = E_op(rep, k, seg[static_cast<std::size_t>(k) - 1].a);
  for (int s = k; s >= 1; --s) {
    const auto& sg = seg[static_cast<std::size_t>(s) - 1];
    TensorOperator left = TensorOperator::identity(rep.factors());
    for (int c = sg.b; c >= sg.a; --c)
      left = tensor_mul(left,
                        op_pow(E_op(rep, s, c + 1),
                               bra[static_cast<std::size_t>(leg_of(rep.word(), s, c))]));
    TensorOperator right = TensorOperator::identity(rep.factors());
    for (int c = sg.a; c <= sg.b; ++c)
      right = tensor_mul(right,
                         tensor_adjoint(op_pow(
                             E_op(rep, s, c + 1),
                             ket[static_cast<std::size_t>(leg_of(rep.word(), s, c))])));
    M = tensor_mul(tensor_mul(left, M), right);
  }
  PhaseSplit split = split_global_phase(M);
  if (!split.single_phase) fail("rank-one sandwich did not have a single global phase");
  if (phase) *phase = split.phase;
  return split.structure;
}

TensorOperator rank_one_direct(int factors, const std::vector<int>& bra,
                               const std::vector<int>& ket) {
  if (bra.size() != static_cast<std::size_t>(factors) || ket.size() != bra.size())
    fail("rank-one index tuples must have one entry per factor");
  TensorOperator acc = TensorOperator::identity(0);
  for (int t = 0; t < factors; ++t) {
    const std::uint32_t a = static_cast<std::uint32_t>(bra[static_cast<std::size_t>(t)]);
    const std::uint32_t b = static_cast<std::uint32_t>(ket[static_cast<std::size_t>(t)]);
    TensorOperator leg(1);
    leg.add_term({Word{a, b}}, LaurentScalar(1));
    leg.add_term({Word{a + 1, b + 1}}, LaurentScalar(-1));
    acc = tensor_concat(acc, leg);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// bialgebra
// ---------------------------------------------------------------------------

void FormalTensorSum::add(std::vector<ZWord> t, Rational c) {
  if (static_cast<int>(t.size()) != legs_) fail("formal tensor leg count mismatch");
  if (c == 0) return;
  auto it = terms_.find(t);
  if (it == terms_.end()) {
    terms_.emplace(std::move(t), std::move(c));
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

namespace {

FormalTensorSum delta_gen(int i, int j) {
  FormalTensorSum out(2);
  for (int k = std::min(i, j); k <= std::max(i, j); ++k)
    out.add({ZWord{{i, k, false}}, ZWord{{k, j, false}}}, 1);
  return out;
}

}  // namespace

FormalTensorSum coproduct_on_generator(int n, int i, int j) {
  if (i < 1 || i > n + 1 || j < 1 || j > n + 1) fail("generator index out of range");
  return delta_gen(i, j);
}

FormalTensorSum coproduct_on_leg(const FormalTensorSum& x, int leg) {
  if (leg < 0 || leg >= x.legs()) fail("coproduct leg out of range");
  FormalTensorSum out(x.legs() + 1);
  for (const auto& [t, c] : x.terms()) {
    // Δ of the z-monomial in this leg, as a 2-leg formal sum.
    FormalTensorSum dw(2);
    dw.add({ZWord{}, ZWord{}}, 1);
    for (const ZFactor& f : t[static_cast<std::size_t>(leg)]) {
      if (f.star) fail("coproduct is implemented on plain z-monomials only");
      FormalTensorSum next(2);
      const FormalTensorSum gen = delta_gen(f.i, f.j);
      for (const auto& [dt, dc] : dw.terms())
        for (const auto& [gt, gc] : gen.terms()) {
          ZWord left = dt[0], right = dt[1];
          left.insert(left.end(), gt[0].begin(), gt[0].end());
          right.insert(right.end(), gt[1].begin(), gt[1].end());
          next.add({std::move(left), std::move(right)}, dc * gc);
        }
      dw = std::move(next);
    }
    for (const auto& [dt, dc] : dw.terms()) {
      std::vector<ZWord> expanded;
      expanded.reserve(t.size() + 1);
      for (int s = 0; s < x.legs(); ++s) {
        if (s == leg) {
          expanded.push_back(dt[0]);
          expanded.push_back(dt[1]);
        } else {
          expanded.push_back(t[static_cast<std::size_t>(s)]);
        }
      }
      out.add(std::move(expanded), c * dc);
    }
  }
  return out;
}

FormalTensorSum counit_on_leg(const FormalTensorSum& x, int leg) {
  if (leg < 0 || leg >= x.legs()) fail("counit leg out of range");
  FormalTensorSum out(x.legs() - 1);
  for (const auto& [t, c] : x.terms()) {
    bool alive = true;
    for (const ZFactor& f : t[static_cast<std::size_t>(leg)])
      if (f.i != f.j) {
        alive = false;
        break;
      }
    if (!alive) continue;
    std::vector<ZWord> rest;
    rest.reserve(t.size() - 1);
    for (int s = 0; s < x.legs(); ++s)
      if (s != leg) rest.push_back(t[static_cast<std::size_t>(s)]);
    out.add(std::move(rest), c);
  }
  return out;
}

bool check_coassociativity(int n, int i, int j) {
  const FormalTensorSum d = coproduct_on_generator(n, i, j);
  return coproduct_on_leg(d, 0) == coproduct_on_leg(d, 1);
}

bool check_counit_laws(int n, int i, int j) {
  const FormalTensorSum d = coproduct_on_generator(n, i, j);
  FormalTensorSum expect(1);
  expect.add({ZWord{{i, j, false}}}, 1);
  return counit_on_leg(d, 0) == expect && counit_on_leg(d, 1) == expect;
}

FormalTensorSum subsemigroup_morphism(int n, int m, const FormalTensorSum& x) {
  if (m < 1 || m >= n) fail("subsemigroup morphism needs 1 <= m < n");
  FormalTensorSum out(x.legs());
  for (const auto& [t, c] : x.terms()) {
    std::vector<ZWord> mapped;
    mapped.reserve(t.size());
    bool alive = true;
    for (const ZWord& w : t) {
      ZWord mw;
      for (const ZFactor& f : w) {
        if (f.i <= m + 1 && f.j <= m + 1) {
          mw.push_back(f);
        } else if (f.i != f.j) {
          alive = false;
          break;
        }  // else: maps to 1, drop the factor
      }
      if (!alive) break;
      mapped.push_back(std::move(mw));
    }
    if (alive) out.add(std::move(mapped), c);
  }
  return out;
}

bool check_morphism_intertwines(int n, int m, int i, int j) {
  const FormalTensorSum lhs = subsemigroup_morphism(n, m, coproduct_on_generator(n, i, j));
  FormalTensorSum phi_z(1);
  if (i <= m + 1 && j <= m + 1) {
    phi_z.add({ZWord{{i, j, false}}}, 1);
  } else if (i == j) {
    phi_z.add({ZWord{}}, 1);
  }
  return lhs == coproduct_on_leg(phi_z, 0);
}

// ---------------------------------------------------------------------------
// diagrams
// ---------------------------------------------------------------------------

Diagram diagram(int n, const weyl::NormalForm& word) {
  if (word.rank() != n) fail("word rank mismatch");
  Diagram d;
  d.n = n;
  d.word = word;
  d.letters = word.to_letters();
  int pos = 0;
  const auto& seg = word.segments();
  for (int j = static_cast<int>(seg.size()); j >= 1; --j) {
    const int len = seg[static_cast<std::size_t>(j) - 1].b - seg[static_cast<std::size_t>(j) - 1].a + 1;
    d.section_spans.emplace_back(pos, pos + len - 1);
    pos += len;
  }
  return d;
}

namespace {

bool diagram_edge(int u, int v, int c) {
  if (u == v) return true;  // I, S or S* depending on u vs c
  return (u == c && v == c + 1) || (u == c + 1 && v == c);
}

TensorOperator diagram_step_op(int u, int v, int c) {
  if (u != v) return opalg::op_P0();
  if (u == c) return opalg::op_S();
  if (u == c + 1) return opalg::op_Sstar();
  return TensorOperator::identity(1);
}

}  // namespace

std::vector<DiagramPath> diagram_paths(const Diagram& d, int m, int l) {
  if (m < 1 || m > d.n + 1 || l < 1 || l > d.n + 1) fail("diagram node out of range");
  const int L = static_cast<int>(d.letters.size());
  // rec(t, goal): all level sequences k_0..k_t with k_0 = m, k_t = goal and
  // each intermediate level within [min(m, next), max(m, next)].
  std::function<std::vector<std::vector<int>>(int, int)> rec =
      [&](int t, int goal) -> std::vector<std::vector<int>> {
    if (t == 0) {
      if (goal == m) return {{m}};
      return {};
    }
    std::vector<std::vector<int>> out;
    const int lo = std::min(m, goal), hi = std::max(m, goal);
    for (int u = lo; u <= hi; ++u) {
      if (!diagram_edge(u, goal, d.letters[static_cast<std::size_t>(t) - 1])) continue;
      for (auto& pref : rec(t - 1, u)) {
        pref.push_back(goal);
        out.push_back(std::move(pref));
      }
    }
    return out;
  };
  std::vector<DiagramPath> paths;
  for (auto& levels : rec(L, l)) paths.push_back({m, l, std::move(levels)});
  return paths;
}

TensorOperator path_sum(const Diagram& d, int m, int l) {
  const int L = static_cast<int>(d.letters.size());
  TensorOperator acc(L);
  for (const DiagramPath& path : diagram_paths(d, m, l)) {
    TensorOperator term = TensorOperator::identity(0);
    for (int t = 0; t < L; ++t)
      term = tensor_concat(term, diagram_step_op(path.levels[static_cast<std::size_t>(t)],
                                                 path.levels[static_cast<std::size_t>(t) + 1],
                                                 d.letters[static_cast<std::size_t>(t)]));
    acc = tensor_add(acc, term);
  }
  return tensor_scale(row_monomial(d.n, m), acc);
}

}  // namespace su0::rep
