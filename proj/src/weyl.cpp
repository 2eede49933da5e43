#include "su0/weyl.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>

namespace su0::weyl {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

NormalForm::NormalForm(int n, std::vector<Segment> segments)
    : n_(n), seg_(std::move(segments)) {
  if (n < 1) fail("rank must be >= 1");
  int prev_b = n + 1;
  for (const Segment& s : seg_) {
    if (s.a < 1 || s.a > s.b) fail("segment requires 1 <= a <= b");
    if (s.b >= prev_b) fail("segment b-indices must strictly decrease");
    prev_b = s.b;
  }
  if (!seg_.empty() && seg_.front().b > n) fail("segment b-index exceeds rank");
}

int NormalForm::length() const noexcept {
  int len = 0;
  for (const Segment& s : seg_) len += s.b - s.a + 1;
  return len;
}

std::vector<int> NormalForm::to_letters() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(length()));
  for (auto it = seg_.rbegin(); it != seg_.rend(); ++it)
    for (int l = it->b; l >= it->a; --l) out.push_back(l);
  return out;
}

std::string NormalForm::str() const {
  if (seg_.empty()) return "e";
  std::string out;
  for (auto it = seg_.rbegin(); it != seg_.rend(); ++it) {
    if (!out.empty()) out += ' ';
    out += "s[" + std::to_string(it->a) + "," + std::to_string(it->b) + "]";
  }
  return out;
}

NormalForm parse_word(int n, std::string_view text) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto read_int = [&]() -> int {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) fail("expected integer in word: '" + std::string(text) + "'");
    return std::stoi(std::string(text.substr(start, pos - start)));
  };
  auto expect = [&](char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      fail(std::string("expected '") + c + "' in word: '" + std::string(text) + "'");
    ++pos;
  };

  skip_ws();
  if (pos < text.size() && text[pos] == 'e') {
    ++pos;
    skip_ws();
    if (pos != text.size()) fail("trailing characters after 'e'");
    return NormalForm(n);
  }

  std::vector<Segment> display;
  skip_ws();
  while (pos < text.size()) {
    expect('s');
    expect('[');
    int a = read_int();
    expect(',');
    int b = read_int();
    expect(']');
    display.push_back({a, b});
    skip_ws();
  }
  std::reverse(display.begin(), display.end());
  return NormalForm(n, std::move(display));
}

int inversion_count(int n, const std::vector<int>& letters) {
  std::vector<int> p(static_cast<std::size_t>(n) + 1);
  std::iota(p.begin(), p.end(), 1);
  for (int l : letters) {
    if (l < 1 || l > n) fail("letter out of range 1..n");
    std::swap(p[static_cast<std::size_t>(l) - 1], p[static_cast<std::size_t>(l)]);
  }
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return inv;
}

bool is_reduced(int n, const std::vector<int>& letters) {
  return inversion_count(n, letters) == static_cast<int>(letters.size());
}

NormalForm longest_word(int n) {
  std::vector<Segment> seg;
  seg.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) seg.push_back({1, n + 1 - j});
  return NormalForm(n, std::move(seg));
}

std::optional<int> n_index(const NormalForm& w, int j, int i) {
  const auto& seg = w.segments();
  for (int m = std::min<int>(j - 1, w.size()); m >= 1; --m)
    if (seg[static_cast<std::size_t>(m) - 1].a <= i) return m;
  return std::nullopt;
}

std::optional<int> nprime_index(const NormalForm& w, int j, int i) {
  return n_index(w, j, i - 1);
}

std::vector<int> m_trace(const NormalForm& w, int j) {
  if (j < 1 || j > w.rank() + 1) fail("row index out of range 1..n+1");
  const int k = w.size();
  std::vector<int> t(static_cast<std::size_t>(k) + 1);
  t[static_cast<std::size_t>(k)] = j;  // m_{k+1} = j
  for (int i = k; i >= 1; --i) {
    const Segment& s = w.segments()[static_cast<std::size_t>(i) - 1];
    const int next = t[static_cast<std::size_t>(i)];
    t[static_cast<std::size_t>(i) - 1] = (s.a <= next && next <= s.b) ? next + 1 : next;
  }
  return t;
}

int m_invariant(const NormalForm& w, int j) { return m_trace(w, j).front(); }

namespace {

void enumerate_chains(int n, int max_b, std::vector<Segment>& chain,
                      std::vector<NormalForm>& out) {
  // b_1 is chosen first (largest), so `chain` is already in storage order.
  out.emplace_back(n, chain);
  for (int b = max_b; b >= 1; --b) {
    for (int a = 1; a <= b; ++a) {
      chain.push_back({a, b});
      enumerate_chains(n, b - 1, chain, out);
      chain.pop_back();
    }
  }
}

}  // namespace

std::vector<NormalForm> all_normal_forms(int n) {
  std::vector<NormalForm> out;
  std::vector<Segment> chain;
  enumerate_chains(n, n, chain, out);
  return out;
}

}  // namespace su0::weyl
