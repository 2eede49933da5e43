#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace su0::weyl {

// One segment s_[a,b] = s_b s_{b-1} ... s_a of simple reflections, 1 <= a <= b.
struct Segment {
  int a = 1;
  int b = 1;
  friend bool operator==(const Segment&, const Segment&) = default;
};

// Canonical form of a reduced word in the symmetric group S_{n+1}:
//
//   w = s_[a_k,b_k] ... s_[a_2,b_2] s_[a_1,b_1]
//
// stored j-ascending, i.e. segments()[0] = (a_1,b_1), subject to
//   n >= b_1 > b_2 > ... > b_k >= 1   and   1 <= a_j <= b_j.
// The printed form lists factors left to right, so (a_k,b_k) comes first.
class NormalForm {
 public:
  // Validates the segment constraints; throws std::invalid_argument on violation.
  explicit NormalForm(int n, std::vector<Segment> segments = {});

  [[nodiscard]] int rank() const noexcept { return n_; }
  [[nodiscard]] const std::vector<Segment>& segments() const noexcept { return seg_; }
  // Number of segments k.
  [[nodiscard]] int size() const noexcept { return static_cast<int>(seg_.size()); }
  [[nodiscard]] bool empty() const noexcept { return seg_.empty(); }
  // Coxeter length = sum of segment lengths b_j - a_j + 1.
  [[nodiscard]] int length() const noexcept;
  // Letters of the reduced expression, read left to right:
  // for j = k down to 1 emit b_j, b_j - 1, ..., a_j.
  [[nodiscard]] std::vector<int> to_letters() const;
  // "s[a_k,b_k] s[...,...] ... s[a_1,b_1]"; the identity prints as "e".
  [[nodiscard]] std::string str() const;

  friend bool operator==(const NormalForm&, const NormalForm&) = default;

 private:
  int n_ = 1;
  std::vector<Segment> seg_;
};

// Parses the output of NormalForm::str (whitespace between factors optional).
NormalForm parse_word(int n, std::string_view text);

// True iff the word (letters in 1..n) has length equal to the inversion count
// of the permutation it represents in S_{n+1}.
bool is_reduced(int n, const std::vector<int>& letters);

// Inversion count of the permutation represented by the word.
int inversion_count(int n, const std::vector<int>& letters);

// The longest element of S_{n+1}: segments (a_j, b_j) = (1, n+1-j), j = 1..n.
NormalForm longest_word(int n);

// n(j,i)   = max { m <= j-1 : a_m <= i },   absent -> nullopt.
std::optional<int> n_index(const NormalForm& w, int j, int i);
// n'(j,i)  = max { m <= j-1 : a_m + 1 <= i }, absent -> nullopt.
std::optional<int> nprime_index(const NormalForm& w, int j, int i);

// Trace of the recursion m_{k+1} = j; m_i = m_{i+1}+1 if a_i <= m_{i+1} <= b_i,
// else m_i = m_{i+1}.  Returned as t with t[i-1] = m_i, so t.front() = m_1 and
// t.back() = m_{k+1} = j.  Requires 1 <= j <= n+1.
std::vector<int> m_trace(const NormalForm& w, int j);

// m_1(j, w): the largest column index c such that psi_{lambda,w}(z_{j,c}) != 0.
int m_invariant(const NormalForm& w, int j);

// All (n+1)! normal forms of rank n, identity first, deterministic order.
std::vector<NormalForm> all_normal_forms(int n);

}  // namespace su0::weyl
