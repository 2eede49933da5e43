#include "su0/numeric.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace su0::numeric {

namespace {

long long ipow(long long base, int exp) {
  long long out = 1;
  for (int t = 0; t < exp; ++t) out *= base;
  return out;
}

// Drops entries at or below eps; sparse products leave exact-cancellation
// residue entries that would otherwise defeat the empty-matrix early exits.
SpMat prune_small(const SpMat& m, double eps) {
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<size_t>(m.nonZeros()));
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      if (std::abs(it.value()) > eps)
        trip.emplace_back(it.row(), it.col(), it.value());
  SpMat out(m.rows(), m.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SpMat sparse_identity(long long dim) {
  SpMat id(dim, dim);
  id.setIdentity();
  return id;
}

}  // namespace

SpMat word_matrix(const opalg::Word& w, int N) {
  std::vector<Eigen::Triplet<Complex>> trip;
  for (long long col = 0; col < N; ++col) {
    if (col < static_cast<long long>(w.b)) continue;
    const long long row = col - static_cast<long long>(w.b) + static_cast<long long>(w.a);
    if (row >= N) continue;
    trip.emplace_back(static_cast<int>(row), static_cast<int>(col), Complex(1.0, 0.0));
  }
  SpMat m(N, N);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat kron(const SpMat& a, const SpMat& b) {
  return SpMat(Eigen::kroneckerProduct(a, b));
}

SpMat materialize(const opalg::TensorOperator& op,
                  const std::vector<Complex>& lambda, int N) {
  const long long d = ipow(N, op.factors());
  SpMat acc(d, d);
  for (const auto& [word, coeff] : op.terms()) {
    const Complex c = coeff.eval(lambda);
    if (std::abs(c) == 0.0) continue;
    SpMat term(1, 1);
    term.insert(0, 0) = c;
    for (const auto& w : word) term = kron(term, word_matrix(w, N));
    acc = SpMat(acc + term);
  }
  return prune_small(acc, 1e-14);
}

std::vector<long long> window_indices(int N, int factors, int window) {
  if (window < 1 || window > N)
    throw std::invalid_argument("window must lie in [1, N]");
  const long long count = ipow(window, factors);
  std::vector<long long> idx(static_cast<size_t>(count));
  std::vector<int> digits(static_cast<size_t>(std::max(factors, 1)), 0);
  for (long long v = 0; v < count; ++v) {
    long long x = v;
    for (int t = factors - 1; t >= 0; --t) {
      digits[static_cast<size_t>(t)] = static_cast<int>(x % window);
      x /= window;
    }
    long long full = 0;
    for (int t = 0; t < factors; ++t) full = full * N + digits[static_cast<size_t>(t)];
    idx[static_cast<size_t>(v)] = full;
  }
  return idx;
}

DMat window_block(const SpMat& m, int N, int factors, int window) {
  const auto idx = window_indices(N, factors, window);
  std::vector<long long> pos(static_cast<size_t>(m.rows()), -1);
  for (size_t p = 0; p < idx.size(); ++p) pos[static_cast<size_t>(idx[p])] = static_cast<long long>(p);
  DMat out = DMat::Zero(static_cast<Eigen::Index>(idx.size()),
                        static_cast<Eigen::Index>(idx.size()));
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      const long long pr = pos[static_cast<size_t>(it.row())];
      const long long pc = pos[static_cast<size_t>(it.col())];
      if (pr >= 0 && pc >= 0)
        out(static_cast<Eigen::Index>(pr), static_cast<Eigen::Index>(pc)) = it.value();
    }
  return out;
}

double op_norm(const DMat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::BDCSVD<DMat> svd(m);
  return svd.singularValues()(0);
}

double window_norm(const SpMat& m, int N, int factors, int window) {
  return op_norm(window_block(m, N, factors, window));
}

std::vector<Complex> spectrum(const DMat& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("spectrum requires a square matrix");
  if (m.rows() >= 4096)
    throw std::invalid_argument("dense eigensolve is restricted to dimension < 4096");
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<DMat> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed to converge");
  std::vector<Complex> out(static_cast<size_t>(m.rows()));
  for (Eigen::Index t = 0; t < m.rows(); ++t) out[static_cast<size_t>(t)] = es.eigenvalues()(t);
  return out;
}

std::pair<Complex, double> scalar_part(const SpMat& m, int N, int factors,
                                       int window) {
  const DMat block = window_block(m, N, factors, window);
  const Complex mean = block.diagonal().mean();
  const DMat diff = block - mean * DMat::Identity(block.rows(), block.cols());
  return {mean, op_norm(diff)};
}

const SpMat& TruncatedRep::image(int i, int j) const {
  if (i < 1 || i > n + 1 || j < 1 || j > n + 1)
    throw std::out_of_range("generator index out of range");
  return images[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)];
}

SpMat& TruncatedRep::image(int i, int j) {
  if (i < 1 || i > n + 1 || j < 1 || j > n + 1)
    throw std::out_of_range("generator index out of range");
  return images[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)];
}

long long TruncatedRep::dim() const { return ipow(N, factors); }

TruncatedRep truncate_rep(const rep::SymbolicRep& srep, int N,
                          const std::vector<Complex>& lambda, int window) {
  if (N < 2) throw std::invalid_argument("truncation dimension must be >= 2");
  if (static_cast<int>(lambda.size()) != srep.rank())
    throw std::invalid_argument("lambda size must equal the rank");
  TruncatedRep t;
  t.n = srep.rank();
  t.N = N;
  t.factors = srep.factors();
  t.window = window < 0 ? N / 2 : window;
  if (t.window < 1 || t.window > N)
    throw std::invalid_argument("window must lie in [1, N]");
  t.lambda = lambda;
  t.images.assign(static_cast<size_t>(t.n + 1),
                  std::vector<SpMat>(static_cast<size_t>(t.n + 1)));
  for (int i = 1; i <= t.n + 1; ++i)
    for (int j = 1; j <= t.n + 1; ++j)
      t.image(i, j) = materialize(srep.image(i, j), lambda, N);
  return t;
}

double relation_residual(const TruncatedRep& t) {
  const int M = t.n + 1;
  const SpMat id = sparse_identity(t.dim());
  double worst = 0.0;
  auto Z = [&](int i, int j) -> const SpMat& { return t.image(i, j); };
  auto upd = [&](const SpMat& m) {
    worst = std::max(worst, window_norm(m, t.N, t.factors, t.window));
  };

  // Vanishing products along rows and columns.
  for (int i = 1; i <= M; ++i)
    for (int j = 1; j <= M; ++j)
      for (int l = j + 1; l <= M; ++l) upd(SpMat(Z(i, j) * Z(i, l)));
  for (int j = 1; j <= M; ++j)
    for (int i = 1; i <= M; ++i)
      for (int k = i + 1; k <= M; ++k) upd(SpMat(Z(i, j) * Z(k, j)));

  // Mixed pairs i < k, j < l.
  for (int i = 1; i <= M; ++i)
    for (int k = i + 1; k <= M; ++k)
      for (int j = 1; j <= M; ++j)
        for (int l = j + 1; l <= M; ++l) {
          upd(SpMat(Z(i, l) * Z(k, j) - Z(k, j) * Z(i, l)));
          if (std::max(i, j) >= std::min(k, l)) upd(SpMat(Z(i, l) * Z(k, j)));
          const SpMat comm = SpMat(Z(i, j) * Z(k, l) - Z(k, l) * Z(i, j));
          if (std::max(i, j) + 1 == std::min(k, l))
            upd(SpMat(comm - Z(i, l) * Z(k, j)));
          else if (std::max(i, j) + 1 < std::min(k, l))
            upd(comm);
        }

  // Diagonal product is the identity.
  {
    SpMat prod = Z(1, 1);
    for (int i = 2; i <= M; ++i) prod = SpMat(prod * Z(i, i));
    upd(SpMat(prod - id));
  }

  // Commutation with adjoints off the shared row/column.
  for (int i = 1; i <= M; ++i)
    for (int j = 1; j <= M; ++j)
      for (int r = 1; r <= M; ++r)
        for (int s = 1; s <= M; ++s) {
          if (i == r || j == s) continue;
          const SpMat zs = SpMat(Z(r, s).adjoint());
          upd(SpMat(Z(i, j) * zs - zs * Z(i, j)));
        }

  // Adjoint formulas: each z*_{r,s} is a monomial in the generators, and
  // diagonal runs adjoint to complementary runs.
  auto diag_run = [&](int from, int to) {
    SpMat acc = id;
    for (int u = from; u <= to; ++u) acc = SpMat(acc * Z(u, u));
    return acc;
  };
  for (int r = 1; r <= M; ++r)
    for (int s = 1; s <= M; ++s) {
      SpMat expect = diag_run(1, std::min(r, s) - 1);
      if (r > s)
        for (int u = s; u <= r - 1; ++u) expect = SpMat(expect * Z(u, u + 1));
      else if (r < s)
        for (int u = r; u <= s - 1; ++u) expect = SpMat(expect * Z(u + 1, u));
      expect = SpMat(expect * diag_run(std::max(r, s) + 1, M));
      upd(SpMat(SpMat(Z(r, s).adjoint()) - expect));
    }
  for (int i = 1; i <= M; ++i)
    for (int j = i; j <= M; ++j)
      upd(SpMat(SpMat(diag_run(i, j).adjoint()) -
                SpMat(diag_run(1, i - 1) * diag_run(j + 1, M))));

  return worst;
}

SpMat conj_sum(const SpMat& x, const SpMat& t, int cap) {
  SpMat acc = t;
  SpMat cur = t;
  for (int k = 1; k <= cap; ++k) {
    cur = prune_small(SpMat(SpMat(x * cur) * x.adjoint()), 1e-13);
    if (cur.nonZeros() == 0) break;
    acc = SpMat(acc + cur);
  }
  return acc;
}

SpMat W_op(const TruncatedRep& t, int i, int j) {
  if (j < 1 || j > i || i > t.n + 1)
    throw std::invalid_argument("W_op requires 1 <= j <= i <= n+1");
  SpMat w = t.image(t.n + 1, j);
  for (int lev = j + 1; lev <= i; ++lev)
    w = conj_sum(t.image(t.n + 1, lev), w, t.N);
  return w;
}

int bottom_row_first_nonzero(const TruncatedRep& t, double tol) {
  for (int j = 1; j <= t.n + 1; ++j)
    if (window_norm(t.image(t.n + 1, j), t.N, t.factors, t.window) > tol)
      return j;
  return 0;
}

SpMat U_op(const TruncatedRep& t, int i, double tol) {
  const int r = bottom_row_first_nonzero(t, tol);
  if (r == 0) throw std::invalid_argument("bottom row vanishes on the window");
  if (i < r + 1 || i > t.n + 1)
    throw std::invalid_argument("U_op requires r+1 <= i <= n+1");
  SpMat u = t.image(t.n + 1, r);
  for (int lev = r + 2; lev <= i; ++lev)
    u = conj_sum(t.image(t.n + 1, lev), u, t.N);
  return u;
}

namespace {

// Shared pattern builder: S^* on the leg of section j at column i-1, `block`
// on the higher columns of section j, identity everywhere else.
opalg::TensorOperator spread_pattern(const weyl::NormalForm& w, int j, int i,
                                     const opalg::TensorOperator& block) {
  const auto& segs = w.segments();
  const int k = static_cast<int>(segs.size());
  if (j < 1 || j > k) throw std::invalid_argument("section index out of range");
  if (i < segs[static_cast<size_t>(j - 1)].a + 1 ||
      i > segs[static_cast<size_t>(j - 1)].b + 1)
    throw std::invalid_argument("column index out of range for spread operator");
  opalg::TensorOperator acc = opalg::TensorOperator::identity(0);
  for (int sec = k; sec >= 1; --sec) {
    const auto& seg = segs[static_cast<size_t>(sec - 1)];
    for (int c = seg.b; c >= seg.a; --c) {
      opalg::TensorOperator leg = opalg::TensorOperator::identity(1);
      if (sec == j) {
        if (c >= i)
          leg = block;
        else if (c == i - 1)
          leg = opalg::op_Sstar();
      }
      acc = opalg::tensor_concat(acc, leg);
    }
  }
  return acc;
}

}  // namespace

opalg::TensorOperator R_pattern(const weyl::NormalForm& w, int j, int i) {
  return spread_pattern(w, j, i, opalg::op_P0());
}

opalg::TensorOperator S_pattern(const weyl::NormalForm& w, int j, int i) {
  return spread_pattern(w, j, i, opalg::TensorOperator::identity(1));
}

RSBuilder::RSBuilder(const TruncatedRep& t, const rep::SymbolicRep& srep)
    : t_(t), srep_(srep) {
  const size_t k = srep.word().segments().size();
  r_.assign(k + 1, std::vector<SpMat>(static_cast<size_t>(srep.rank()) + 2));
  s_.assign(k + 1, std::vector<SpMat>(static_cast<size_t>(srep.rank()) + 2));
  r_done_.assign(k + 1, std::vector<char>(static_cast<size_t>(srep.rank()) + 2, 0));
  s_done_.assign(k + 1, std::vector<char>(static_cast<size_t>(srep.rank()) + 2, 0));
}

const SpMat& RSBuilder::R(int j, int i) {
  const auto& segs = srep_.word().segments();
  const int k = static_cast<int>(segs.size());
  if (j < 1 || j > k) throw std::invalid_argument("section index out of range");
  const auto& seg = segs[static_cast<size_t>(j - 1)];
  if (i < seg.a + 1 || i > seg.b + 1)
    throw std::invalid_argument("column index out of range for spread operator");
  auto& slot = r_[static_cast<size_t>(j)][static_cast<size_t>(i)];
  if (r_done_[static_cast<size_t>(j)][static_cast<size_t>(i)]) return slot;
  SpMat val;
  if (j == 1) {
    val = materialize(rep::V_op(srep_, 1, i), t_.lambda, t_.N);
  } else {
    val = materialize(rep::E_op(srep_, j, i), t_.lambda, t_.N);
    for (int r = 1; r <= j - 1; ++r) {
      const auto& lower = segs[static_cast<size_t>(r - 1)];
      for (int c = lower.a; c <= lower.b; ++c)
        val = conj_sum(S(r, 1 + c), val, t_.N);
    }
  }
  slot = std::move(val);
  r_done_[static_cast<size_t>(j)][static_cast<size_t>(i)] = 1;
  return slot;
}

const SpMat& RSBuilder::S(int j, int i) {
  const auto& segs = srep_.word().segments();
  const int k = static_cast<int>(segs.size());
  if (j < 1 || j > k) throw std::invalid_argument("section index out of range");
  const auto& seg = segs[static_cast<size_t>(j - 1)];
  if (i < seg.a + 1 || i > seg.b + 1)
    throw std::invalid_argument("column index out of range for spread operator");
  auto& slot = s_[static_cast<size_t>(j)][static_cast<size_t>(i)];
  if (s_done_[static_cast<size_t>(j)][static_cast<size_t>(i)]) return slot;
  SpMat val = R(j, i);
  for (int c = i + 1; c <= seg.b + 1; ++c) val = conj_sum(R(j, c), val, t_.N);
  slot = std::move(val);
  s_done_[static_cast<size_t>(j)][static_cast<size_t>(i)] = 1;
  return slot;
}

WoldResult wold(const SpMat& w, int N, int factors, int window, double tol) {
  if (w.rows() != w.cols()) throw std::invalid_argument("wold requires a square matrix");
  if (w.rows() != ipow(N, factors))
    throw std::invalid_argument("matrix dimension must equal N^factors");
  WoldResult res;
  const long long dim = w.rows();
  const SpMat id = sparse_identity(dim);
  res.isometry_defect = window_norm(SpMat(SpMat(w.adjoint() * w) - id), N, factors, window);
  res.unitary_defect = window_norm(SpMat(SpMat(w * w.adjoint()) - id), N, factors, window);

  // Structured path: recognize W = phase . (I ox S^*) on the last leg.  The
  // phase is read off the first column; every column v*N + q must then be
  // phase * e_{v*N + q + 1} for q < N-1 and zero for q = N-1.
  bool structured = factors >= 1 && dim >= N;
  Complex phase(0.0, 0.0);
  if (structured) {
    const DMat col0 = DMat(w * DMat::Identity(dim, 1));
    phase = col0(1, 0);
    structured = std::abs(std::abs(phase) - 1.0) <= tol;
  }
  if (structured) {
    DMat dense_w = DMat(w);
    for (long long v = 0; structured && v < dim / N; ++v)
      for (long long q = 0; structured && q < N; ++q) {
        const long long c = v * N + q;
        DMat expect = DMat::Zero(dim, 1);
        if (q < N - 1) expect(c + 1, 0) = phase;
        structured = (dense_w.col(c) - expect).norm() <= tol;
      }
  }

  if (structured) {
    res.structured = true;
    res.d = static_cast<int>(dim / N);
    res.K = DMat::Zero(dim, dim / N);
    for (long long v = 0; v < dim / N; ++v) res.K(v * N, v) = 1.0;
    return res;
  }

  // Fallback: orthonormal basis of ker W^* from a dense SVD of W.
  const DMat dense_w = DMat(w);
  Eigen::BDCSVD<DMat> svd(dense_w, Eigen::ComputeFullU);
  const auto& sing = svd.singularValues();
  const double cutoff = sing.size() == 0 ? 0.0 : tol * std::max(sing(0), 1.0);
  int rank = 0;
  for (Eigen::Index t = 0; t < sing.size(); ++t)
    if (sing(t) > cutoff) ++rank;
  res.d = static_cast<int>(dim) - rank;
  res.K = svd.matrixU().rightCols(res.d);
  return res;
}

}  // namespace su0::numeric
