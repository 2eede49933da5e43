#include "su0/qlimit.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace su0::qlimit {

namespace {

long long ipow(long long base, int exp) {
  long long out = 1;
  for (int t = 0; t < exp; ++t) out *= base;
  return out;
}

SpMat sparse_identity(long long dim) {
  SpMat id(dim, dim);
  id.setIdentity();
  return id;
}

SpMat diag_powers(double q, int N, int shift, double sign) {
  // sign * diag(q^{m + shift}), with 0^0 = 1 at q = 0, shift = 0.
  std::vector<Eigen::Triplet<Complex>> trip;
  for (int m = 0; m < N; ++m) {
    const double v = sign * std::pow(q, m + shift);
    if (v != 0.0) trip.emplace_back(m, m, Complex(v, 0.0));
  }
  SpMat out(N, N);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace

const SpMat& QRep::image(int i, int j) const {
  if (i < 1 || i > n + 1 || j < 1 || j > n + 1)
    throw std::out_of_range("generator index out of range");
  return images[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)];
}

long long QRep::dim() const { return ipow(N, factors); }

QRep q_elementary(int n, int r, double q, int N) {
  if (n < 1 || r < 1 || r > n) throw std::invalid_argument("need 1 <= r <= n");
  if (q < 0.0 || q >= 1.0) throw std::invalid_argument("need 0 <= q < 1");
  if (N < 2) throw std::invalid_argument("need N >= 2");

  QRep out;
  out.n = n;
  out.q = q;
  out.N = N;
  out.factors = 1;
  out.word = weyl::NormalForm(n, {{r, r}});
  out.lambda.assign(static_cast<size_t>(n), Complex(1.0, 0.0));
  out.images.assign(static_cast<size_t>(n + 1),
                    std::vector<SpMat>(static_cast<size_t>(n + 1), SpMat(N, N)));

  SpMat creation(N, N);  // entries (m+1, m) = sqrt(1 - q^{2(m+1)})
  SpMat annihilation(N, N);
  {
    std::vector<Eigen::Triplet<Complex>> up, down;
    for (int m = 0; m + 1 < N; ++m) {
      const double v = std::sqrt(1.0 - std::pow(q, 2 * (m + 1)));
      down.emplace_back(m + 1, m, Complex(v, 0.0));
      up.emplace_back(m, m + 1, Complex(v, 0.0));
    }
    creation.setFromTriplets(down.begin(), down.end());
    annihilation.setFromTriplets(up.begin(), up.end());
  }

  for (int i = 1; i <= n + 1; ++i)
    for (int j = 1; j <= n + 1; ++j) {
      SpMat& m = out.images[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)];
      if (i == r && j == r) {
        m = annihilation;  // S sqrt(I - q^{2 Nhat})
      } else if (i == r + 1 && j == r + 1) {
        m = creation;  // sqrt(I - q^{2 Nhat}) S*
      } else if (i == r && j == r + 1) {
        // -q^{Nhat+1}; at q = 0 the scaled limit q^{Nhat} = P0 applies.
        m = q > 0.0 ? diag_powers(q, N, 1, -1.0) : diag_powers(0.0, N, 0, 1.0);
      } else if (i == r + 1 && j == r) {
        m = diag_powers(q, N, 0, 1.0);  // q^{Nhat}
      } else if (i == j) {
        m = sparse_identity(N);
      }
    }
  return out;
}

QRep q_build(const std::vector<Complex>& lambda, const weyl::NormalForm& nf,
             double q, int N, bool full_sum) {
  const int n = nf.rank();
  if (static_cast<int>(lambda.size()) != n)
    throw std::invalid_argument("lambda size must equal the rank");
  if (q == 0.0) full_sum = false;

  QRep acc;
  acc.n = n;
  acc.q = q;
  acc.N = N;
  acc.factors = 0;
  acc.word = weyl::NormalForm(n);
  acc.lambda = lambda;
  acc.images.assign(static_cast<size_t>(n + 1),
                    std::vector<SpMat>(static_cast<size_t>(n + 1), SpMat(1, 1)));
  for (int i = 1; i <= n + 1; ++i) {
    const Complex lo = i >= 2 ? std::conj(lambda[static_cast<size_t>(i - 2)])
                              : Complex(1.0, 0.0);
    const Complex hi = i <= n ? lambda[static_cast<size_t>(i - 1)] : Complex(1.0, 0.0);
    acc.images[static_cast<size_t>(i - 1)][static_cast<size_t>(i - 1)].insert(0, 0) =
        lo * hi;
  }

  for (int letter : nf.to_letters()) {
    const QRep elem = q_elementary(n, letter, q, N);
    const long long d = acc.dim() * N;
    std::vector<std::vector<SpMat>> next(
        static_cast<size_t>(n + 1),
        std::vector<SpMat>(static_cast<size_t>(n + 1), SpMat(d, d)));
    for (int i = 1; i <= n + 1; ++i)
      for (int j = 1; j <= n + 1; ++j) {
        SpMat sum(d, d);
        const int klo = full_sum ? 1 : std::min(i, j);
        const int khi = full_sum ? n + 1 : std::max(i, j);
        for (int k = klo; k <= khi; ++k) {
          const SpMat& a = acc.image(i, k);
          const SpMat& b = elem.image(k, j);
          if (a.nonZeros() == 0 || b.nonZeros() == 0) continue;
          sum = SpMat(sum + numeric::kron(a, b));
        }
        next[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] = sum;
      }
    acc.images = std::move(next);
    ++acc.factors;
  }
  acc.word = nf;
  return acc;
}

SpMat scaled_generator(const QRep& qr, int i, int j) {
  const SpMat& m = qr.image(i, j);
  if (i >= j || qr.q == 0.0) return m;
  double factor = 1.0;
  for (int t = 0; t < j - i; ++t) factor /= -qr.q;
  return SpMat(factor * m);
}

double LimitDistances::max() const {
  double out = 0.0;
  for (const auto& row : dist)
    for (double v : row) out = std::max(out, v);
  return out;
}

LimitDistances limit_distance(const QRep& qr, const rep::SymbolicRep& srep,
                              int window) {
  if (srep.rank() != qr.n || srep.factors() != qr.factors ||
      !(srep.word() == qr.word))
    throw std::invalid_argument("representations must share rank, word and legs");
  if (window < 1 || 2 * window > qr.N)
    throw std::invalid_argument("window must satisfy 1 <= W <= N/2");
  LimitDistances out;
  out.n = qr.n;
  out.dist.assign(static_cast<size_t>(qr.n + 1),
                  std::vector<double>(static_cast<size_t>(qr.n + 1), 0.0));
  for (int i = 1; i <= qr.n + 1; ++i)
    for (int j = 1; j <= qr.n + 1; ++j) {
      const SpMat crystal =
          numeric::materialize(srep.image(i, j), qr.lambda, qr.N);
      const SpMat diff = SpMat(scaled_generator(qr, i, j) - crystal);
      out.dist[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] =
          numeric::window_norm(diff, qr.N, qr.factors, window);
    }
  return out;
}

double corep_unitarity_defect(const QRep& qr, int window) {
  // The products are taken in the full truncated space before window
  // compression; compressing first would cut off in-band intermediate
  // states and report a spurious defect at the window edge.
  const auto idx = numeric::window_indices(qr.N, qr.factors, window);
  const long long dw = static_cast<long long>(idx.size());
  const long long big = dw * (qr.n + 1);
  const long long d = qr.dim();
  DMat defect = DMat::Zero(big, big);
  for (int i = 1; i <= qr.n + 1; ++i)
    for (int j = 1; j <= qr.n + 1; ++j) {
      SpMat sum(d, d);
      for (int k = 1; k <= qr.n + 1; ++k)
        sum = SpMat(sum + SpMat(qr.image(k, i).adjoint() * qr.image(k, j)));
      if (i == j) sum = SpMat(sum - sparse_identity(d));
      defect.block((i - 1) * dw, (j - 1) * dw, dw, dw) =
          numeric::window_block(sum, qr.N, qr.factors, window);
    }
  return numeric::op_norm(defect);
}

std::string triplets_text(const SpMat& m) {
  std::ostringstream out;
  out.precision(17);
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' '
          << it.value().imag() << '\n';
  return out.str();
}

std::string limit_csv(
    const std::vector<std::pair<double, LimitDistances>>& rows) {
  std::ostringstream out;
  out.precision(12);
  out << "q,i,j,distance\n";
  for (const auto& [q, d] : rows)
    for (size_t i = 0; i < d.dist.size(); ++i)
      for (size_t j = 0; j < d.dist[i].size(); ++j)
        out << q << ',' << (i + 1) << ',' << (j + 1) << ',' << d.dist[i][j]
            << '\n';
  return out.str();
}

}  // namespace su0::qlimit
