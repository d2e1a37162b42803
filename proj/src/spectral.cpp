#include "nilcurv/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "nilcurv/errors.hpp"

namespace nilcurv {

namespace {

using CMatrix = Eigen::MatrixXcd;

template <class M>
Eigen::VectorXd singular_values(const M& A) {
  if (A.size() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<M> svd(A);
  return svd.singularValues();
}

template <class M>
double spectral_norm(const M& A) {
  const Eigen::VectorXd s = singular_values(A);
  return s.size() == 0 ? 0.0 : s(0);
}

template <class M>
int count_above(const M& A, double threshold) {
  const Eigen::VectorXd s = singular_values(A);
  return static_cast<int>((s.array() > threshold).count());
}

// Power ranks of a (possibly complex) matrix against a fixed scale.
template <class M>
std::vector<int> power_ranks(const M& A, double tol, double scale) {
  const int n = static_cast<int>(A.rows());
  std::vector<int> ranks;
  if (scale <= tol) {
    ranks.push_back(0);
    return ranks;
  }
  M power = A;
  double threshold = tol * scale;
  for (int k = 1; k <= std::max(n, 1); ++k) {
    const int r = count_above(power, threshold);
    ranks.push_back(r);
    if (r == 0 || (ranks.size() >= 2 && ranks[ranks.size() - 2] == r)) break;
    power = power * A;
    threshold *= scale;
  }
  return ranks;
}

bool complex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

struct Cluster {
  Complex center;
  int multiplicity = 0;
};

std::vector<Cluster> cluster_eigenvalues(const std::vector<Complex>& values, double radius) {
  std::vector<Cluster> out;
  for (const Complex& v : values) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const Cluster& c) { return std::abs(c.center - v) <= radius; });
    if (it == out.end()) {
      out.push_back({v, 1});
    } else {
      it->center = (it->center * static_cast<double>(it->multiplicity) + v) /
                   static_cast<double>(it->multiplicity + 1);
      ++it->multiplicity;
    }
  }
  return out;
}

}  // namespace

int numerical_rank(const Matrix& A, double tol) {
  const Eigen::VectorXd s = singular_values(A);
  if (s.size() == 0 || s(0) <= tol) return 0;
  return static_cast<int>((s.array() > tol * s(0)).count());
}

std::vector<int> power_rank_sequence(const Matrix& A, double tol, std::optional<double> scale) {
  return power_ranks(A, tol, scale.value_or(spectral_norm(A)));
}

std::optional<int> nilpotency_index(const Matrix& A, double tol) {
  const int n = static_cast<int>(A.rows());
  const double base = 1.0 + spectral_norm(A);
  Matrix power = A;
  double bound = tol * base;
  for (int k = 1; k <= n; ++k) {
    if (spectral_norm(power) <= bound) return k;
    power = power * A;
    bound *= base;
  }
  return std::nullopt;
}

std::vector<Complex> spectrum(const Matrix& A, double tol) {
  if (A.rows() != A.cols()) throw InputError("spectrum: matrix is not square");
  if (!A.allFinite()) throw InputError("spectrum: matrix has non-finite entries");
  const int n = static_cast<int>(A.rows());
  std::vector<Complex> values;
  if (n == 0) return values;
  const double norm = spectral_norm(A);
  const double scale = 1.0 + norm;

  const std::vector<int> ranks = power_ranks(A, tol, norm);
  const int zero_multiplicity = n - ranks.back();

  Eigen::EigenSolver<Matrix> solver(A, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectrum: eigenvalue iteration did not converge (n = " +
                         std::to_string(n) + ", ||A|| = " + std::to_string(norm) + ")");
  }
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) values.push_back(solver.eigenvalues()(i));

  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(values[a]) < std::abs(values[b]); });
  for (int k = 0; k < zero_multiplicity; ++k) values[order[static_cast<std::size_t>(k)]] = 0.0;
  for (Complex& v : values) {
    if (std::abs(v) < tol * scale) v = 0.0;
    if (std::abs(v.imag()) < tol * scale) v = Complex(v.real(), 0.0);
  }
  std::sort(values.begin(), values.end(), complex_less);
  return values;
}

std::vector<int> partition_from_ranks(int n, const std::vector<int>& ranks) {
  // at_least[k-1] = number of blocks of size >= k
  std::vector<int> at_least;
  int prev = n;
  for (const int r : ranks) {
    at_least.push_back(prev - r);
    prev = r;
  }
  std::vector<int> partition;
  for (std::size_t k = 0; k < at_least.size(); ++k) {
    const int exactly = at_least[k] - (k + 1 < at_least.size() ? at_least[k + 1] : 0);
    for (int b = 0; b < exactly; ++b) partition.push_back(static_cast<int>(k + 1));
  }
  std::sort(partition.begin(), partition.end(), std::greater<>());
  return partition;
}

int JordanProfile::total_block_size() const {
  int total = 0;
  for (const EigenBlocks& b : blocks) {
    for (const int s : b.partition) total += s;
  }
  return total;
}

JordanProfile jordan_profile(const Matrix& A, double tol) {
  const int n = static_cast<int>(A.rows());
  JordanProfile profile;
  profile.eigenvalues = spectrum(A, tol);
  const double norm = spectral_norm(A);
  profile.rank_sequence = power_ranks(A, tol, norm);

  const int zero_multiplicity = n - profile.rank_sequence.back();
  if (zero_multiplicity > 0) {
    profile.nilpotent_partition = partition_from_ranks(n, profile.rank_sequence);
    profile.blocks.push_back({Complex(0.0, 0.0), profile.nilpotent_partition});
  }

  std::vector<Complex> nonzero;
  for (const Complex& v : profile.eigenvalues) {
    if (v != Complex(0.0, 0.0)) nonzero.push_back(v);
  }
  const double radius = std::sqrt(tol) * (1.0 + norm);
  const CMatrix Ac = A.cast<Complex>();
  for (const Cluster& c : cluster_eigenvalues(nonzero, radius)) {
    const CMatrix shifted = Ac - c.center * CMatrix::Identity(n, n);
    const double s = std::max(spectral_norm(shifted), norm);
    const std::vector<int> ranks = power_ranks(shifted, tol, s);
    const std::vector<int> partition = partition_from_ranks(n, ranks);
    int total = 0;
    for (const int b : partition) total += b;
    if (c.multiplicity > 1 && (c.center.imag() != 0.0 || total != c.multiplicity)) {
      profile.low_confidence = true;
    }
    if (total != c.multiplicity) profile.low_confidence = true;
    profile.blocks.push_back({c.center, partition});
  }
  if (profile.total_block_size() != n) profile.low_confidence = true;
  return profile;
}

bool jordan_equivalent(const Matrix& A, const Matrix& B, double tol) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) return false;
  const int n = static_cast<int>(A.rows());
  const std::vector<Complex> sa = spectrum(A, tol);
  const std::vector<Complex> sb = spectrum(B, tol);
  const double norm = std::max(spectral_norm(A), spectral_norm(B));
  const double radius = std::sqrt(tol) * (1.0 + norm);

  std::vector<Cluster> ca = cluster_eigenvalues(sa, radius);
  std::vector<Cluster> cb = cluster_eigenvalues(sb, radius);
  if (ca.size() != cb.size()) return false;
  for (const Cluster& a : ca) {
    const auto it = std::find_if(cb.begin(), cb.end(), [&](const Cluster& b) {
      return std::abs(a.center - b.center) <= radius && a.multiplicity == b.multiplicity;
    });
    if (it == cb.end()) return false;
  }

  const CMatrix Ac = A.cast<Complex>();
  const CMatrix Bc = B.cast<Complex>();
  for (const Cluster& c : ca) {
    const CMatrix shift = c.center * CMatrix::Identity(n, n);
    const CMatrix as = Ac - shift;
    const CMatrix bs = Bc - shift;
    const double s = std::max(spectral_norm(as), spectral_norm(bs));
    std::vector<int> ra = power_ranks(as, tol, s);
    std::vector<int> rb = power_ranks(bs, tol, s);
    // compare after padding with the stable value
    const std::size_t len = std::max(ra.size(), rb.size());
    ra.resize(len, ra.back());
    rb.resize(len, rb.back());
    if (ra != rb) return false;
  }
  return true;
}

}  // namespace nilcurv
