#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "nilcurv/metrics.hpp"

namespace nilcurv {

using Complex = std::complex<double>;

/// Eigenvalues sorted by (real, imag). The algebraic multiplicity of 0 is
/// read from the stabilized rank of powers of A and that many
/// smallest-modulus eigenvalues are set to exactly 0; any other eigenvalue
/// with |lambda| < tol * (1 + ||A||) is snapped as well.
std::vector<Complex> spectrum(const Matrix& A, double tol);

/// Singular values above tol * sigma_max; 0 when sigma_max <= tol.
int numerical_rank(const Matrix& A, double tol);

/// rank(A^k) for k = 1, 2, ... until the sequence stabilizes (at most n
/// terms), thresholded at tol * scale^k. `scale` defaults to ||A||_2.
std::vector<int> power_rank_sequence(const Matrix& A, double tol,
                                     std::optional<double> scale = std::nullopt);

/// Smallest k <= n with ||A^k|| <= tol * (1 + ||A||)^k, if any.
std::optional<int> nilpotency_index(const Matrix& A, double tol);

struct EigenBlocks {
  Complex eigenvalue;
  /// Jordan block sizes, descending.
  std::vector<int> partition;
};

struct JordanProfile {
  std::vector<Complex> eigenvalues;
  /// Block sizes for eigenvalue 0, descending; empty if 0 is not an eigenvalue.
  std::vector<int> nilpotent_partition;
  /// rank A, rank A^2, ... (see power_rank_sequence).
  std::vector<int> rank_sequence;
  std::vector<EigenBlocks> blocks;
  /// Set for spectra outside the reliable envelope (non-nilpotent with
  /// clustered or repeated complex eigenvalues, or inconsistent block counts).
  bool low_confidence = false;

  int total_block_size() const;
};

/// Block partition from r_0 = n, r_1, r_2, ...: the number of blocks of size
/// >= k is r_{k-1} - r_k.
std::vector<int> partition_from_ranks(int n, const std::vector<int>& ranks);

JordanProfile jordan_profile(const Matrix& A, double tol);

/// Same size, matching spectra, and matching rank sequences of (A - lambda)^k
/// for every eigenvalue, with thresholds on a common scale.
bool jordan_equivalent(const Matrix& A, const Matrix& B, double tol);

}  // namespace nilcurv
