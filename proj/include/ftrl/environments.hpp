#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "ftrl/bounds.hpp"
#include "ftrl/core.hpp"

namespace ftrl {

enum class LossSource { hadamard, semiadv, bernoulli, csv };

std::string_view to_string(LossSource source);

/// Rounds-major loss table with entries in [0,1].
///
/// Periodic tables store one period block P x n and answer
/// entry(t, i) = block(t mod P, i mod n), so full-scale replicated
/// environments never materialize T x N doubles.
class LossMatrix {
 public:
  /// Dense table. Throws ContractError on empty input or entries outside [0,1].
  LossMatrix(Eigen::MatrixXd rounds_by_experts, LossSource source);
  static LossMatrix periodic(Eigen::MatrixXd block, Index rounds, Index experts, LossSource source);

  Index rounds() const noexcept { return rounds_; }
  Index experts() const noexcept { return experts_; }
  LossSource source() const noexcept { return source_; }

  double operator()(Index t, Index i) const {
    return block_(t % block_.rows(), i % block_.cols());
  }
  /// Losses of round t (0-based).
  Vector row(Index t) const;
  /// First `rounds` rounds.
  LossMatrix truncated(Index rounds) const;
  Eigen::MatrixXd dense() const;

 private:
  LossMatrix() = default;
  Eigen::MatrixXd block_;
  Index rounds_ = 0;
  Index experts_ = 0;
  LossSource source_ = LossSource::csv;
};

/// Counter-based SplitMix64 stream: output k is the SplitMix64 finalizer
/// applied to seed + (k + 1) * 0x9E3779B97F4A7C15.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t counter);
  std::uint64_t next_u64() { return mix(seed, counter++); }
  /// Uniform on [0,1) with 53 random bits.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

inline constexpr Index kHadamardRounds = 32768;
inline constexpr Index kHadamardBaseExperts = 126;

/// Signed Hadamard experts: the 63 non-constant rows of the Sylvester H_64
/// plus their negations, 0.025 subtracted from the first K, mapped onto [0,1]
/// by x -> (x + 1.025) / 2.025 and tiled over `rounds` rounds. Replication r
/// repeats the 126 experts r times, so expert i copies expert i mod 126.
LossMatrix hadamard_losses(Index good, Index replication, Index rounds = kHadamardRounds);

enum class SemiAdvVariant { one_effective, two_effective, all_effective };

std::string_view to_string(SemiAdvVariant variant);
/// Throws ContractError for an unknown name.
SemiAdvVariant semiadv_variant_from_string(std::string_view name);

/// one_effective: expert 0 loses 0.4 each round and the rest 0.5.
/// two_effective: experts 0 and 1 alternate 0/1 in opposite phase (expert 0
/// starts at 0); the rest lose 0.6.
/// all_effective: the first half alternates starting at 0, the second half
/// in opposite phase. Requires an even N.
LossMatrix semiadv_losses(SemiAdvVariant variant, Index experts, Index rounds);

/// Effective-gap profile of a semiadv variant (gap 0.1 for every ineffective expert).
SemiAdvProfile semiadv_profile(SemiAdvVariant variant, Index experts);

/// i.i.d. Bernoulli(p) losses. Entry (t, i) consumes stream output number
/// counter + t N + i, and the stream advances by T N.
LossMatrix bernoulli_losses(Index experts, Index rounds, RngStream& stream, double p = 0.5);

/// Reads a rounds-major numeric CSV. A first row containing a non-numeric
/// cell is a header and is skipped. LF and CRLF line ends are accepted.
/// Out-of-range entries are rejected, or clipped into [0,1] with a warning
/// on stderr when `lenient`; the clip count is written to `clipped`.
/// Throws ContractError on an unreadable or empty file, ragged rows, or
/// non-numeric cells, naming the row and column.
LossMatrix load_csv(const std::string& path, bool lenient = false, Index* clipped = nullptr);
/// Same as load_csv on in-memory text.
LossMatrix parse_csv(std::string_view text, bool lenient = false, Index* clipped = nullptr);

}  // namespace ftrl
