#include "ftrl/environments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "ftrl/errors.hpp"

namespace ftrl {

std::string_view to_string(LossSource source) {
  switch (source) {
    case LossSource::hadamard: return "hadamard";
    case LossSource::semiadv: return "semiadv";
    case LossSource::bernoulli: return "bernoulli";
    case LossSource::csv: return "csv";
  }
  return "unknown";
}

namespace {

void check_entries(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.cols() < 1) throw ContractError("loss matrix: dimensions must be positive");
  for (Index t = 0; t < m.rows(); ++t) {
    for (Index i = 0; i < m.cols(); ++i) {
      const double v = m(t, i);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ContractError("loss matrix: entry (" + std::to_string(t) + ", " + std::to_string(i) +
                            ") outside [0,1]");
      }
    }
  }
}

}  // namespace

LossMatrix::LossMatrix(Eigen::MatrixXd rounds_by_experts, LossSource source)
    : block_(std::move(rounds_by_experts)), source_(source) {
  check_entries(block_);
  rounds_ = block_.rows();
  experts_ = block_.cols();
}

LossMatrix LossMatrix::periodic(Eigen::MatrixXd block, Index rounds, Index experts,
                                LossSource source) {
  check_entries(block);
  if (rounds < 1 || experts < 1) throw ContractError("loss matrix: dimensions must be positive");
  LossMatrix m;
  m.block_ = std::move(block);
  m.rounds_ = rounds;
  m.experts_ = experts;
  m.source_ = source;
  return m;
}

Vector LossMatrix::row(Index t) const {
  if (t < 0 || t >= rounds_) throw ContractError("loss matrix: round out of range");
  const Index p = t % block_.rows();
  Vector out(experts_);
  const Index n = block_.cols();
  for (Index i = 0; i < experts_; ++i) out(i) = block_(p, i % n);
  return out;
}

LossMatrix LossMatrix::truncated(Index rounds) const {
  if (rounds < 1 || rounds > rounds_) throw ContractError("loss matrix: truncation out of range");
  LossMatrix m = *this;
  m.rounds_ = rounds;
  if (m.block_.rows() > rounds) m.block_.conservativeResize(rounds, Eigen::NoChange);
  return m;
}

Eigen::MatrixXd LossMatrix::dense() const {
  Eigen::MatrixXd out(rounds_, experts_);
  for (Index t = 0; t < rounds_; ++t) out.row(t) = row(t).transpose();
  return out;
}

std::uint64_t RngStream::mix(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

LossMatrix hadamard_losses(Index good, Index replication, Index rounds) {
  constexpr Index kOrder = 64;
  constexpr Index kRows = kOrder - 1;
  if (good < 1 || good > kRows) throw ContractError("hadamard: K must lie in [1, 63]");
  if (replication < 1) throw ContractError("hadamard: replication must be >= 1");
  if (rounds < 1) throw ContractError("hadamard: rounds must be >= 1");

  constexpr double kShift = 0.025;
  constexpr double kLow = -1.0 - kShift;
  constexpr double kHigh = 1.0;
  Eigen::MatrixXd block(kOrder, kHadamardBaseExperts);
  for (Index e = 0; e < kHadamardBaseExperts; ++e) {
    const Index h_row = e % kRows + 1;  // skip the all-ones row
    const double sign = e < kRows ? 1.0 : -1.0;
    for (Index t = 0; t < kOrder; ++t) {
      const auto bits = static_cast<unsigned>(h_row & t);
      double v = sign * ((std::popcount(bits) % 2 == 0) ? 1.0 : -1.0);
      if (e < good) v -= kShift;
      block(t, e) = (v - kLow) / (kHigh - kLow);
    }
  }
  return LossMatrix::periodic(std::move(block), rounds, kHadamardBaseExperts * replication,
                              LossSource::hadamard);
}

std::string_view to_string(SemiAdvVariant variant) {
  switch (variant) {
    case SemiAdvVariant::one_effective: return "one_effective";
    case SemiAdvVariant::two_effective: return "two_effective";
    case SemiAdvVariant::all_effective: return "all_effective";
  }
  return "unknown";
}

SemiAdvVariant semiadv_variant_from_string(std::string_view name) {
  if (name == "one_effective") return SemiAdvVariant::one_effective;
  if (name == "two_effective") return SemiAdvVariant::two_effective;
  if (name == "all_effective") return SemiAdvVariant::all_effective;
  throw ContractError("unknown semiadv variant '" + std::string(name) + "'");
}

LossMatrix semiadv_losses(SemiAdvVariant variant, Index experts, Index rounds) {
  if (rounds < 1) throw ContractError("semiadv: rounds must be >= 1");
  if (experts < 2) throw ContractError("semiadv: needs at least two experts");
  Eigen::MatrixXd block(2, experts);
  switch (variant) {
    case SemiAdvVariant::one_effective:
      block.setConstant(0.5);
      block.col(0).setConstant(0.4);
      break;
    case SemiAdvVariant::two_effective:
      block.setConstant(0.6);
      block.col(0) << 0.0, 1.0;
      block.col(1) << 1.0, 0.0;
      break;
    case SemiAdvVariant::all_effective: {
      if (experts % 2 != 0) throw ContractError("semiadv: all_effective needs an even N");
      const Index half = experts / 2;
      block.leftCols(half).row(0).setZero();
      block.leftCols(half).row(1).setOnes();
      block.rightCols(half).row(0).setOnes();
      block.rightCols(half).row(1).setZero();
      break;
    }
  }
  return LossMatrix::periodic(std::move(block), rounds, experts, LossSource::semiadv);
}

SemiAdvProfile semiadv_profile(SemiAdvVariant variant, Index experts) {
  constexpr double kGap = 0.1;
  switch (variant) {
    case SemiAdvVariant::one_effective:
      return SemiAdvProfile(experts, 1, std::vector<double>(static_cast<std::size_t>(experts - 1), kGap));
    case SemiAdvVariant::two_effective:
      return SemiAdvProfile(experts, 2, std::vector<double>(static_cast<std::size_t>(experts - 2), kGap));
    case SemiAdvVariant::all_effective:
      return SemiAdvProfile(experts, experts, {});
  }
  throw ContractError("semiadv: unknown variant");
}

LossMatrix bernoulli_losses(Index experts, Index rounds, RngStream& stream, double p) {
  if (experts < 1 || rounds < 1) throw ContractError("bernoulli: dimensions must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw ContractError("bernoulli: p must lie in [0,1]");
  Eigen::MatrixXd m(rounds, experts);
  const double threshold = 1.0 - p;
  for (Index t = 0; t < rounds; ++t) {
    for (Index i = 0; i < experts; ++i) {
      const double u = stream.next_uniform();
      m(t, i) = (p > 0.0 && u >= threshold) ? 1.0 : 0.0;
    }
  }
  return LossMatrix(std::move(m), LossSource::bernoulli);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_number(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

LossMatrix parse_csv(std::string_view text, bool lenient, Index* clipped) {
  std::vector<std::vector<double>> rows;
  Index line_no = 0;
  Index clip_count = 0;
  bool first = true;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_cells(line);
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (std::size_t c = 0; c < cells.size(); ++c) numeric = numeric && parse_number(cells[c], values[c]);
    if (first && !numeric) {
      first = false;
      continue;  // header
    }
    first = false;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_number(cells[c], values[c])) {
        throw ContractError("csv: non-numeric cell at line " + std::to_string(line_no) + ", column " +
                            std::to_string(c + 1));
      }
      if (values[c] < 0.0 || values[c] > 1.0) {
        if (!lenient) {
          throw ContractError("csv: value outside [0,1] at line " + std::to_string(line_no) +
                              ", column " + std::to_string(c + 1));
        }
        values[c] = std::clamp(values[c], 0.0, 1.0);
        ++clip_count;
      }
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw ContractError("csv: ragged row at line " + std::to_string(line_no) + " (expected " +
                          std::to_string(rows.front().size()) + " columns, found " +
                          std::to_string(values.size()) + ")");
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ContractError("csv: no data rows");
  if (clip_count > 0) {
    std::cerr << "warning: csv: clipped " << clip_count << " value(s) into [0,1]\n";
  }
  if (clipped != nullptr) *clipped = clip_count;

  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index t = 0; t < m.rows(); ++t) {
    for (Index i = 0; i < m.cols(); ++i) m(t, i) = rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
  }
  return LossMatrix(std::move(m), LossSource::csv);
}

LossMatrix load_csv(const std::string& path, bool lenient, Index* clipped) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("csv: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), lenient, clipped);
}

}  // namespace ftrl
