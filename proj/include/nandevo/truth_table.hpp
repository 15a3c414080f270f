#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace nandevo {

/// Packed boolean function with `inputs` inputs and `outputs` outputs.
///
/// Each output is a bit-string of length 2^inputs stored LSB-first in 64-bit
/// words. Row index p assigns external input i the value of bit i of p.
/// Bits beyond 2^inputs in the last word of an output are always zero.
class TruthTable {
 public:
  static constexpr int kMaxInputs = 16;

  TruthTable() : TruthTable(0, 1) {}
  TruthTable(int inputs, int outputs);

  int inputs() const noexcept { return inputs_; }
  int outputs() const noexcept { return outputs_; }
  std::size_t rows() const noexcept { return std::size_t{1} << inputs_; }
  std::size_t words_per_output() const noexcept { return words_per_output_; }
  std::size_t bit_count() const noexcept { return rows() * static_cast<std::size_t>(outputs_); }

  bool bit(int output, std::size_t row) const noexcept {
    return (words_[word_index(output, row)] >> (row & 63u)) & 1u;
  }
  void set_bit(int output, std::size_t row, bool value) noexcept {
    auto& w = words_[word_index(output, row)];
    const std::uint64_t m = std::uint64_t{1} << (row & 63u);
    w = value ? (w | m) : (w & ~m);
  }

  std::span<const std::uint64_t> output_words(int output) const noexcept {
    return {words_.data() + static_cast<std::size_t>(output) * words_per_output_, words_per_output_};
  }
  std::span<std::uint64_t> output_words(int output) noexcept {
    return {words_.data() + static_cast<std::size_t>(output) * words_per_output_, words_per_output_};
  }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// Mask of valid bits in each word of an output (all ones once rows >= 64).
  std::uint64_t word_mask() const noexcept {
    return inputs_ >= 6 ? ~std::uint64_t{0} : ((std::uint64_t{1} << rows()) - 1);
  }

  /// One '0'/'1' string per output, row 0 first, outputs separated by '|'.
  std::string to_string() const;

  friend bool operator==(const TruthTable& a, const TruthTable& b) noexcept {
    return a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_ && a.words_ == b.words_;
  }

 private:
  std::size_t word_index(int output, std::size_t row) const noexcept {
    return static_cast<std::size_t>(output) * words_per_output_ + (row >> 6);
  }

  int inputs_;
  int outputs_;
  std::size_t words_per_output_;
  std::vector<std::uint64_t> words_;
};

/// Number of positions at which two tables of identical shape agree.
std::size_t matching_bits(const TruthTable& a, const TruthTable& b);

/// Seed of the signature hash; part of the event-log reproducibility contract.
inline constexpr std::uint64_t kSignatureHashSeed = 0x6E616E646576306Full;

/// Stable 64-bit hash of a table.
///
/// Byte serialization: inputs as one byte, outputs as a 4-byte little-endian
/// integer, then every storage word of every output as 8 little-endian bytes,
/// outputs in order. The bytes are hashed with FNV-1a 64 whose offset basis
/// is xor-ed with `seed`.
std::uint64_t stable_hash(const TruthTable& table, std::uint64_t seed = kSignatureHashSeed);

/// Canonical functionality key: arities plus output bits, compared bit-exactly.
class Signature {
 public:
  explicit Signature(TruthTable table)
      : table_(std::make_shared<const TruthTable>(std::move(table))), hash_(stable_hash(*table_)) {}

  const TruthTable& table() const noexcept { return *table_; }
  std::uint64_t hash() const noexcept { return hash_; }
  int inputs() const noexcept { return table_->inputs(); }
  int outputs() const noexcept { return table_->outputs(); }

  friend bool operator==(const Signature& a, const Signature& b) noexcept {
    return a.hash_ == b.hash_ && (a.table_ == b.table_ || *a.table_ == *b.table_);
  }

 private:
  std::shared_ptr<const TruthTable> table_;
  std::uint64_t hash_;
};

inline Signature signature_of(const TruthTable& table) { return Signature(table); }

struct SignatureHash {
  std::size_t operator()(const Signature& s) const noexcept { return static_cast<std::size_t>(s.hash()); }
};

}  // namespace nandevo
