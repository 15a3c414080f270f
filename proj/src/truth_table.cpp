#include "nandevo/truth_table.hpp"

#include <bit>
#include <stdexcept>

namespace nandevo {

TruthTable::TruthTable(int inputs, int outputs) : inputs_(inputs), outputs_(outputs) {
  if (inputs < 0 || inputs > kMaxInputs) throw std::invalid_argument("truth table input arity out of range");
  if (outputs < 1) throw std::invalid_argument("truth table needs at least one output");
  words_per_output_ = inputs >= 6 ? (std::size_t{1} << (inputs - 6)) : 1;
  words_.assign(words_per_output_ * static_cast<std::size_t>(outputs), 0);
}

std::string TruthTable::to_string() const {
  std::string s;
  s.reserve(bit_count() + static_cast<std::size_t>(outputs_));
  for (int o = 0; o < outputs_; ++o) {
    if (o > 0) s.push_back('|');
    for (std::size_t r = 0; r < rows(); ++r) s.push_back(bit(o, r) ? '1' : '0');
  }
  return s;
}

std::size_t matching_bits(const TruthTable& a, const TruthTable& b) {
  if (a.inputs() != b.inputs() || a.outputs() != b.outputs())
    throw std::invalid_argument("matching_bits: table shapes differ");
  const std::uint64_t mask = a.word_mask();
  std::size_t n = 0;
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) n += static_cast<std::size_t>(std::popcount(~(wa[i] ^ wb[i]) & mask));
  return n;
}

std::uint64_t stable_hash(const TruthTable& table, std::uint64_t seed) {
  constexpr std::uint64_t kPrime = 0x100000001B3ull;
  std::uint64_t h = 0xCBF29CE484222325ull ^ seed;
  auto feed = [&](std::uint64_t value, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      h ^= (value >> (8 * i)) & 0xFFu;
      h *= kPrime;
    }
  };
  feed(static_cast<std::uint64_t>(table.inputs()), 1);
  feed(static_cast<std::uint64_t>(table.outputs()), 4);
  for (std::uint64_t w : table.words()) feed(w, 8);
  return h;
}

}  // namespace nandevo
