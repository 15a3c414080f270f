#include "nandevo/circuit.hpp"

#include <array>
#include <cstdint>

namespace nandevo {

namespace {

// Bit patterns of the first six external inputs inside one 64-row word.
constexpr std::array<std::uint64_t, 6> kInputPattern = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string describe(std::size_t component, std::size_t terminal, const std::string& what) {
  return "component " + std::to_string(component) + " input " + std::to_string(terminal) + ": " + what;
}

// Signal storage for one evaluation: every component output as a run of
// words, plus shared constant and external-input words.
class SignalBank {
 public:
  SignalBank(const CircuitDraft& draft, std::size_t words, std::uint64_t mask)
      : words_(words), mask_(mask), offsets_(draft.components.size()) {
    std::size_t total = 0;
    for (std::size_t c = 0; c < draft.components.size(); ++c) {
      offsets_[c] = total;
      total += static_cast<std::size_t>(draft.components[c].output_arity()) * words;
    }
    data_.assign(total, 0);
    ones_.assign(words, mask);
    zeros_.assign(words, 0);
    inputs_.resize(static_cast<std::size_t>(draft.external_inputs) * words);
    for (int i = 0; i < draft.external_inputs; ++i) {
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t v;
        if (i < 6)
          v = kInputPattern[static_cast<std::size_t>(i)];
        else
          v = ((w >> (i - 6)) & 1u) ? ~std::uint64_t{0} : 0;
        inputs_[static_cast<std::size_t>(i) * words + w] = v & mask;
      }
    }
  }

  const std::uint64_t* source(const SourceRef& ref) const {
    return std::visit(
        Overloaded{
            [&](const ExternalInput& e) { return inputs_.data() + static_cast<std::size_t>(e.index) * words_; },
            [&](const ConstantTrue&) { return ones_.data(); },
            [&](const ConstantFalse&) { return zeros_.data(); },
            [&](const ComponentOutput& c) { return output(c.component, c.output); },
        },
        ref);
  }

  const std::uint64_t* output(int component, int out) const {
    return data_.data() + offsets_[static_cast<std::size_t>(component)] + static_cast<std::size_t>(out) * words_;
  }
  std::uint64_t* output(int component, int out) {
    return data_.data() + offsets_[static_cast<std::size_t>(component)] + static_cast<std::size_t>(out) * words_;
  }

  std::size_t words() const { return words_; }
  std::uint64_t mask() const { return mask_; }

 private:
  std::size_t words_;
  std::uint64_t mask_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint64_t> data_;
  std::vector<std::uint64_t> ones_;
  std::vector<std::uint64_t> zeros_;
  std::vector<std::uint64_t> inputs_;
};

// Pooled component, bit-parallel: Shannon expansion of each output over its
// inputs, one word of rows at a time. Cost per word is 2^k.
void apply_table_shannon(const TruthTable& table, const std::vector<const std::uint64_t*>& in, SignalBank& bank,
                         int component) {
  const int k = table.inputs();
  const std::size_t leaves = table.rows();
  std::vector<std::uint64_t> scratch(leaves);
  for (int o = 0; o < table.outputs(); ++o) {
    std::uint64_t* out = bank.output(component, o);
    for (std::size_t w = 0; w < bank.words(); ++w) {
      for (std::size_t r = 0; r < leaves; ++r) scratch[r] = table.bit(o, r) ? ~std::uint64_t{0} : 0;
      std::size_t width = leaves;
      for (int i = 0; i < k; ++i) {
        const std::uint64_t x = in[static_cast<std::size_t>(i)][w];
        width >>= 1;
        for (std::size_t r = 0; r < width; ++r) scratch[r] = (x & scratch[2 * r + 1]) | (~x & scratch[2 * r]);
      }
      out[w] = scratch[0] & bank.mask();
    }
  }
}

// Pooled component, one row at a time. Cheaper than Shannon for wide tables.
void apply_table_rows(const TruthTable& table, const std::vector<const std::uint64_t*>& in, SignalBank& bank,
                      int component, std::size_t rows) {
  const int k = table.inputs();
  for (std::size_t p = 0; p < rows; ++p) {
    const std::size_t w = p >> 6;
    const unsigned b = static_cast<unsigned>(p & 63u);
    std::size_t idx = 0;
    for (int i = 0; i < k; ++i) idx |= static_cast<std::size_t>((in[static_cast<std::size_t>(i)][w] >> b) & 1u) << i;
    for (int o = 0; o < table.outputs(); ++o)
      if (table.bit(o, idx)) bank.output(component, o)[w] |= std::uint64_t{1} << b;
  }
}

}  // namespace

int ComponentInstance::input_arity() const noexcept {
  if (const auto* p = std::get_if<PooledComponent>(&kind)) return p->circuit ? p->circuit->inputs() : 0;
  return 2;
}

int ComponentInstance::output_arity() const noexcept {
  if (const auto* p = std::get_if<PooledComponent>(&kind)) return p->circuit ? p->circuit->outputs() : 0;
  return 1;
}

int ComponentInstance::cost() const noexcept {
  if (const auto* p = std::get_if<PooledComponent>(&kind)) return p->circuit ? p->circuit->cost : 0;
  return 1;
}

void validate(const CircuitDraft& draft) {
  const auto n = draft.components.size();
  if (n < static_cast<std::size_t>(kMinComponents) || n > static_cast<std::size_t>(kMaxComponents))
    throw StructuralError("component count " + std::to_string(n) + " outside [2, 12]");
  if (draft.external_inputs < 0 || draft.external_inputs > kMaxExternalInputs)
    throw StructuralError("external input count " + std::to_string(draft.external_inputs) + " outside [0, 16]");
  for (std::size_t c = 0; c < n; ++c) {
    const auto& comp = draft.components[c];
    if (const auto* p = std::get_if<PooledComponent>(&comp.kind); p && !p->circuit)
      throw StructuralError("component " + std::to_string(c) + " references no pooled circuit");
    if (comp.inputs.size() != static_cast<std::size_t>(comp.input_arity()))
      throw StructuralError("component " + std::to_string(c) + " has " + std::to_string(comp.inputs.size()) +
                            " inputs, arity is " + std::to_string(comp.input_arity()));
    for (std::size_t t = 0; t < comp.inputs.size(); ++t) {
      const auto& src = comp.inputs[t];
      if (const auto* e = std::get_if<ExternalInput>(&src)) {
        if (e->index < 0 || e->index >= draft.external_inputs)
          throw StructuralError(describe(c, t, "external input " + std::to_string(e->index) + " out of range"));
      } else if (const auto* o = std::get_if<ComponentOutput>(&src)) {
        if (o->component < 0 || static_cast<std::size_t>(o->component) >= c)
          throw StructuralError(describe(c, t, "reference to component " + std::to_string(o->component) +
                                                   " is not strictly earlier"));
        if (o->output < 0 || o->output >= draft.components[static_cast<std::size_t>(o->component)].output_arity())
          throw StructuralError(describe(c, t, "output index " + std::to_string(o->output) + " out of range"));
      }
    }
  }
}

std::vector<ComponentOutput> dangling_outputs(const CircuitDraft& draft) {
  std::vector<std::vector<bool>> used(draft.components.size());
  for (std::size_t c = 0; c < draft.components.size(); ++c)
    used[c].assign(static_cast<std::size_t>(draft.components[c].output_arity()), false);
  for (const auto& comp : draft.components)
    for (const auto& src : comp.inputs)
      if (const auto* o = std::get_if<ComponentOutput>(&src))
        used[static_cast<std::size_t>(o->component)][static_cast<std::size_t>(o->output)] = true;
  std::vector<ComponentOutput> out;
  for (std::size_t c = 0; c < used.size(); ++c)
    for (std::size_t o = 0; o < used[c].size(); ++o)
      if (!used[c][o]) out.push_back({static_cast<int>(c), static_cast<int>(o)});
  return out;
}

TruthTable evaluate(const CircuitDraft& draft) {
  validate(draft);
  const auto outputs = dangling_outputs(draft);
  TruthTable result(draft.external_inputs, static_cast<int>(outputs.size()));
  SignalBank bank(draft, result.words_per_output(), result.word_mask());
  const std::size_t words = bank.words();

  std::vector<const std::uint64_t*> in;
  for (std::size_t c = 0; c < draft.components.size(); ++c) {
    const auto& comp = draft.components[c];
    in.clear();
    for (const auto& src : comp.inputs) in.push_back(bank.source(src));
    const int ci = static_cast<int>(c);
    if (comp.is_nand()) {
      std::uint64_t* out = bank.output(ci, 0);
      for (std::size_t w = 0; w < words; ++w) out[w] = ~(in[0][w] & in[1][w]) & bank.mask();
      continue;
    }
    const TruthTable& table = std::get<PooledComponent>(comp.kind).circuit->signature.table();
    const auto k = static_cast<std::size_t>(table.inputs());
    const auto o = static_cast<std::size_t>(table.outputs());
    if ((o << k) <= 64 * (k + o))
      apply_table_shannon(table, in, bank, ci);
    else
      apply_table_rows(table, in, bank, ci, result.rows());
  }

  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const std::uint64_t* src = bank.output(outputs[i].component, outputs[i].output);
    auto dst = result.output_words(static_cast<int>(i));
    for (std::size_t w = 0; w < words; ++w) dst[w] = src[w];
  }
  return result;
}

int cost(const CircuitDraft& draft) {
  validate(draft);
  int total = 0;
  for (const auto& comp : draft.components) total += comp.cost();
  return total;
}

Circuit make_circuit(CircuitDraft draft, int trial, int agent) {
  TruthTable table = evaluate(draft);
  int c = 0;
  for (const auto& comp : draft.components) c += comp.cost();
  return Circuit{std::move(draft), Signature(std::move(table)), c, trial, agent};
}

}  // namespace nandevo
