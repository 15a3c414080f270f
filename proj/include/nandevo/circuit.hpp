#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nandevo/truth_table.hpp"

namespace nandevo {

/// Thrown for drafts that violate the structural invariants.
class StructuralError : public std::runtime_error {
 public:
  explicit StructuralError(const std::string& what) : std::runtime_error("structural error: " + what) {}
};

inline constexpr int kMinComponents = 2;
inline constexpr int kMaxComponents = 12;
inline constexpr int kMaxExternalInputs = TruthTable::kMaxInputs;

// Wiring sources. A component may only read outputs of components with a
// smaller index, which makes every draft acyclic by construction.
struct ExternalInput {
  int index;
  friend bool operator==(const ExternalInput&, const ExternalInput&) = default;
};
struct ConstantTrue {
  friend bool operator==(const ConstantTrue&, const ConstantTrue&) = default;
};
struct ConstantFalse {
  friend bool operator==(const ConstantFalse&, const ConstantFalse&) = default;
};
struct ComponentOutput {
  int component;
  int output;
  friend bool operator==(const ComponentOutput&, const ComponentOutput&) = default;
};

using SourceRef = std::variant<ExternalInput, ConstantTrue, ConstantFalse, ComponentOutput>;

struct PooledCircuit;

struct NandPrimitive {};

/// Reference to a circuit that was active in the pool when the draft was made.
/// The referenced object is immutable, so its cost stays frozen.
struct PooledComponent {
  std::shared_ptr<const PooledCircuit> circuit;
};

struct ComponentInstance {
  std::variant<NandPrimitive, PooledComponent> kind;
  std::vector<SourceRef> inputs;

  bool is_nand() const noexcept { return std::holds_alternative<NandPrimitive>(kind); }
  int input_arity() const noexcept;
  int output_arity() const noexcept;
  int cost() const noexcept;
};

struct CircuitDraft {
  std::vector<ComponentInstance> components;
  int external_inputs = 0;
};

/// Pool member. The draft is retained only when the engine keeps drafts.
struct PooledCircuit {
  Signature signature;
  int cost;
  int created_trial = 0;
  int creator_agent = 0;
  std::optional<CircuitDraft> draft;

  int inputs() const noexcept { return signature.inputs(); }
  int outputs() const noexcept { return signature.outputs(); }
};

/// Throws StructuralError unless the draft satisfies every draft invariant.
void validate(const CircuitDraft& draft);

/// Truth table of the draft. Outputs are the dangling component outputs in
/// (component, output) order.
TruthTable evaluate(const CircuitDraft& draft);

/// Total NAND count: 1 per primitive, the frozen cost per pooled component.
int cost(const CircuitDraft& draft);

/// Dangling outputs of a validated draft, in evaluation output order.
std::vector<ComponentOutput> dangling_outputs(const CircuitDraft& draft);

/// A composed and evaluated circuit.
struct Circuit {
  CircuitDraft draft;
  Signature signature;
  int cost;
  int created_trial;
  int creator_agent;

  const TruthTable& table() const noexcept { return signature.table(); }
};

Circuit make_circuit(CircuitDraft draft, int trial, int agent);

}  // namespace nandevo
