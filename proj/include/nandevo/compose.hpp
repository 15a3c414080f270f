#pragma once

#include <memory>
#include <span>

#include "nandevo/circuit.hpp"
#include "nandevo/random.hpp"

namespace nandevo {

/// Choice-function and size parameters of random composition.
struct ComposeParams {
  double p_const = 0.05;  ///< per draw: a constant source (true/false equally)
  double p_nand = 0.50;   ///< per draw: a NAND primitive; the rest goes to the pool
  int min_components = kMinComponents;
  int max_components = kMaxComponents;
  int input_cap = kMaxExternalInputs;
};

/// Throws std::invalid_argument when the parameters are out of range.
void validate(const ComposeParams& params);

/// Randomly composes a draft from NAND primitives, constants and pool members.
///
/// The number of countable components is uniform in
/// [min_components, max_components]. Each draw of the choice function yields
/// a constant with probability p_const, a NAND primitive with probability
/// p_nand and otherwise a uniformly chosen pool member (NAND when the pool
/// is empty). A constant does not fill a slot; it becomes a wiring source
/// for all later terminals.
///
/// Components are wired in slot order. Each input terminal picks uniformly
/// among the outputs of earlier components, the existing external inputs,
/// the constants drawn so far and one fresh external input. The fresh
/// candidate disappears once input_cap external inputs exist; a terminal
/// with no candidate at all gets a fresh input regardless.
CircuitDraft compose_random(std::span<const std::shared_ptr<const PooledCircuit>> pool, const ComposeParams& params,
                            Rng& rng);

}  // namespace nandevo
