#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nandevo/truth_table.hpp"

namespace nandevo {

struct GoalSpec {
  std::string name;
  TruthTable table;

  int inputs() const noexcept { return table.inputs(); }
  int outputs() const noexcept { return table.outputs(); }
};

/// Progress toward one goal during a replication.
struct GoalState {
  bool met = false;
  std::optional<int> met_trial;
  double best_closeness = 0.0;
  std::optional<int> current_pool_cost;
};

inline constexpr std::size_t kGoalCount = 16;

/// The fixed registry of 16 goals, in the order
/// NOT, IMPLY, AND, OR, XOR, EQUIV, 3WAY-AND, FULL-ADDER, ADDER-1 ... ADDER-8.
///
/// IMPLY is false only for A=0, B=1 (input 0 is A). FULL-ADDER takes A, B,
/// C-in as inputs 0..2 and yields C-out as output 0 and S as output 1.
/// ADDER-n takes A0..A(n-1) then B0..B(n-1), LSB first, and yields
/// S0..Sn with Sn the final carry.
std::span<const GoalSpec> builtin_goals();

/// Index of a goal by its stable name, or nullopt.
std::optional<std::size_t> goal_index(const std::string& name);

/// Fraction of matching output bits; 0 when the arities differ.
double closeness(const TruthTable& candidate, const GoalSpec& goal);

}  // namespace nandevo
