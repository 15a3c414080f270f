#include "nandevo/goals.hpp"

#include <functional>

namespace nandevo {

namespace {

TruthTable single_output(int inputs, const std::function<bool(std::size_t)>& f) {
  TruthTable t(inputs, 1);
  for (std::size_t p = 0; p < t.rows(); ++p) t.set_bit(0, p, f(p));
  return t;
}

TruthTable adder(int n) {
  TruthTable t(2 * n, n + 1);
  const std::size_t mask = (std::size_t{1} << n) - 1;
  for (std::size_t p = 0; p < t.rows(); ++p) {
    const std::size_t sum = (p & mask) + ((p >> n) & mask);
    for (int o = 0; o <= n; ++o) t.set_bit(o, p, (sum >> o) & 1u);
  }
  return t;
}

std::vector<GoalSpec> make_goals() {
  auto bit = [](std::size_t p, int i) { return ((p >> i) & 1u) != 0; };
  std::vector<GoalSpec> goals;
  goals.push_back({"NOT", single_output(1, [&](std::size_t p) { return !bit(p, 0); })});
  goals.push_back({"IMPLY", single_output(2, [&](std::size_t p) { return bit(p, 0) || !bit(p, 1); })});
  goals.push_back({"AND", single_output(2, [&](std::size_t p) { return bit(p, 0) && bit(p, 1); })});
  goals.push_back({"OR", single_output(2, [&](std::size_t p) { return bit(p, 0) || bit(p, 1); })});
  goals.push_back({"XOR", single_output(2, [&](std::size_t p) { return bit(p, 0) != bit(p, 1); })});
  goals.push_back({"EQUIV", single_output(2, [&](std::size_t p) { return bit(p, 0) == bit(p, 1); })});
  goals.push_back({"3WAY-AND", single_output(3, [&](std::size_t p) { return p == 7; })});

  TruthTable full(3, 2);
  for (std::size_t p = 0; p < 8; ++p) {
    const int sum = bit(p, 0) + bit(p, 1) + bit(p, 2);
    full.set_bit(0, p, sum >= 2);
    full.set_bit(1, p, sum & 1);
  }
  goals.push_back({"FULL-ADDER", std::move(full)});

  for (int n = 1; n <= 8; ++n) goals.push_back({"ADDER-" + std::to_string(n), adder(n)});
  return goals;
}

}  // namespace

std::span<const GoalSpec> builtin_goals() {
  static const std::vector<GoalSpec> goals = make_goals();
  return goals;
}

std::optional<std::size_t> goal_index(const std::string& name) {
  const auto goals = builtin_goals();
  for (std::size_t i = 0; i < goals.size(); ++i)
    if (goals[i].name == name) return i;
  return std::nullopt;
}

double closeness(const TruthTable& candidate, const GoalSpec& goal) {
  if (candidate.inputs() != goal.inputs() || candidate.outputs() != goal.outputs()) return 0.0;
  return static_cast<double>(matching_bits(candidate, goal.table)) / static_cast<double>(goal.table.bit_count());
}

}  // namespace nandevo
