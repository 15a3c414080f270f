#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "nandevo/circuit.hpp"
#include "nandevo/compose.hpp"
#include "nandevo/goals.hpp"
#include "nandevo/random.hpp"

namespace nandevo {

/// Active circuits keyed by signature. Iteration order is insertion order;
/// an improvement takes over the slot of the circuit it replaces.
class Pool {
 public:
  const PooledCircuit* find(const Signature& signature) const;

  /// The selectable members, in deterministic order.
  std::span<const std::shared_ptr<const PooledCircuit>> active() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  int replaced_count() const noexcept { return replaced_; }

  /// Adds a circuit with a signature that is not yet active.
  void insert(std::shared_ptr<const PooledCircuit> circuit);
  /// Replaces the active circuit of the same signature; the cost must drop.
  void replace(std::shared_ptr<const PooledCircuit> circuit);

 private:
  std::vector<std::shared_ptr<const PooledCircuit>> entries_;
  std::unordered_map<Signature, std::size_t, SignatureHash> index_;
  int replaced_ = 0;
};

/// Signature of the two-input NAND primitive, which every pool implicitly
/// holds at cost 1.
const Signature& nand_signature();

struct GoalMetInvention {
  std::size_t goal;
};
/// Goals whose best closeness the circuit strictly exceeds, with the
/// closeness it achieves on each.
struct PartialInvention {
  std::vector<std::size_t> goals;
  std::vector<double> closeness;
};
struct Improvement {
  int old_cost;
  int new_cost;
};
struct Junk {};

using Classification = std::variant<GoalMetInvention, PartialInvention, Improvement, Junk>;

enum class EventKind { goal, invention, improvement, junk };

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view text) noexcept;

struct Event {
  int trial;
  int agent;
  EventKind kind;
  std::string goal;  ///< goal name(s) joined by '|', empty when none applies
  int cost;
  std::optional<double> closeness;
  bool accepted;
};

struct EngineParams {
  ComposeParams compose;
  int group_size = 1;
  int max_trials = 100000;
  bool keep_drafts = false;        ///< store full drafts for pool members
  std::size_t max_pool_size = 0;   ///< 0 means unbounded
};

void validate(const EngineParams& params);

/// Raised when the pool outgrows `max_pool_size`.
class ResourceExhausted : public std::runtime_error {
 public:
  ResourceExhausted(int trial, const std::string& what)
      : std::runtime_error("resource exhausted at trial " + std::to_string(trial) + ": " + what), trial_(trial) {}
  int trial() const noexcept { return trial_; }

 private:
  int trial_;
};

struct EngineState {
  Pool pool;
  std::vector<GoalState> goals;  ///< parallel to builtin_goals()
  int trial = 0;                 ///< number of completed trials
  std::vector<Rng> rngs;         ///< one stream per agent
  std::vector<Event> events;

  bool all_goals_met() const noexcept;
};

/// Fresh state: empty pool, no goals met, one seeded stream per agent.
EngineState make_engine_state(const EngineParams& params, std::uint64_t seed);

/// Seed of agent `agent`'s stream within a replication seeded with `seed`.
std::uint64_t agent_seed(std::uint64_t seed, int agent) noexcept;

/// Classifies a candidate against start-of-trial snapshots, in order:
/// improvement or junk for an active signature, goal-met invention for an
/// unmet goal's exact table, partial invention when some goal's closeness
/// is strictly exceeded, junk otherwise.
Classification classify(const Circuit& candidate, const Pool& pool, std::span<const GoalState> goals);

struct AgentResult {
  int agent;
  Circuit circuit;
  Classification classification;
};

/// Applies one trial's results, all classified against the same snapshot.
/// Non-junk circuits are grouped by signature and the cheapest of each group
/// (lowest agent on ties) enters the pool. One event per agent is recorded,
/// plus a `goal` event ahead of the `invention` event of each goal-met
/// invention.
void merge_trial(std::vector<AgentResult> results, EngineState& state, const EngineParams& params);

/// One trial: every agent composes against the same pool snapshot, then a
/// single merge.
void run_trial(EngineState& state, const EngineParams& params);

bool terminated(const EngineState& state, const EngineParams& params) noexcept;

struct ReplicationSummary {
  int termination_trial = 0;
  int goals_met = 0;
  long inventions = 0;
  long improvements = 0;
  long junk = 0;
  std::size_t pool_size = 0;
  int replaced_count = 0;
  std::vector<std::optional<int>> goal_costs;  ///< final pool cost per goal
};

struct ReplicationResult {
  std::vector<Event> events;
  ReplicationSummary summary;
  std::vector<GoalState> goals;
  Pool pool;
};

/// Runs trials until every goal is met or max_trials is reached.
ReplicationResult run_replication(const EngineParams& params, std::uint64_t seed);

ReplicationSummary summarize(const EngineState& state);

}  // namespace nandevo
