#include "nandevo/engine.hpp"

#include <algorithm>

namespace nandevo {

namespace {

const std::unordered_map<Signature, std::size_t, SignatureHash>& goal_lookup() {
  static const auto lookup = [] {
    std::unordered_map<Signature, std::size_t, SignatureHash> m;
    const auto goals = builtin_goals();
    for (std::size_t i = 0; i < goals.size(); ++i) m.emplace(Signature(goals[i].table), i);
    return m;
  }();
  return lookup;
}

std::optional<std::size_t> goal_of(const Signature& signature) {
  const auto& lookup = goal_lookup();
  if (auto it = lookup.find(signature); it != lookup.end()) return it->second;
  return std::nullopt;
}

std::string joined_goal_names(const std::vector<std::size_t>& indices) {
  const auto goals = builtin_goals();
  std::string s;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0) s.push_back('|');
    s += goals[indices[i]].name;
  }
  return s;
}

}  // namespace

const PooledCircuit* Pool::find(const Signature& signature) const {
  if (auto it = index_.find(signature); it != index_.end()) return entries_[it->second].get();
  return nullptr;
}

void Pool::insert(std::shared_ptr<const PooledCircuit> circuit) {
  const auto [it, inserted] = index_.try_emplace(circuit->signature, entries_.size());
  if (!inserted) throw std::logic_error("pool insert: signature already active");
  entries_.push_back(std::move(circuit));
}

void Pool::replace(std::shared_ptr<const PooledCircuit> circuit) {
  const auto it = index_.find(circuit->signature);
  if (it == index_.end()) throw std::logic_error("pool replace: signature not active");
  auto& slot = entries_[it->second];
  if (circuit->cost >= slot->cost) throw std::logic_error("pool replace: cost must strictly decrease");
  slot = std::move(circuit);
  ++replaced_;
}

const Signature& nand_signature() {
  static const Signature nand = [] {
    TruthTable t(2, 1);
    for (std::size_t p = 0; p < 4; ++p) t.set_bit(0, p, p != 3);
    return Signature(std::move(t));
  }();
  return nand;
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::goal: return "goal";
    case EventKind::invention: return "invention";
    case EventKind::improvement: return "improvement";
    case EventKind::junk: return "junk";
  }
  return "junk";
}

std::optional<EventKind> parse_event_kind(std::string_view text) noexcept {
  for (auto k : {EventKind::goal, EventKind::invention, EventKind::improvement, EventKind::junk})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

void validate(const EngineParams& params) {
  validate(params.compose);
  if (params.group_size < 1) throw std::invalid_argument("group size must be positive");
  if (params.max_trials < 1) throw std::invalid_argument("max_trials must be at least 1");
}

bool EngineState::all_goals_met() const noexcept {
  return std::all_of(goals.begin(), goals.end(), [](const GoalState& g) { return g.met; });
}

std::uint64_t agent_seed(std::uint64_t seed, int agent) noexcept {
  return splitmix64(splitmix64(seed) ^ (0xA6E47ull + static_cast<std::uint64_t>(agent)));
}

EngineState make_engine_state(const EngineParams& params, std::uint64_t seed) {
  validate(params);
  EngineState state;
  state.goals.resize(builtin_goals().size());
  state.rngs.reserve(static_cast<std::size_t>(params.group_size));
  for (int a = 0; a < params.group_size; ++a) state.rngs.emplace_back(agent_seed(seed, a));
  return state;
}

Classification classify(const Circuit& candidate, const Pool& pool, std::span<const GoalState> goal_states) {
  const Signature& sig = candidate.signature;
  int incumbent_cost = 0;
  if (const auto* incumbent = pool.find(sig))
    incumbent_cost = incumbent->cost;
  else if (sig == nand_signature())
    incumbent_cost = 1;
  if (incumbent_cost > 0) {
    if (candidate.cost < incumbent_cost) return Improvement{incumbent_cost, candidate.cost};
    return Junk{};
  }

  if (auto g = goal_of(sig); g && !goal_states[*g].met) return GoalMetInvention{*g};

  const auto goals = builtin_goals();
  PartialInvention partial;
  for (std::size_t g = 0; g < goals.size(); ++g) {
    if (goals[g].inputs() != sig.inputs() || goals[g].outputs() != sig.outputs()) continue;
    const double c = closeness(sig.table(), goals[g]);
    if (c > goal_states[g].best_closeness) {
      partial.goals.push_back(g);
      partial.closeness.push_back(c);
    }
  }
  if (!partial.goals.empty()) return partial;
  return Junk{};
}

void merge_trial(std::vector<AgentResult> results, EngineState& state, const EngineParams& params) {
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.agent < b.agent; });

  // Winner per signature: minimum cost, then lowest agent.
  std::unordered_map<Signature, std::size_t, SignatureHash> winner;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (std::holds_alternative<Junk>(results[i].classification)) continue;
    auto [it, inserted] = winner.try_emplace(results[i].circuit.signature, i);
    if (!inserted && results[i].circuit.cost < results[it->second].circuit.cost) it->second = i;
  }
  std::vector<bool> accepted(results.size(), false);
  for (const auto& [sig, i] : winner) accepted[i] = true;

  const auto goals = builtin_goals();
  const int trial = state.trial + 1;
  const auto& goal_sigs = goal_lookup();

  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    const int cost = r.circuit.cost;
    const auto goal = [&]() -> std::optional<std::size_t> {
      if (auto it = goal_sigs.find(r.circuit.signature); it != goal_sigs.end()) return it->second;
      return std::nullopt;
    }();

    if (accepted[i]) {
      auto pooled = std::make_shared<PooledCircuit>(PooledCircuit{
          r.circuit.signature, cost, r.circuit.created_trial, r.circuit.creator_agent,
          params.keep_drafts ? std::optional<CircuitDraft>(std::move(r.circuit.draft)) : std::nullopt});
      if (std::holds_alternative<Improvement>(r.classification)) {
        if (state.pool.find(r.circuit.signature) != nullptr) state.pool.replace(std::move(pooled));
        // A NAND-equivalent circuit can never be cheaper than the primitive.
      } else {
        state.pool.insert(std::move(pooled));
      }
      if (goal) state.goals[*goal].current_pool_cost = cost;
    }

    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, GoalMetInvention>) {
            auto& gs = state.goals[c.goal];
            if (!gs.met) {
              gs.met = true;
              gs.met_trial = trial;
            }
            gs.best_closeness = 1.0;
            state.events.push_back({trial, r.agent, EventKind::goal, goals[c.goal].name, cost, 1.0, accepted[i]});
            state.events.push_back(
                {trial, r.agent, EventKind::invention, goals[c.goal].name, cost, 1.0, accepted[i]});
          } else if constexpr (std::is_same_v<T, PartialInvention>) {
            double best = 0.0;
            for (std::size_t k = 0; k < c.goals.size(); ++k) {
              auto& gs = state.goals[c.goals[k]];
              gs.best_closeness = std::max(gs.best_closeness, c.closeness[k]);
              best = std::max(best, c.closeness[k]);
            }
            state.events.push_back(
                {trial, r.agent, EventKind::invention, joined_goal_names(c.goals), cost, best, accepted[i]});
          } else if constexpr (std::is_same_v<T, Improvement>) {
            state.events.push_back({trial, r.agent, EventKind::improvement, goal ? goals[*goal].name : std::string{},
                                    cost, std::nullopt, accepted[i]});
          } else {
            state.events.push_back({trial, r.agent, EventKind::junk, std::string{}, cost, std::nullopt, false});
          }
        },
        r.classification);
  }

  state.trial = trial;
  if (params.max_pool_size != 0 && state.pool.size() > params.max_pool_size)
    throw ResourceExhausted(trial, "pool holds " + std::to_string(state.pool.size()) + " circuits, limit is " +
                                       std::to_string(params.max_pool_size));
}

void run_trial(EngineState& state, const EngineParams& params) {
  const int trial = state.trial + 1;
  const auto snapshot = state.pool.active();
  std::vector<AgentResult> results;
  results.reserve(static_cast<std::size_t>(params.group_size));
  for (int a = 0; a < params.group_size; ++a) {
    CircuitDraft draft = compose_random(snapshot, params.compose, state.rngs[static_cast<std::size_t>(a)]);
    Circuit circuit = make_circuit(std::move(draft), trial, a);
    Classification cls = classify(circuit, state.pool, state.goals);
    results.push_back({a, std::move(circuit), std::move(cls)});
  }
  merge_trial(std::move(results), state, params);
}

bool terminated(const EngineState& state, const EngineParams& params) noexcept {
  return state.trial >= params.max_trials || state.all_goals_met();
}

ReplicationSummary summarize(const EngineState& state) {
  ReplicationSummary s;
  s.termination_trial = state.trial;
  s.goals_met = static_cast<int>(std::count_if(state.goals.begin(), state.goals.end(), [](auto& g) { return g.met; }));
  for (const auto& e : state.events) {
    switch (e.kind) {
      case EventKind::invention: ++s.inventions; break;
      case EventKind::improvement: ++s.improvements; break;
      case EventKind::junk: ++s.junk; break;
      case EventKind::goal: break;
    }
  }
  s.pool_size = state.pool.size();
  s.replaced_count = state.pool.replaced_count();
  for (const auto& g : state.goals) s.goal_costs.push_back(g.current_pool_cost);
  return s;
}

ReplicationResult run_replication(const EngineParams& params, std::uint64_t seed) {
  EngineState state = make_engine_state(params, seed);
  while (!terminated(state, params)) run_trial(state, params);
  ReplicationSummary summary = summarize(state);
  return {std::move(state.events), std::move(summary), std::move(state.goals), std::move(state.pool)};
}

}  // namespace nandevo
