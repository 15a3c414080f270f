#include <doctest.h>

#include <set>

#include "nandevo/compose.hpp"
#include "nandevo/engine.hpp"

using namespace nandevo;

namespace {

bool same_draft(const CircuitDraft& a, const CircuitDraft& b) {
  if (a.external_inputs != b.external_inputs || a.components.size() != b.components.size()) return false;
  for (std::size_t i = 0; i < a.components.size(); ++i) {
    const auto& x = a.components[i];
    const auto& y = b.components[i];
    if (x.is_nand() != y.is_nand() || x.inputs != y.inputs) return false;
    if (!x.is_nand() &&
        std::get<PooledComponent>(x.kind).circuit != std::get<PooledComponent>(y.kind).circuit)
      return false;
  }
  return true;
}

int countable(const CircuitDraft& d) { return static_cast<int>(d.components.size()); }

void check_acyclic(const CircuitDraft& d) {
  for (std::size_t c = 0; c < d.components.size(); ++c)
    for (const auto& s : d.components[c].inputs)
      if (const auto* o = std::get_if<ComponentOutput>(&s)) REQUIRE(static_cast<std::size_t>(o->component) < c);
}

}  // namespace

TEST_CASE("empty pool composes only NAND primitives") {
  ComposeParams params;
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const auto d = compose_random({}, params, rng);
    for (const auto& c : d.components) REQUIRE(c.is_nand());
    REQUIRE(countable(d) >= 2);
    REQUIRE(countable(d) <= 12);
    check_acyclic(d);
    REQUIRE_NOTHROW(validate(d));
  }
}

TEST_CASE("composition is deterministic for a fixed seed") {
  EngineParams ep;
  ep.max_trials = 300;
  const auto rep = run_replication(ep, 5);
  ComposeParams params;
  Rng a(42), b(42);
  for (int i = 0; i < 50; ++i)
    REQUIRE(same_draft(compose_random(rep.pool.active(), params, a), compose_random(rep.pool.active(), params, b)));
}

TEST_CASE("drafts respect bounds and reference only pool members") {
  EngineParams ep;
  ep.max_trials = 500;
  const auto rep = run_replication(ep, 9);
  REQUIRE(rep.pool.size() > 0);
  std::set<const PooledCircuit*> members;
  for (const auto& p : rep.pool.active()) members.insert(p.get());

  ComposeParams params;
  Rng rng(77);
  std::set<int> sizes;
  bool saw_pooled = false, saw_constant = false;
  for (int i = 0; i < 2000; ++i) {
    const auto d = compose_random(rep.pool.active(), params, rng);
    REQUIRE_NOTHROW(validate(d));
    check_acyclic(d);
    REQUIRE(d.external_inputs <= 16);
    sizes.insert(countable(d));
    for (const auto& c : d.components) {
      if (const auto* p = std::get_if<PooledComponent>(&c.kind)) {
        REQUIRE(members.count(p->circuit.get()) == 1);
        saw_pooled = true;
      }
      for (const auto& s : c.inputs)
        saw_constant |= std::holds_alternative<ConstantTrue>(s) || std::holds_alternative<ConstantFalse>(s);
    }
  }
  CHECK(sizes == std::set<int>{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  CHECK(saw_pooled);
  CHECK(saw_constant);
}

TEST_CASE("input cap bounds the number of external inputs") {
  ComposeParams params;
  params.input_cap = 3;
  params.min_components = 12;
  params.p_nand = 0.95;
  Rng rng(3);
  for (int i = 0; i < 300; ++i) REQUIRE(compose_random({}, params, rng).external_inputs <= 3);
}

TEST_CASE("compose parameter validation") {
  ComposeParams p;
  CHECK_NOTHROW(validate(p));
  p.p_const = 0.6;
  p.p_nand = 0.5;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = {};
  p.min_components = 1;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = {};
  p.max_components = 13;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = {};
  p.input_cap = 17;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
}
