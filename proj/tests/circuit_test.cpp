#include <doctest.h>

#include "nandevo/circuit.hpp"
#include "nandevo/compose.hpp"
#include "nandevo/engine.hpp"
#include "oracles.hpp"

using namespace nandevo;

namespace {

ComponentInstance nand(SourceRef a, SourceRef b) { return {NandPrimitive{}, {a, b}}; }

ComponentInstance pooled(std::shared_ptr<const PooledCircuit> c, std::vector<SourceRef> in) {
  return {PooledComponent{std::move(c)}, std::move(in)};
}

CircuitDraft and_draft() {
  CircuitDraft d;
  d.external_inputs = 2;
  d.components = {nand(ExternalInput{0}, ExternalInput{1}),
                  nand(ComponentOutput{0, 0}, ComponentOutput{0, 0})};
  return d;
}

std::shared_ptr<const PooledCircuit> pool_entry(CircuitDraft d) {
  const TruthTable t = evaluate(d);
  return std::make_shared<PooledCircuit>(PooledCircuit{Signature(t), cost(d), 1, 0, std::move(d)});
}

std::vector<std::vector<bool>> table_rows(const TruthTable& t) {
  std::vector<std::vector<bool>> rows;
  for (std::size_t p = 0; p < t.rows(); ++p) {
    std::vector<bool> r;
    for (int o = 0; o < t.outputs(); ++o) r.push_back(t.bit(o, p));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("NAND of NAND evaluates to AND") {
  const auto t = evaluate(and_draft());
  CHECK(t.inputs() == 2);
  CHECK(t.outputs() == 1);
  CHECK(t.to_string() == "0001");
  CHECK(cost(and_draft()) == 2);
}

TEST_CASE("NAND against a constant-one output is NOT") {
  CircuitDraft d;
  d.external_inputs = 1;
  d.components = {nand(ConstantFalse{}, ConstantFalse{}), nand(ExternalInput{0}, ComponentOutput{0, 0})};
  const auto t = evaluate(d);
  CHECK(t.outputs() == 1);
  CHECK(t.to_string() == "10");
}

TEST_CASE("constant-only draft yields one row per output") {
  CircuitDraft d;
  d.components = {nand(ConstantTrue{}, ConstantTrue{}), nand(ConstantTrue{}, ConstantFalse{})};
  const auto t = evaluate(d);
  CHECK(t.inputs() == 0);
  CHECK(t.outputs() == 2);
  CHECK(t.to_string() == "0|1");
}

TEST_CASE("outputs are the dangling outputs in component order") {
  CircuitDraft d;
  d.external_inputs = 2;
  d.components = {nand(ExternalInput{0}, ExternalInput{1}), nand(ExternalInput{0}, ExternalInput{0}),
                  nand(ComponentOutput{1, 0}, ExternalInput{1})};
  const auto outs = dangling_outputs(d);
  REQUIRE(outs.size() == 2);
  CHECK(outs[0] == ComponentOutput{0, 0});
  CHECK(outs[1] == ComponentOutput{2, 0});
  const auto t = evaluate(d);
  CHECK(t.to_string() == "1110|1101");
}

TEST_CASE("pooled cost adds the frozen cost") {
  auto and_entry = pool_entry(and_draft());
  CircuitDraft d;
  d.external_inputs = 2;
  d.components = {pooled(and_entry, {ExternalInput{0}, ExternalInput{1}}),
                  nand(ComponentOutput{0, 0}, ComponentOutput{0, 0})};
  CHECK(cost(d) == 3);
  const auto net = oracle::flatten(d);
  REQUIRE(net);
  CHECK(net->gates.size() == 3);
  CHECK(evaluate(d).to_string() == "1110");
}

TEST_CASE("structural errors") {
  SUBCASE("one countable component") {
    CircuitDraft d;
    d.external_inputs = 1;
    d.components = {nand(ExternalInput{0}, ConstantTrue{})};
    CHECK_THROWS_AS(cost(d), StructuralError);
    CHECK_THROWS_AS(evaluate(d), StructuralError);
  }
  SUBCASE("thirteen components") {
    CircuitDraft d;
    d.external_inputs = 1;
    for (int i = 0; i < 13; ++i) d.components.push_back(nand(ExternalInput{0}, ExternalInput{0}));
    CHECK_THROWS_AS(evaluate(d), StructuralError);
  }
  SUBCASE("forward reference") {
    CircuitDraft d = and_draft();
    d.components[0].inputs[0] = ComponentOutput{1, 0};
    CHECK_THROWS_AS(evaluate(d), StructuralError);
  }
  SUBCASE("self reference") {
    CircuitDraft d = and_draft();
    d.components[1].inputs[0] = ComponentOutput{1, 0};
    CHECK_THROWS_AS(evaluate(d), StructuralError);
  }
  SUBCASE("arity mismatch") {
    CircuitDraft d = and_draft();
    d.components[1].inputs.push_back(ExternalInput{0});
    CHECK_THROWS_AS(evaluate(d), StructuralError);
  }
  SUBCASE("undeclared external input") {
    CircuitDraft d = and_draft();
    d.components[0].inputs[1] = ExternalInput{2};
    CHECK_THROWS_AS(evaluate(d), StructuralError);
  }
  SUBCASE("more than sixteen inputs") {
    CircuitDraft d = and_draft();
    d.external_inputs = 17;
    CHECK_THROWS_AS(evaluate(d), StructuralError);
  }
  SUBCASE("bad output index") {
    CircuitDraft d = and_draft();
    d.components[1].inputs[0] = ComponentOutput{0, 1};
    CHECK_THROWS_AS(evaluate(d), StructuralError);
  }
}

TEST_CASE("wide pooled components evaluate row by row like narrow ones") {
  // An 8-input, 5-output pooled table takes the row-wise path; compare with
  // the naive oracle on a 10-input draft.
  TruthTable t(8, 5);
  Rng rng(5);
  for (int o = 0; o < 5; ++o)
    for (std::size_t p = 0; p < t.rows(); ++p) t.set_bit(o, p, rng.coin());
  auto entry = std::make_shared<PooledCircuit>(PooledCircuit{Signature(t), 40, 1, 0, std::nullopt});
  CircuitDraft d;
  d.external_inputs = 10;
  std::vector<SourceRef> in;
  for (int i = 0; i < 8; ++i) in.push_back(ExternalInput{(i * 3) % 10});
  in[7] = ConstantTrue{};
  d.components = {nand(ExternalInput{8}, ExternalInput{9}), pooled(entry, in)};
  d.components[1].inputs[2] = ComponentOutput{0, 0};
  const auto table = evaluate(d);
  REQUIRE(table.outputs() == 5);
  for (std::size_t p = 0; p < table.rows(); ++p) {
    const auto expect = oracle::naive_row(d, p);
    for (int o = 0; o < 5; ++o) REQUIRE(table.bit(o, p) == expect[static_cast<std::size_t>(o)]);
  }
}

TEST_CASE("random drafts: bit-parallel evaluation matches naive and flattened evaluation") {
  // Build a pool with retained drafts, then compose against it.
  EngineParams params;
  params.group_size = 2;
  params.max_trials = 400;
  params.keep_drafts = true;
  auto result = run_replication(params, 11);
  REQUIRE(result.pool.size() > 0);

  ComposeParams small;
  small.input_cap = 6;
  Rng rng(2024);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const auto draft = compose_random(result.pool.active(), small, rng);
    const auto table = evaluate(draft);
    const auto net = oracle::flatten(draft);
    REQUIRE(net);
    CHECK(cost(draft) == static_cast<int>(net->gates.size()));
    for (std::size_t p = 0; p < table.rows(); ++p) {
      const auto naive = oracle::naive_row(draft, p);
      const auto flat = net->simulate(p);
      REQUIRE(naive == flat);
      for (int o = 0; o < table.outputs(); ++o) REQUIRE(table.bit(o, p) == naive[static_cast<std::size_t>(o)]);
    }
    ++checked;
  }
  CHECK(checked == 400);
}

TEST_CASE("make_circuit carries table, signature and cost") {
  const auto c = make_circuit(and_draft(), 3, 1);
  CHECK(c.cost == 2);
  CHECK(c.created_trial == 3);
  CHECK(c.creator_agent == 1);
  CHECK(table_rows(c.table()) == std::vector<std::vector<bool>>{{false}, {false}, {false}, {true}});
  CHECK(c.signature == signature_of(evaluate(and_draft())));
}
