#include "nandevo/compose.hpp"

#include <stdexcept>

namespace nandevo {

void validate(const ComposeParams& params) {
  if (!(params.p_const >= 0.0) || !(params.p_nand >= 0.0) || params.p_const + params.p_nand > 1.0)
    throw std::invalid_argument("compose: need p_const >= 0, p_nand >= 0, p_const + p_nand <= 1");
  if (params.p_const >= 1.0) throw std::invalid_argument("compose: p_const must be below 1");
  if (params.min_components < kMinComponents || params.max_components > kMaxComponents ||
      params.min_components > params.max_components)
    throw std::invalid_argument("compose: component range must lie within [2, 12]");
  if (params.input_cap < 0 || params.input_cap > kMaxExternalInputs)
    throw std::invalid_argument("compose: input cap must lie within [0, 16]");
}

CircuitDraft compose_random(std::span<const std::shared_ptr<const PooledCircuit>> pool, const ComposeParams& params,
                            Rng& rng) {
  const int slots = rng.uniform_int(params.min_components, params.max_components);

  CircuitDraft draft;
  draft.components.reserve(static_cast<std::size_t>(slots));
  std::vector<ComponentOutput> outputs;  // earlier component outputs, in order
  std::vector<SourceRef> constants;

  while (static_cast<int>(draft.components.size()) < slots) {
    const double u = rng.uniform01();
    ComponentInstance comp;
    if (u < params.p_const) {
      constants.push_back(rng.coin() ? SourceRef{ConstantTrue{}} : SourceRef{ConstantFalse{}});
      continue;
    }
    if (u < params.p_const + params.p_nand || pool.empty())
      comp.kind = NandPrimitive{};
    else
      comp.kind = PooledComponent{pool[rng.uniform_index(pool.size())]};

    const int arity = comp.input_arity();
    comp.inputs.reserve(static_cast<std::size_t>(arity));
    for (int t = 0; t < arity; ++t) {
      const std::size_t n_out = outputs.size();
      const auto n_ext = static_cast<std::size_t>(draft.external_inputs);
      const std::size_t n_const = constants.size();
      const bool fresh_allowed = draft.external_inputs < params.input_cap;
      const std::size_t n = n_out + n_ext + n_const + (fresh_allowed ? 1 : 0);
      if (n == 0) {
        comp.inputs.push_back(ExternalInput{draft.external_inputs++});
        continue;
      }
      std::size_t pick = rng.uniform_index(n);
      if (pick < n_out) {
        comp.inputs.push_back(outputs[pick]);
      } else if ((pick -= n_out) < n_ext) {
        comp.inputs.push_back(ExternalInput{static_cast<int>(pick)});
      } else if ((pick -= n_ext) < n_const) {
        comp.inputs.push_back(constants[pick]);
      } else {
        comp.inputs.push_back(ExternalInput{draft.external_inputs++});
      }
    }

    const int index = static_cast<int>(draft.components.size());
    for (int o = 0; o < comp.output_arity(); ++o) outputs.push_back({index, o});
    draft.components.push_back(std::move(comp));
  }
  return draft;
}

}  // namespace nandevo
