#include "mkkc/solver.hpp"

namespace mkkc {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::MinMaxL2: return "minmax";
    case Variant::MinMaxMinC: return "minmax-minc";
    case Variant::MinMinMkkm: return "minmin";
    case Variant::Uniform: return "uniform";
    case Variant::SingleBest: return "single-best";
  }
  return "unknown";
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> variants = {Variant::MinMaxL2, Variant::MinMaxMinC,
                                                Variant::MinMinMkkm, Variant::Uniform,
                                                Variant::SingleBest};
  return variants;
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : all_variants())
    if (variant_name(v) == name) return v;
  return std::nullopt;
}

}  // namespace mkkc
