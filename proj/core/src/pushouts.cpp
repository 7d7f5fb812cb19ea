#include "paperlab/pushouts.hpp"
#include "blocks_internal.hpp"

namespace paperlab {

namespace {

PushoutTrace trace_from(const AlgebraPtr& a, const FiltrationStages& fs) {
  PushoutTrace tr;
  tr.b0 = fs.stages.front();
  tr.result = fs.stages.back();
  ChainMap f = ChainMap::identity(a->carrier());
  for (std::size_t t = 0; t < fs.maps.size(); ++t) {
    tr.stages.push_back(PushoutStage{fs.stages[t + 1], fs.maps[t], fs.attaching[t], fs.characteristic[t]});
    f = fs.maps[t].after(f);
  }
  tr.f_prime = f;
  tr.stabilized = fs.status == StageStatus::Stabilized;
  return tr;
}

PushoutTrace run(AlgebraPtr a, const FreeAttachment& att, const TruncationBounds& bounds, std::size_t max_stages,
                 bool quotient) {
  Envelope env(a, bounds, quotient);
  FiltrationStages fs = filtration_with_base(env, att, 0, max_stages, env.evaluation());
  return trace_from(a, fs);
}

}  // namespace

PushoutTrace pushout_along_free_corrected(AlgebraPtr a, const FreeAttachment& att, const TruncationBounds& bounds,
                                          std::size_t max_stages) {
  return run(std::move(a), att, bounds, max_stages, true);
}

PushoutTrace pushout_along_free_original_wrong(AlgebraPtr a, const FreeAttachment& att,
                                               const TruncationBounds& bounds, std::size_t max_stages) {
  return run(std::move(a), att, bounds, max_stages, false);
}

CoproductWithFree coproduct_with_free_unit(AlgebraPtr a, const TruncationBounds& bounds) {
  Envelope env(a, bounds);
  const std::size_t top = env.operad().max_arity().value_or(bounds.max_arity);
  std::vector<ChainComplex> parts;
  CoproductWithFree out;
  for (std::size_t n = 0; n <= std::min(top, bounds.max_arity); ++n) {
    const EnvelopingComponent& c = env.component(n);
    parts.push_back(c.complex);
    out.arities.push_back(n);
    out.stabilized = out.stabilized && c.stabilized;
  }
  DirectSum ds = direct_sum(parts, env.ring());
  out.complex = ds.complex;
  out.f_prime = ds.injections[0].after(env.coevaluation());
  return out;
}

ChainMap kprime_map(KPrimeKind kind, const KPrimeConstituents& c) {
  validate(c.f);
  switch (kind) {
    case KPrimeKind::LeftTensor:
      validate(c.x);
      return tensor(c.f, ChainMap::identity(c.x));
    case KPrimeKind::RightTensor:
      validate(c.x);
      return tensor(ChainMap::identity(c.x), c.f);
    case KPrimeKind::EnvelopingPower: {
      if (c.env == nullptr) throw Error("kprime_map: enveloping power needs an envelope");
      if (c.t == 0) throw Error("kprime_map: enveloping power needs t >= 1");
      return tensor(ChainMap::identity(c.env->component(c.t).complex), pushout_product_power(c.f, c.t));
    }
  }
  throw Error("kprime_map: unknown kind");
}

std::size_t graded_dimension(const ChainComplex& c) {
  std::size_t total = 0;
  for (const auto& [d, inv] : complex_invariants(c)) total += inv.module.rank + inv.module.torsion.size();
  return total;
}

}  // namespace paperlab
