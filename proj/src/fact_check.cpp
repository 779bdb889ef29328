#include "tsdistill/fact_check.hpp"

#include <array>
#include <utility>

#include "tsdistill/errors.hpp"

namespace tsdistill {

const NliVerdict& FieldVerdicts::of(Field f) const noexcept {
  switch (f) {
    case Field::trend: return trend;
    case Field::noise: return noise;
    case Field::extrema: break;
  }
  return extrema;
}

NliVerdict& FieldVerdicts::of(Field f) noexcept {
  return const_cast<NliVerdict&>(std::as_const(*this).of(f));
}

double FactCheckReport::rate(Field f) const noexcept {
  switch (f) {
    case Field::trend: return trend_rate;
    case Field::noise: return noise_rate;
    case Field::extrema: break;
  }
  return extrema_rate;
}

CheckedAnnotation fact_check_sample(const Annotation& annotation, const FeatureLabels& labels,
                                    NliScorer& scorer) {
  CheckedAnnotation out{annotation, {}, false};
  for (Field f : kAllFields) {
    out.verdicts.of(f) = nli_compare(fact_sentence(labels, f), annotation.sentence(f), scorer, f);
  }
  if (out.verdicts.extrema.label == NliLabel::contradiction) {
    out.annotation.extrema = fact_sentence(labels, Field::extrema);
    out.annotation.source = AnnotationSource::replaced;
    out.replaced = true;
  }
  return out;
}

FactCheckOutcome run_fact_check(std::span<const FactCheckItem> items, NliScorer& scorer) {
  if (items.empty()) throw ValidationError("fact check: empty dataset");

  FactCheckOutcome out;
  out.checked.reserve(items.size());
  std::array<std::size_t, 3> agree{};
  for (const auto& item : items) {
    auto checked = fact_check_sample(item.annotation, item.labels, scorer);
    for (std::size_t k = 0; k < kAllFields.size(); ++k)
      if (checked.verdicts.of(kAllFields[k]).label != NliLabel::contradiction) ++agree[k];
    if (checked.replaced) out.report.replaced_ids.push_back(item.id);
    if (checked.verdicts.trend.label == NliLabel::contradiction ||
        checked.verdicts.noise.label == NliLabel::contradiction)
      out.report.retained_ids.push_back(item.id);
    out.checked.push_back(std::move(checked));
  }
  const double n = static_cast<double>(items.size());
  out.report.n_samples = items.size();
  out.report.trend_rate = static_cast<double>(agree[0]) / n;
  out.report.noise_rate = static_cast<double>(agree[1]) / n;
  out.report.extrema_rate = static_cast<double>(agree[2]) / n;
  out.report.scorer = scorer.name();
  return out;
}

FactCheckReport agreement_report(std::span<const FactCheckItem> items, NliScorer& scorer) {
  return run_fact_check(items, scorer).report;
}

nlohmann::json to_json(const FactCheckReport& r) {
  return {{"n_samples", r.n_samples},
          {"scorer", r.scorer},
          {"agreement", {{"trend", r.trend_rate}, {"noise", r.noise_rate}, {"extrema", r.extrema_rate}}},
          {"replaced_ids", r.replaced_ids},
          {"retained_ids", r.retained_ids}};
}

}  // namespace tsdistill
