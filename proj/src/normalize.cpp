#include "ncsagree/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncsagree/errors.hpp"

namespace ncsagree::normalize {

const ReferenceSetStats* ReferenceSets::find(std::int32_t field,
                                             std::int32_t year) const {
  const auto it = by_field_year.find(key(field, year));
  return it == by_field_year.end() ? nullptr : &it->second;
}

std::vector<ReferenceSetStats> ReferenceSets::sorted() const {
  std::vector<ReferenceSetStats> out;
  out.reserve(by_field_year.size());
  for (const auto& [k, v] : by_field_year) out.push_back(v);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.field != b.field) return a.field < b.field;
    return a.pub_year < b.pub_year;
  });
  return out;
}

ReferenceSets build_reference_sets(const corpus::Corpus& corpus,
                                   const corpus::SystemPopulation& population) {
  ReferenceSets rs;
  rs.system_id = population.desc.system_id;
  rs.by_field_year.reserve(population.field_names.size() * 4);
  for (std::size_t p = 0; p < population.size(); ++p) {
    const auto& paper = corpus.papers[population.paper_ids[p]];
    for (const std::int32_t field : population.fields[p]) {
      auto& stats =
          rs.by_field_year[ReferenceSets::key(field, paper.pub_year)];
      if (stats.n_papers == 0) {
        stats.field = field;
        stats.pub_year = paper.pub_year;
      }
      ++stats.n_papers;
      stats.citation_sum += paper.citations;  // exact integer accumulation
    }
  }
  return rs;
}

NcsTable compute_ncs(const corpus::Corpus& corpus,
                     const corpus::SystemPopulation& population,
                     const ReferenceSets& refsets) {
  if (refsets.system_id != population.desc.system_id)
    throw ConsistencyError("normalize: reference sets built for system '" +
                           refsets.system_id + "', scoring '" +
                           population.desc.system_id + "'");
  NcsTable table;
  table.system_id = population.desc.system_id;
  table.score_by_paper.assign(corpus.papers.size(),
                              std::numeric_limits<double>::quiet_NaN());
  table.n_fields_by_paper.assign(corpus.papers.size(), 0);

  for (std::size_t p = 0; p < population.size(); ++p) {
    const std::uint32_t paper_id = population.paper_ids[p];
    const auto& paper = corpus.papers[paper_id];
    const auto& fields = population.fields[p];

    double ratio_sum = 0.0;
    for (const std::int32_t field : fields) {
      const ReferenceSetStats* stats = refsets.find(field, paper.pub_year);
      if (stats == nullptr)
        throw ConsistencyError(
            "normalize: paper references field '" +
            population.field_names[static_cast<std::size_t>(field)] +
            "' year " + std::to_string(paper.pub_year) +
            " with no reference set in system '" + population.desc.system_id +
            "'");
      if (stats->citation_sum == 0) {
        if (paper.citations != 0)
          throw ConsistencyError(
              "normalize: cited paper in a zero-citation reference set of '" +
              population.desc.system_id + "'");
        continue;  // c/e := 0 for a zero-mean set
      }
      // c/e = c * n / sum; every operand is an exact integer in double range
      ratio_sum += static_cast<double>(paper.citations) *
                   static_cast<double>(stats->n_papers) /
                   static_cast<double>(stats->citation_sum);
    }
    table.score_by_paper[paper_id] =
        ratio_sum / static_cast<double>(fields.size());
    table.n_fields_by_paper[paper_id] = static_cast<std::int32_t>(fields.size());
  }
  return table;
}

}  // namespace ncsagree::normalize
