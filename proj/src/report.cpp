#include "ncsagree/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ncsagree/errors.hpp"

namespace ncsagree::report {

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::vector<AlluvialBand> alluvial_bands(
    const std::vector<SystemClasses>& systems,
    const std::vector<std::string>& order) {
  const auto find = [&](const std::string& id) -> const SystemClasses& {
    for (const auto& s : systems)
      if (s.system_id == id) return s;
    throw ConsistencyError("report: alluvial order names unknown system '" +
                           id + "'");
  };

  std::vector<AlluvialBand> bands;
  for (std::size_t step = 0; step + 1 < order.size(); ++step) {
    const SystemClasses& src = find(order[step]);
    const SystemClasses& dst = find(order[step + 1]);
    if (src.classes.size() != dst.classes.size())
      throw ConsistencyError(
          "report: alluvial class vectors differ in length");
    std::map<std::pair<int, int>, std::int64_t> counts;
    for (std::size_t p = 0; p < src.classes.size(); ++p)
      ++counts[{src.classes[p], dst.classes[p]}];
    for (const auto& [key, count] : counts)
      bands.push_back(AlluvialBand{static_cast<int>(step), key.first,
                                   key.second, count});
  }
  return bands;
}

std::string render_pairwise_tsv(
    const std::vector<agreement::AgreementResult>& results) {
  std::ostringstream out;
  out << "system_a\tsystem_b\tn\tpercent_agreement\tkappa\tkappa_ci_low\t"
         "kappa_ci_high\tkappa_band\tlcc\tlcc_ci_low\tlcc_ci_high\t"
         "match_mode\tbootstrap_seed\tbootstrap_replicates\tcontingency\n";
  for (const auto& r : results) {
    out << r.system_a << '\t' << r.system_b << '\t' << r.n << '\t'
        << fixed6(r.percent) << '\t' << fixed6(r.kappa.value) << '\t'
        << (r.kappa.has_ci() ? fixed6(r.kappa.ci_low) : "") << '\t'
        << (r.kappa.has_ci() ? fixed6(r.kappa.ci_high) : "") << '\t'
        << r.kappa_band << '\t' << fixed6(r.lcc.value) << '\t'
        << (r.lcc.has_ci() ? fixed6(r.lcc.ci_low) : "") << '\t'
        << (r.lcc.has_ci() ? fixed6(r.lcc.ci_high) : "") << '\t'
        << r.match_mode << '\t' << r.bootstrap_seed << '\t'
        << r.bootstrap_replicates << '\t';
    for (int i = 0; i < r.table.k; ++i) {
      if (i > 0) out << ';';
      for (int j = 0; j < r.table.k; ++j) {
        if (j > 0) out << ',';
        out << r.table.at(i, j);
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string render_contingency_tsv(
    const std::vector<agreement::AgreementResult>& results) {
  std::ostringstream out;
  out << "system_a\tsystem_b\tclass_a\tclass_b\tcount\n";
  for (const auto& r : results)
    for (int i = 0; i < r.table.k; ++i)
      for (int j = 0; j < r.table.k; ++j)
        out << r.system_a << '\t' << r.system_b << '\t' << i + 1 << '\t'
            << j + 1 << '\t' << r.table.at(i, j) << '\n';
  return out.str();
}

std::string render_alluvial_tsv(const std::vector<AlluvialBand>& bands,
                                const std::vector<std::string>& order) {
  std::ostringstream out;
  out << "step\tsource_system\ttarget_system\tsource_class\ttarget_class\t"
         "count\n";
  for (const auto& b : bands) {
    const auto step = static_cast<std::size_t>(b.step);
    out << b.step << '\t' << order[step] << '\t' << order[step + 1] << '\t'
        << b.source_class << '\t' << b.target_class << '\t' << b.count
        << '\n';
  }
  return out.str();
}

std::string render_field_frequency_tsv(
    const std::vector<FieldFrequencyRow>& rows) {
  std::ostringstream out;
  out << "system_id\tfield_id\tn_papers\n";
  for (const auto& r : rows)
    out << r.system_id << '\t' << r.field_id << '\t' << r.n_papers << '\n';
  return out.str();
}

std::string render_boxplot_tsv(const std::vector<BoxplotRow>& rows) {
  std::ostringstream out;
  out << "system_id\tn_fields\ttotal_memberships\tmin\tq1\tmedian\tq3\tmax\t"
         "n_outliers\toutliers\n";
  for (const auto& r : rows) {
    out << r.system_id << '\t' << r.summary.n_fields << '\t'
        << r.summary.total_memberships << '\t' << fixed6(r.summary.min)
        << '\t' << fixed6(r.summary.q1) << '\t' << fixed6(r.summary.median)
        << '\t' << fixed6(r.summary.q3) << '\t' << fixed6(r.summary.max)
        << '\t' << r.summary.outliers.size() << '\t';
    for (std::size_t i = 0; i < r.summary.outliers.size(); ++i) {
      if (i > 0) out << ',';
      out << r.summary.outliers[i];
    }
    out << '\n';
  }
  return out.str();
}

std::string render_metrics_tsv(const std::vector<MetricRow>& rows) {
  std::ostringstream out;
  out << "input\tmetric\tvalue\n";
  for (const auto& r : rows)
    out << r.input << '\t' << r.metric << '\t' << r.value << '\n';
  return out.str();
}

std::vector<std::filesystem::path> export_report(
    const FileSet& files, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw IoError("report: cannot create output directory " +
                  out_dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  written.reserve(files.size());
  const auto cleanup = [&written] {
    for (const auto& p : written) {
      std::error_code ignore;
      fs::remove(p, ignore);
    }
  };

  for (const auto& [name, content] : files) {
    const fs::path path = out_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      cleanup();
      throw IoError("report: cannot open " + path.string() + " for writing");
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      cleanup();
      throw IoError("report: write failed for " + path.string());
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace ncsagree::report
