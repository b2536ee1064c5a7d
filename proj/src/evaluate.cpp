#include <iomanip>
#include <sstream>

#include "thumbside/synth_bench.hpp"

namespace thumbside {

namespace {

Handedness expected_side(GripLabel label) {
  switch (label) {
    case GripLabel::LeftThumb:
      return Handedness::LeftThumb;
    case GripLabel::RightThumb:
      return Handedness::RightThumb;
    case GripLabel::IndexFinger:
      break;
  }
  return Handedness::Ambiguous;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport evaluate(const std::vector<TraceRecord>& records,
                    const DetectorConfig& cfg) {
  EvalReport report;
  double r2_sum = 0.0;
  std::size_t r2_high = 0;
  std::size_t thumb_decided = 0;
  std::size_t thumb_sign_match = 0;

  for (const auto& rec : records) {
    if (!rec.label) {
      throw BenchError(BenchError::Kind::UnlabeledRecord,
                       "record '" + rec.id + "' has no label");
    }
    const GripLabel label = *rec.label;
    const Handedness expected = expected_side(label);
    ++report.total;

    Handedness decided = Handedness::Ambiguous;
    std::optional<QuadraticFit> fit;
    if (validate_trace(rec.trace, cfg.segmenter)) {
      ++report.rejected;
    } else {
      try {
        fit = fit_quadratic(rec.trace);
      } catch (const GeometryError&) {
        ++report.rejected;
      }
    }
    if (fit) {
      ++report.fitted;
      r2_sum += fit->r2;
      if (fit->r2 >= 0.9) ++r2_high;
      decided = classify_fit(*fit, cfg.classifier).label;
    }

    report.confusion[static_cast<std::size_t>(label)]
                    [static_cast<std::size_t>(decided)]++;

    if (label == GripLabel::IndexFinger) {
      if (decided == Handedness::Ambiguous) {
        ++report.correct;
      } else {
        ++report.misclassified;
      }
      continue;
    }
    if (decided == Handedness::Ambiguous) {
      ++report.ambiguous;
      continue;
    }
    if (decided == expected) {
      ++report.correct;
    } else {
      ++report.misclassified;
    }
    ++thumb_decided;
    const bool c_says_left = fit->c < 0.0;
    if (c_says_left == (label == GripLabel::LeftThumb)) ++thumb_sign_match;
  }

  report.accuracy = ratio(report.correct, report.total - report.ambiguous);
  report.strict_accuracy = ratio(report.correct, report.total);
  report.sign_consistency = ratio(thumb_sign_match, thumb_decided);
  report.mean_r2 = report.fitted == 0 ? 0.0 : r2_sum / report.fitted;
  report.r2_at_least_0_9 = ratio(r2_high, report.fitted);
  return report;
}

EvalReport evaluate_corpus(const std::filesystem::path& path,
                           const DetectorConfig& cfg) {
  CorpusScan scan = scan_corpus(path);
  if (scan.records.empty() && scan.malformed.empty()) {
    throw BenchError(BenchError::Kind::EmptyCorpus,
                     "empty corpus: " + path.string());
  }
  for (std::size_t i = 0; i < scan.records.size(); ++i) {
    if (!scan.records[i].label) {
      throw BenchError(BenchError::Kind::UnlabeledRecord,
                       path.string() + ":" +
                           std::to_string(scan.record_lines[i]) +
                           ": record '" + scan.records[i].id +
                           "' has no label");
    }
  }
  EvalReport report = evaluate(scan.records, cfg);
  report.malformed = scan.malformed.size();
  report.issues = std::move(scan.malformed);
  return report;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["total"] = r.total;
  j["correct"] = r.correct;
  j["ambiguous"] = r.ambiguous;
  j["misclassified"] = r.misclassified;
  j["rejected"] = r.rejected;
  j["malformed"] = r.malformed;
  j["fitted"] = r.fitted;
  j["accuracy"] = r.accuracy;
  j["strict_accuracy"] = r.strict_accuracy;
  j["sign_consistency"] = r.sign_consistency;
  j["mean_r2"] = r.mean_r2;
  j["r2_at_least_0_9"] = r.r2_at_least_0_9;
  nlohmann::json confusion;
  const char* rows[] = {"left_thumb", "right_thumb", "index_finger"};
  const char* cols[] = {"left", "right", "ambiguous"};
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) confusion[rows[i]][cols[k]] = r.confusion[i][k];
  }
  j["confusion"] = confusion;
  auto& issues = j["issues"] = nlohmann::json::array();
  for (const auto& issue : r.issues) {
    issues.push_back({{"line", issue.line}, {"message", issue.message}});
  }
  return j;
}

std::string format_table(const EvalReport& r) {
  std::ostringstream out;
  out << std::fixed;
  auto row = [&](const char* name, auto value) {
    out << std::left << std::setw(18) << name << std::right << std::setw(10)
        << value << '\n';
  };
  row("total", r.total);
  row("correct", r.correct);
  row("ambiguous", r.ambiguous);
  row("misclassified", r.misclassified);
  row("rejected", r.rejected);
  row("malformed", r.malformed);
  out << std::setprecision(4);
  row("accuracy", r.accuracy);
  row("strict_accuracy", r.strict_accuracy);
  row("sign_consistency", r.sign_consistency);
  row("mean_r2", r.mean_r2);
  row("r2>=0.9", r.r2_at_least_0_9);
  out << '\n'
      << std::left << std::setw(14) << "truth\\decided" << std::right
      << std::setw(10) << "left" << std::setw(10) << "right" << std::setw(11)
      << "ambiguous" << '\n';
  const char* rows[] = {"left_thumb", "right_thumb", "index_finger"};
  for (int i = 0; i < 3; ++i) {
    out << std::left << std::setw(14) << rows[i] << std::right;
    out << std::setw(10) << r.confusion[i][0] << std::setw(10)
        << r.confusion[i][1] << std::setw(11) << r.confusion[i][2] << '\n';
  }
  for (const auto& issue : r.issues) {
    out << "line " << issue.line << ": " << issue.message << '\n';
  }
  return out.str();
}

}  // namespace thumbside
