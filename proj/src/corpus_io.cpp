#include <fstream>
#include <sstream>

#include "thumbside/synth_bench.hpp"

namespace thumbside {

namespace {

constexpr int kSchemaVersion = 1;

[[noreturn]] void schema_error(const std::string& id, const std::string& path,
                               const std::string& what) {
  throw BenchError(BenchError::Kind::Schema,
                   "record '" + id + "': " + path + ": " + what);
}

}  // namespace

nlohmann::json record_to_json(const TraceRecord& record) {
  nlohmann::json j = record.extra.is_object() ? record.extra
                                              : nlohmann::json::object();
  j["schema"] = kSchemaVersion;
  j["id"] = record.id;
  j["label"] = record.label ? nlohmann::json(to_string(*record.label))
                            : nlohmann::json(nullptr);
  j["params_digest"] = record.params_digest;
  auto& samples = j["samples"] = nlohmann::json::array();
  for (const auto& s : record.trace) samples.push_back({s.x, s.y, s.t});
  return j;
}

TraceRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) schema_error("?", "$", "record must be a JSON object");

  TraceRecord rec;
  if (auto it = j.find("id"); it != j.end() && it->is_string()) {
    rec.id = it->get<std::string>();
  } else {
    schema_error("?", "id", "missing or not a string");
  }

  auto schema = j.find("schema");
  if (schema == j.end() || !schema->is_number_integer() ||
      schema->get<int>() != kSchemaVersion) {
    schema_error(rec.id, "schema", "expected 1");
  }

  if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) schema_error(rec.id, "label", "not a string");
    rec.label = parse_grip_label(it->get<std::string>());
    if (!rec.label) {
      schema_error(rec.id, "label",
                   "unknown label '" + it->get<std::string>() + "'");
    }
  }

  if (auto it = j.find("params_digest"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) schema_error(rec.id, "params_digest", "not a string");
    rec.params_digest = it->get<std::string>();
  }

  auto samples = j.find("samples");
  if (samples == j.end() || !samples->is_array()) {
    schema_error(rec.id, "samples", "missing or not an array");
  }
  rec.trace.reserve(samples->size());
  for (std::size_t i = 0; i < samples->size(); ++i) {
    const auto& row = (*samples)[i];
    const std::string where = "samples[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != 3) {
      schema_error(rec.id, where, "expected [x, y, t]");
    }
    for (std::size_t k = 0; k < 3; ++k) {
      if (!row[k].is_number()) {
        schema_error(rec.id, where + "[" + std::to_string(k) + "]",
                     "not a number");
      }
    }
    rec.trace.push_back(
        {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
  }

  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    if (key == "schema" || key == "id" || key == "label" ||
        key == "params_digest" || key == "samples") {
      continue;
    }
    rec.extra[key] = it.value();
  }
  return rec;
}

std::string write_corpus_string(const std::vector<TraceRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

void write_corpus(const std::vector<TraceRecord>& records,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw BenchError(BenchError::Kind::Io,
                     "cannot open '" + path.string() + "' for writing");
  }
  out << write_corpus_string(records);
  out.flush();
  if (!out) {
    throw BenchError(BenchError::Kind::Io,
                     "failed writing '" + path.string() + "'");
  }
}

CorpusScan scan_corpus(std::istream& in) {
  CorpusScan scan;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      scan.records.push_back(record_from_json(nlohmann::json::parse(line)));
      scan.record_lines.push_back(line_no);
    } catch (const nlohmann::json::parse_error& e) {
      scan.malformed.push_back({line_no, std::string("invalid JSON: ") + e.what()});
    } catch (const BenchError& e) {
      scan.malformed.push_back({line_no, e.what()});
    }
  }
  return scan;
}

CorpusScan scan_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw BenchError(BenchError::Kind::Io,
                     "cannot open '" + path.string() + "' for reading");
  }
  return scan_corpus(in);
}

std::vector<TraceRecord> read_corpus(const std::filesystem::path& path) {
  CorpusScan scan = scan_corpus(path);
  if (!scan.malformed.empty()) {
    const auto& first = scan.malformed.front();
    throw BenchError(BenchError::Kind::Schema,
                     path.string() + ":" + std::to_string(first.line) + ": " +
                         first.message);
  }
  return std::move(scan.records);
}

}  // namespace thumbside
