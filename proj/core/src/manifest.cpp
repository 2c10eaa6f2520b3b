#include "wikiclean/manifest.hpp"

#include <algorithm>
#include <array>

#include <nlohmann/json.hpp>

#include "wikiclean/corpus_io.hpp"
#include "wikiclean/error.hpp"

#ifndef WIKICLEAN_VERSION
#define WIKICLEAN_VERSION "0.0.0"
#endif

namespace wikiclean::pipeline {
namespace {

using json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 4> kStageOrder = {kStageScript, kStageExact,
                                                         kStageMinHash, kStageHeuristic};

json stage_json(const StageDelta& d) {
  return json{{"stage_name", d.stage_name},
              {"docs_before", d.docs_before},
              {"docs_after", d.docs_after},
              {"chars_before", d.chars_before},
              {"chars_after", d.chars_after}};
}

template <typename T>
T field(const json& j, const char* key, std::string_view where) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw DataError("manifest: " + std::string(where) + " is missing key: " + key);
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw DataError("manifest: " + std::string(where) + " has a bad value for: " + key);
  }
}

StageDelta parse_stage(const json& j) {
  StageDelta d;
  d.stage_name = field<std::string>(j, "stage_name", "stage");
  d.docs_before = field<std::uint64_t>(j, "docs_before", d.stage_name);
  d.docs_after = field<std::uint64_t>(j, "docs_after", d.stage_name);
  d.chars_before = field<std::uint64_t>(j, "chars_before", d.stage_name);
  d.chars_after = field<std::uint64_t>(j, "chars_after", d.stage_name);
  return d;
}

json to_json(const Manifest& m) {
  json j;
  j["tool_version"] = m.tool_version;
  j["wiki"] = m.wiki;
  j["valid"] = m.valid;
  j["error"] = m.error;
  j["config"] = json::object();
  for (const auto& [k, v] : m.config) j["config"][k] = v;
  j["stages"] = json::array();
  for (const auto& d : m.stages) j["stages"].push_back(stage_json(d));
  if (m.dedup) {
    const auto& p = *m.dedup;
    j["dedup"] = json{{"threshold", p.threshold},       {"permutations", p.permutations},
                      {"bands", p.bands},               {"rows", p.rows},
                      {"shingle_width", p.shingle_width}, {"seed", p.seed},
                      {"exact_verify", p.exact_verify}};
  } else {
    j["dedup"] = nullptr;
  }
  j["thresholds"] = json::array();
  for (const auto& t : m.thresholds) {
    j["thresholds"].push_back(json{{"target", t.target},
                                   {"side", t.side},
                                   {"cut", t.cut},
                                   {"frac", t.frac},
                                   {"n_docs", t.n_docs},
                                   {"n_sample", t.n_sample},
                                   {"seed", t.seed},
                                   {"bandwidth", t.bandwidth},
                                   {"per_metric", t.per_metric},
                                   {"skipped_reason", t.skipped_reason}});
  }
  j["choices"] = json::object();
  for (const auto& [k, v] : m.choices) j["choices"][k] = v;
  j["warnings"] = m.warnings;
  return j;
}

}  // namespace

std::string_view tool_version() { return WIKICLEAN_VERSION; }

const StageDelta* Manifest::stage(std::string_view name) const {
  const auto it = std::find_if(stages.begin(), stages.end(),
                               [&](const StageDelta& d) { return d.stage_name == name; });
  return it == stages.end() ? nullptr : &*it;
}

std::string format_manifest(const Manifest& manifest) {
  return to_json(manifest).dump(2) + "\n";
}

Manifest parse_manifest(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("manifest: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("manifest: expected a JSON object");

  Manifest m;
  m.tool_version = j.value("tool_version", std::string{});
  m.wiki = j.value("wiki", std::string{});
  m.valid = j.value("valid", true);
  m.error = j.value("error", std::string{});
  if (const auto it = j.find("config"); it != j.end() && it->is_object()) {
    for (const auto& [k, v] : it->items()) m.config[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  if (const auto it = j.find("stages"); it != j.end()) {
    if (!it->is_array()) throw DataError("manifest: stages must be an array");
    for (const auto& s : *it) m.stages.push_back(parse_stage(s));
  }
  if (const auto it = j.find("dedup"); it != j.end() && it->is_object()) {
    dedup::MinHashParams p;
    p.threshold = field<double>(*it, "threshold", "dedup");
    p.permutations = field<std::size_t>(*it, "permutations", "dedup");
    p.bands = field<std::size_t>(*it, "bands", "dedup");
    p.rows = field<std::size_t>(*it, "rows", "dedup");
    p.shingle_width = field<std::size_t>(*it, "shingle_width", "dedup");
    p.seed = field<std::uint64_t>(*it, "seed", "dedup");
    p.exact_verify = field<bool>(*it, "exact_verify", "dedup");
    m.dedup = p;
  }
  if (const auto it = j.find("thresholds"); it != j.end() && it->is_array()) {
    for (const auto& t : *it) {
      ThresholdRecord r;
      r.target = field<std::string>(t, "target", "threshold");
      r.side = field<std::string>(t, "side", r.target);
      r.cut = field<double>(t, "cut", r.target);
      r.frac = field<double>(t, "frac", r.target);
      r.n_docs = field<std::size_t>(t, "n_docs", r.target);
      r.n_sample = field<std::size_t>(t, "n_sample", r.target);
      r.seed = field<std::uint64_t>(t, "seed", r.target);
      r.bandwidth = field<double>(t, "bandwidth", r.target);
      r.per_metric = t.value("per_metric", false);
      r.skipped_reason = t.value("skipped_reason", std::string{});
      m.thresholds.push_back(std::move(r));
    }
  }
  if (const auto it = j.find("choices"); it != j.end() && it->is_object()) {
    for (const auto& [k, v] : it->items()) m.choices[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  if (const auto it = j.find("warnings"); it != j.end() && it->is_array()) {
    for (const auto& w : *it) m.warnings.push_back(w.is_string() ? w.get<std::string>() : w.dump());
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  try {
    return parse_manifest(io::read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_manifest(manifest));
}

void validate_manifest(const Manifest& manifest) {
  if (!manifest.valid) {
    throw DataError("manifest marked invalid" +
                    (manifest.error.empty() ? std::string{} : ": " + manifest.error));
  }
  std::size_t next_rank = 0;
  const StageDelta* previous = nullptr;
  for (const auto& d : manifest.stages) {
    const auto it = std::find(kStageOrder.begin(), kStageOrder.end(), d.stage_name);
    if (it == kStageOrder.end()) throw DataError("manifest: unknown stage " + d.stage_name);
    const auto rank = static_cast<std::size_t>(it - kStageOrder.begin());
    if (rank < next_rank) throw DataError("manifest: stage " + d.stage_name + " out of order");
    next_rank = rank + 1;
    if (d.docs_after > d.docs_before || d.chars_after > d.chars_before) {
      throw DataError("manifest: stage " + d.stage_name + " grows the corpus");
    }
    if (previous &&
        (d.docs_before > previous->docs_after || d.chars_before > previous->chars_after)) {
      throw DataError("manifest: stage " + d.stage_name + " starts larger than " +
                      previous->stage_name + " ended");
    }
    previous = &d;
  }
}

void append_stage_deltas(const std::filesystem::path& path,
                         const std::vector<StageDelta>& deltas) {
  Manifest m;
  if (std::filesystem::exists(path)) {
    m = read_manifest(path);
  } else {
    m.tool_version = std::string(tool_version());
  }
  m.stages.insert(m.stages.end(), deltas.begin(), deltas.end());
  write_manifest(m, path);
}

}  // namespace wikiclean::pipeline
