#include "wikiclean/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "wikiclean/csv.hpp"
#include "wikiclean/error.hpp"
#include "wikiclean/score_table.hpp"

namespace wikiclean::pipeline {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const auto v = lower(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError(std::string(key) + ": expected a boolean, got '" + std::string(value) + "'");
}

std::uint64_t parse_uint(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc{} || ptr != end) {
    throw UsageError(std::string(key) + ": expected a non-negative integer, got '" +
                     std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc{} || ptr != end) {
    throw UsageError(std::string(key) + ": expected a number, got '" + std::string(value) + "'");
  }
  return out;
}

std::string_view bool_name(bool b) { return b ? "true" : "false"; }

constexpr std::string_view kSidePrefix = "threshold.side.";

}  // namespace

std::string_view side_spec_name(SideSpec spec) {
  switch (spec) {
    case SideSpec::Off: return "off";
    case SideSpec::Low: return "low";
    case SideSpec::High: return "high";
    case SideSpec::Both: return "both";
  }
  return "low";
}

SideSpec parse_side_spec(std::string_view name) {
  const auto v = lower(name);
  if (v == "off" || v == "none") return SideSpec::Off;
  if (v == "low") return SideSpec::Low;
  if (v == "high") return SideSpec::High;
  if (v == "both") return SideSpec::Both;
  throw UsageError("unknown threshold side: " + std::string(name));
}

SideSpec HeuristicConfig::side_for(std::string_view target) const {
  const auto it = sides.find(target);
  return it == sides.end() ? SideSpec::Low : it->second;
}

void set_config_value(PipelineConfig& c, std::string_view key, std::string_view raw) {
  const std::string value = std::string(raw);
  if (key == "input.path") c.input = value;
  else if (key == "input.format") c.format = io::parse_format(value);
  else if (key == "input.lang") c.lang = value;
  else if (key == "input.strip_markup") c.strip_markup = parse_bool(key, value);
  else if (key == "script.enabled") c.script_enabled = parse_bool(key, value);
  else if (key == "script.registry") c.registry = value;
  else if (key == "script.overrides") c.registry_overrides = value;
  else if (key == "dedup.threshold") c.dedup.threshold = parse_real(key, value);
  else if (key == "dedup.permutations") c.dedup.permutations = parse_uint(key, value);
  else if (key == "dedup.bands") c.dedup.bands = parse_uint(key, value);
  else if (key == "dedup.rows") c.dedup.rows = parse_uint(key, value);
  else if (key == "dedup.shingle_width") c.dedup.shingle_width = parse_uint(key, value);
  else if (key == "dedup.seed") c.dedup.seed = parse_uint(key, value);
  else if (key == "dedup.exact_verify") c.dedup.exact_verify = parse_bool(key, value);
  else if (key == "heuristic.enabled") c.heuristic.enabled = parse_bool(key, value);
  else if (key == "heuristic.trigram_unit") c.heuristic.trigram_unit = heuristics::parse_trigram_unit(value);
  else if (key == "heuristic.per_metric") c.heuristic.per_metric = parse_bool(key, value);
  else if (key == "heuristic.skip_degenerate") c.heuristic.skip_degenerate = parse_bool(key, value);
  else if (key == "threshold.frac") c.heuristic.frac = parse_real(key, value);
  else if (key == "threshold.seed") c.heuristic.seed = parse_uint(key, value);
  else if (key.starts_with(kSidePrefix) && key.size() > kSidePrefix.size()) {
    const auto target = std::string(key.substr(kSidePrefix.size()));
    heuristics::parse_target(target);  // rejects unknown names
    c.heuristic.sides[target] = parse_side_spec(value);
  }
  else if (key == "control.seed") c.control_seed = parse_uint(key, value);
  else if (key == "output.dir") c.output_dir = value;
  else if (key == "output.workers") {
    const auto w = parse_uint(key, value);
    if (w == 0 || w > 4096) throw UsageError("output.workers must be between 1 and 4096");
    c.workers = static_cast<unsigned>(w);
  }
  else throw UsageError("unknown config key: " + std::string(key));
}

void apply_config_text(PipelineConfig& config, std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError("config: " + e.message() + " at line " + std::to_string(e.line()));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw UsageError("config: key '" + section + "' outside of a [section]");
    }
    for (const auto& [key, node] : body) {
      set_config_value(config, section + "." + key, node.data());
    }
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    throw UsageError("cannot read config " + path.string() + ": " + e.what());
  }
  PipelineConfig config;
  apply_config_text(config, text);
  return config;
}

void PipelineConfig::validate(bool require_input) const {
  namespace fs = std::filesystem;
  if (require_input) {
    if (input.empty()) throw UsageError("input.path is required");
    if (!fs::exists(input)) throw UsageError("input.path does not exist: " + input.string());
  }
  if (!registry.empty() && !fs::exists(registry)) {
    throw UsageError("script.registry does not exist: " + registry.string());
  }
  if (!registry_overrides.empty() && !fs::exists(registry_overrides)) {
    throw UsageError("script.overrides does not exist: " + registry_overrides.string());
  }
  dedup.validate();
  if (!(heuristic.frac > 0.0 && heuristic.frac <= 1.0)) {
    throw UsageError("threshold.frac must be in (0, 1]");
  }
  for (const auto& [target, side] : heuristic.sides) {
    const auto parsed = heuristics::parse_target(target);
    const bool is_metric = std::holds_alternative<heuristics::Metric>(parsed);
    if (is_metric != heuristic.per_metric) {
      throw UsageError("threshold.side." + target + (heuristic.per_metric
                                                          ? " names a family but heuristic.per_metric is on"
                                                          : " names a metric but heuristic.per_metric is off"));
    }
  }
  if (workers == 0) throw UsageError("output.workers must be at least 1");
}

std::map<std::string, std::string> config_snapshot(const PipelineConfig& c) {
  // Worker count is left out so manifests agree across machines.
  std::map<std::string, std::string> s;
  s["input.path"] = c.input.generic_string();
  s["input.format"] = std::string(io::format_name(c.format));
  s["input.lang"] = c.lang;
  s["input.strip_markup"] = bool_name(c.strip_markup);
  s["script.enabled"] = bool_name(c.script_enabled);
  s["script.registry"] = c.registry.empty() ? "builtin" : c.registry.generic_string();
  s["script.overrides"] = c.registry_overrides.generic_string();
  s["dedup.threshold"] = csv::format_double(c.dedup.threshold);
  s["dedup.permutations"] = std::to_string(c.dedup.permutations);
  s["dedup.bands"] = std::to_string(c.dedup.bands);
  s["dedup.rows"] = std::to_string(c.dedup.rows);
  s["dedup.shingle_width"] = std::to_string(c.dedup.shingle_width);
  s["dedup.seed"] = std::to_string(c.dedup.seed);
  s["dedup.exact_verify"] = bool_name(c.dedup.exact_verify);
  s["heuristic.enabled"] = bool_name(c.heuristic.enabled);
  s["heuristic.trigram_unit"] = std::string(heuristics::trigram_unit_name(c.heuristic.trigram_unit));
  s["heuristic.per_metric"] = bool_name(c.heuristic.per_metric);
  s["heuristic.skip_degenerate"] = bool_name(c.heuristic.skip_degenerate);
  s["threshold.frac"] = csv::format_double(c.heuristic.frac);
  s["threshold.seed"] = std::to_string(c.heuristic.seed);
  for (const auto& [target, side] : c.heuristic.sides) {
    s[std::string(kSidePrefix) + target] = std::string(side_spec_name(side));
  }
  s["control.seed"] = std::to_string(c.control_seed);
  s["output.dir"] = c.output_dir.generic_string();
  return s;
}

}  // namespace wikiclean::pipeline
