#include "sadic/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

namespace sadic {

namespace {

constexpr std::array<std::pair<Task, const char*>, 13> kTaskNames{{
    {Task::props, "props"},
    {Task::matrix, "matrix"},
    {Task::cocycle_eval, "cocycle-eval"},
    {Task::lyapunov, "lyapunov"},
    {Task::spectrum, "spectrum"},
    {Task::chi, "chi"},
    {Task::mahler_bound, "mahler-bound"},
    {Task::criterion, "criterion"},
    {Task::cone_verify, "cone-verify"},
    {Task::example_family, "example-family"},
    {Task::weyl, "weyl"},
    {Task::spectral_measure, "spectral-measure"},
    {Task::dimension_scan, "dimension-scan"},
}};

std::size_t positive_size(const TextValue& v) {
  const auto x = v.as_uint64();
  if (x == 0) v.fail("must be positive");
  return static_cast<std::size_t>(x);
}

std::vector<std::size_t> positive_sizes(const TextValue& v) {
  std::vector<std::size_t> out;
  for (const auto& item : v.as_list()) out.push_back(positive_size(item));
  return out;
}

using Setter = std::function<void(RunConfig&, const TextValue&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"task",
       [](RunConfig& c, const TextValue& v) {
         const auto t = parse_task(v.as_string());
         if (!t) v.fail("unknown task '" + v.as_string() + "'");
         c.task = *t;
       }},
      {"family", [](RunConfig& c, const TextValue& v) { c.family = v.as_string(); }},
      {"probs",
       [](RunConfig& c, const TextValue& v) {
         auto p = v.as_double_list();
         for (double x : p)
           if (!(x >= 0)) v.fail("probabilities must be nonnegative");
         const double s = std::accumulate(p.begin(), p.end(), 0.0);
         if (std::abs(s - 1.0) > 1e-12) v.fail("probabilities must sum to 1 (got " + std::to_string(s) + ")");
         c.probs = std::move(p);
       }},
      {"seed", [](RunConfig& c, const TextValue& v) { c.seed = v.as_uint64(); }},
      {"out", [](RunConfig& c, const TextValue& v) { c.out = v.as_string(); }},
      {"n_steps", [](RunConfig& c, const TextValue& v) { c.n_steps = positive_size(v); }},
      {"n_trials", [](RunConfig& c, const TextValue& v) { c.n_trials = positive_size(v); }},
      {"burn_in",
       [](RunConfig& c, const TextValue& v) {
         const double b = v.as_double();
         if (!(b >= 0 && b < 1)) v.fail("burn_in must lie in [0, 1)");
         c.burn_in = b;
       }},
      {"k_list", [](RunConfig& c, const TextValue& v) { c.k_list = positive_sizes(v); }},
      {"n_samples", [](RunConfig& c, const TextValue& v) { c.n_samples = positive_size(v); }},
      {"integral_samples",
       [](RunConfig& c, const TextValue& v) {
         c.integral_samples = positive_size(v);
         if (c.integral_samples < 2) v.fail("needs at least 2 samples");
       }},
      {"member", [](RunConfig& c, const TextValue& v) { c.member = static_cast<std::size_t>(v.as_uint64()); }},
      {"point", [](RunConfig& c, const TextValue& v) { c.point = v.as_double_list(); }},
      {"poly",
       [](RunConfig& c, const TextValue& v) {
         c.poly = v.as_int_list();
         if (std::all_of(c.poly.begin(), c.poly.end(), [](long long x) { return x == 0; }))
           v.fail("polynomial must be nonzero");
       }},
      {"m",
       [](RunConfig& c, const TextValue& v) {
         c.m = v.as_int();
         if (c.m < 1) v.fail("m must be at least 1");
       }},
      {"variant",
       [](RunConfig& c, const TextValue& v) {
         const auto s = v.as_string();
         if (s != "standard" && s != "shifted-k") v.fail("variant must be 'standard' or 'shifted-k'");
         c.variant = s;
       }},
      {"ks", [](RunConfig& c, const TextValue& v) { c.ks = v.as_int_list(); }},
      {"m_min",
       [](RunConfig& c, const TextValue& v) {
         c.m_min = v.as_int();
         if (c.m_min < 1) v.fail("m_min must be at least 1");
       }},
      {"m_max", [](RunConfig& c, const TextValue& v) { c.m_max = v.as_int(); }},
      {"cone",
       [](RunConfig& c, const TextValue& v) {
         const auto s = v.as_string();
         if (s != "forward" && s != "inverse" && s != "family") v.fail("cone must be forward, inverse or family");
         c.cone = s;
       }},
      {"cone_mode",
       [](RunConfig& c, const TextValue& v) {
         const auto s = v.as_string();
         if (s != "exact" && s != "sample") v.fail("cone_mode must be 'exact' or 'sample'");
         c.cone_mode = s;
       }},
      {"cone_samples", [](RunConfig& c, const TextValue& v) { c.cone_samples = positive_size(v); }},
      {"N", [](RunConfig& c, const TextValue& v) { c.N = positive_size(v); }},
      {"subsamples", [](RunConfig& c, const TextValue& v) { c.subsamples = positive_sizes(v); }},
      {"rational_point", [](RunConfig& c, const TextValue& v) { c.rational_point = v.as_int_list(); }},
      {"denominator",
       [](RunConfig& c, const TextValue& v) {
         c.denominator = v.as_int();
         if (c.denominator < 0) v.fail("denominator must be nonnegative");
       }},
      {"K", [](RunConfig& c, const TextValue& v) { c.K = positive_size(v); }},
      {"grid", [](RunConfig& c, const TextValue& v) { c.grid = positive_size(v); }},
      {"letter", [](RunConfig& c, const TextValue& v) { c.letter = static_cast<std::uint32_t>(v.as_uint64()); }},
      {"level", [](RunConfig& c, const TextValue& v) { c.level = static_cast<std::size_t>(v.as_uint64()); }},
      {"centered", [](RunConfig& c, const TextValue& v) { c.centered = v.as_bool(); }},
      {"omega_grid", [](RunConfig& c, const TextValue& v) { c.omega_grid = v.as_double_list(); }},
      {"radii",
       [](RunConfig& c, const TextValue& v) {
         c.radii = v.as_double_list();
         for (double r : c.radii)
           if (!(r > 0 && r <= 0.5)) v.fail("radii must lie in (0, 1/2]");
       }},
  };
  return table;
}

}  // namespace

const char* to_string(Task t) {
  for (const auto& [task, name] : kTaskNames)
    if (task == t) return name;
  return "?";
}

std::optional<Task> parse_task(std::string_view name) {
  for (const auto& [task, n] : kTaskNames)
    if (name == n) return task;
  return std::nullopt;
}

bool needs_family(Task t) {
  return t != Task::mahler_bound && t != Task::example_family && t != Task::cone_verify;
}

void apply_setting(RunConfig& cfg, const KeyValue& kv) {
  const auto& table = setters();
  const auto it = table.find(kv.key);
  if (it == table.end()) throw ParseError(kv.line, kv.column, "unknown key '" + kv.key + "'");
  it->second(cfg, kv.value);
}

RunConfig parse_config(std::string_view text, bool require_task) {
  RunConfig cfg;
  std::set<std::string> seen;
  for (const auto& section : split_sections(text)) {
    if (!section.kind.empty())
      throw ParseError(section.line, 1, "unexpected section [" + section.kind + "] in a run config");
    for (const auto& kv : section.key_values()) {
      if (!seen.insert(kv.key).second) throw ParseError(kv.line, kv.column, "duplicate key '" + kv.key + "'");
      apply_setting(cfg, kv);
    }
  }
  if (require_task && !seen.count("task")) throw ParseError(1, 1, "missing required key 'task'");
  return cfg;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

void validate_config(const RunConfig& cfg) {
  if (needs_family(cfg.task) && cfg.family.empty())
    throw std::invalid_argument(std::string("task '") + to_string(cfg.task) + "' needs a family file");
  if (cfg.m_max < cfg.m_min) throw std::invalid_argument("m_max must be at least m_min");
  if (cfg.task == Task::dimension_scan && !cfg.radii.empty() && cfg.radii.size() < 3)
    throw std::invalid_argument("dimension-scan needs at least 3 radii");
  if (!cfg.rational_point.empty() && cfg.denominator <= 0)
    throw std::invalid_argument("rational_point needs a positive denominator");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["task"] = to_string(task);
  j["family"] = family;
  if (probs) j["probs"] = *probs;
  j["seed"] = seed;
  j["out"] = out;
  j["n_steps"] = n_steps;
  j["n_trials"] = n_trials;
  j["burn_in"] = burn_in;
  j["k_list"] = k_list;
  j["n_samples"] = n_samples;
  j["integral_samples"] = integral_samples;
  j["member"] = member;
  j["point"] = point;
  j["poly"] = poly;
  j["m"] = m;
  j["variant"] = variant;
  j["ks"] = ks;
  j["m_min"] = m_min;
  j["m_max"] = m_max;
  j["cone"] = cone;
  j["cone_mode"] = cone_mode;
  j["cone_samples"] = cone_samples;
  j["N"] = N;
  j["subsamples"] = subsamples;
  j["rational_point"] = rational_point;
  j["denominator"] = denominator;
  j["K"] = K;
  j["grid"] = grid;
  j["letter"] = letter;
  j["level"] = level;
  j["centered"] = centered;
  j["omega_grid"] = omega_grid;
  j["radii"] = radii;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (value.is_null()) continue;
    KeyValue kv;
    kv.key = key;
    kv.value = parse_value(value.dump(), 1, 1);
    apply_setting(cfg, kv);
  }
  return cfg;
}

}  // namespace sadic
