#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "stagebo/harness.hpp"

namespace stagebo::harness {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigError("invalid value for " + key + ": '" + value + "'");
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  return parse_number<std::size_t>(key, value);
}

bool parse_bool(const std::string& key, const std::string& value) {
  const auto v = lower(value);
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + value + "'");
}

/// Comma-separated seeds; `a-b` denotes an inclusive range.
std::vector<std::uint64_t> parse_seeds(const std::string& value) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      seeds.push_back(parse_number<std::uint64_t>("seeds", item));
      continue;
    }
    const auto lo = parse_number<std::uint64_t>("seeds", trim(item.substr(0, dash)));
    const auto hi = parse_number<std::uint64_t>("seeds", trim(item.substr(dash + 1)));
    if (hi < lo) throw ConfigError("empty seed range '" + item + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ConfigError("seeds must be non-empty");
  return seeds;
}

template <typename E, std::size_t N>
E parse_enum(const std::string& key, const std::string& value, const std::array<E, N>& options) {
  const auto v = lower(value);
  for (E e : options) {
    if (to_string(e) == v) return e;
  }
  throw ConfigError("invalid value for " + key + ": '" + value + "'");
}

}  // namespace

std::string_view to_string(stage::Mode mode) {
  switch (mode) {
    case stage::Mode::unconstrained: return "unconstrained";
    case stage::Mode::constrained: return "constrained";
    case stage::Mode::preference: return "preference";
  }
  return "unconstrained";
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::stage: return "stage";
    case Algorithm::random: return "random";
    case Algorithm::sobol: return "sobol";
  }
  return "stage";
}

std::string_view to_string(stage::ObjectiveSchedule schedule) {
  switch (schedule) {
    case stage::ObjectiveSchedule::round_robin: return "round_robin";
    case stage::ObjectiveSchedule::random: return "random";
    case stage::ObjectiveSchedule::feasible: return "feasible";
  }
  return "round_robin";
}

std::string_view to_string(stage::TargetRule rule) {
  return rule == stage::TargetRule::maxmin ? "maxmin" : "random_lexicographic";
}

std::string_view to_string(stage::QueryRule rule) {
  return rule == stage::QueryRule::cei ? "cei" : "direct_sample";
}

void apply_setting(RunConfig& config, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = lower(trim(raw_key));
  const std::string value = trim(raw_value);
  auto& s = config.stage;
  if (key == "problem") {
    config.problem = value;
  } else if (key == "mode") {
    config.mode = parse_enum(key, value,
                             std::array{stage::Mode::unconstrained, stage::Mode::constrained, stage::Mode::preference});
  } else if (key == "budget") {
    config.budget = parse_count(key, value);
  } else if (key == "seeds" || key == "seed") {
    config.seeds = parse_seeds(value);
  } else if (key == "init") {
    config.init = parse_count(key, value);
  } else if (key == "algorithm") {
    config.algorithm = parse_enum(key, value, std::array{Algorithm::stage, Algorithm::random, Algorithm::sobol});
  } else if (key == "out_dir" || key == "out") {
    config.out_dir = value;
  } else if (key == "cache_dir") {
    config.cache_dir = value;
  } else if (key == "metrics_every") {
    config.metrics_every = parse_count(key, value);
  } else if (key == "wall_clock") {
    config.wall_clock = parse_bool(key, value);
  } else if (key == "json") {
    config.write_json = parse_bool(key, value);
  } else if (key == "jobs") {
    config.jobs = parse_count(key, value);
  } else if (key == "front_points") {
    config.front_points = parse_count(key, value);
  } else if (key == "slack") {
    s.slack = parse_number<double>(key, value);
  } else if (key == "nsga_pop") {
    s.nsga_population = parse_count(key, value);
  } else if (key == "nsga_gens") {
    s.nsga_generations = parse_count(key, value);
  } else if (key == "cei_starts") {
    s.cei_starts = parse_count(key, value);
  } else if (key == "rff_features") {
    s.rff_features = parse_count(key, value);
  } else if (key == "objective_schedule") {
    s.objective_schedule = parse_enum(key, value,
                                      std::array{stage::ObjectiveSchedule::round_robin,
                                                 stage::ObjectiveSchedule::random, stage::ObjectiveSchedule::feasible});
  } else if (key == "target_rule") {
    s.target_rule = parse_enum(key, value,
                               std::array{stage::TargetRule::maxmin, stage::TargetRule::random_lexicographic});
  } else if (key == "query_rule") {
    s.query_rule = parse_enum(key, value, std::array{stage::QueryRule::cei, stage::QueryRule::direct_sample});
  } else if (key == "normalize_objectives") {
    s.normalize_objectives = parse_bool(key, value);
  } else if (key == "gp_restarts") {
    s.gp_restarts = parse_number<int>(key, value);
  } else if (key == "gp_max_iterations") {
    s.gp_max_iterations = parse_number<int>(key, value);
  } else {
    throw ConfigError("unknown config key '" + raw_key + "'");
  }
}

void apply_config_text(RunConfig& config, std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(config, stripped.substr(0, eq), stripped.substr(eq + 1));
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  apply_config_text(config, buffer.str());
}

std::size_t init_size(const RunConfig& config, const problems::ProblemSpec& problem) {
  return config.init.value_or(2 * (problem.dim_x + 1));
}

problems::ProblemSpec validate(const RunConfig& config) {
  auto problem = problems::find_problem(config.problem);
  if (!problem) throw ConfigError("unknown problem '" + config.problem + "'");
  if (config.seeds.empty()) throw ConfigError("seeds must be non-empty");
  const std::size_t init = init_size(config, *problem);
  if (init < 2) throw ConfigError("init must be at least 2");
  if (config.budget <= init) {
    throw ConfigError("budget (" + std::to_string(config.budget) + ") must exceed init (" + std::to_string(init) + ")");
  }
  if (config.metrics_every == 0) throw ConfigError("metrics_every must be positive");
  if (config.front_points < 2) throw ConfigError("front_points must be at least 2");
  switch (config.mode) {
    case stage::Mode::unconstrained:
      if (problem->constrained()) {
        throw ConfigError("problem " + problem->name + " has constraints; use mode = constrained");
      }
      break;
    case stage::Mode::constrained:
      if (!problem->constrained()) throw ConfigError("problem " + problem->name + " has no constraints");
      break;
    case stage::Mode::preference:
      if (!problem->preference) throw ConfigError("problem " + problem->name + " has no preference region");
      break;
  }
  const auto& s = config.stage;
  if (s.nsga_population < 2 || s.nsga_population % 2 != 0) {
    throw ConfigError("nsga_pop must be even and at least 2");
  }
  if (s.nsga_generations == 0) throw ConfigError("nsga_gens must be positive");
  if (s.rff_features == 0) throw ConfigError("rff_features must be positive");
  if (s.cei_starts == 0) throw ConfigError("cei_starts must be positive");
  if (!(s.slack >= 0.0)) throw ConfigError("slack must be non-negative");
  if (s.gp_restarts < 1 || s.gp_max_iterations < 1) throw ConfigError("gp settings must be positive");
  return *problem;
}

}  // namespace stagebo::harness
