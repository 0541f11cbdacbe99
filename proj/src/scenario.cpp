#include "csrgame/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "csrgame/errors.hpp"

namespace csrgame {

namespace {

struct ParamField {
  const char* key;
  double ModelParams::*member;
};

constexpr ParamField kParamFields[] = {
    {"alpha", &ModelParams::alpha},     {"beta_s", &ModelParams::beta_s},
    {"beta_m", &ModelParams::beta_m},   {"beta_r", &ModelParams::beta_r},
    {"tau", &ModelParams::tau},         {"theta", &ModelParams::theta},
    {"delta_s", &ModelParams::delta_s}, {"delta_m", &ModelParams::delta_m},
    {"delta_r", &ModelParams::delta_r}, {"d", &ModelParams::d},
    {"d_hat", &ModelParams::d_hat},     {"a", &ModelParams::a},
    {"b", &ModelParams::b},             {"v", &ModelParams::v},
    {"z", &ModelParams::z},             {"c", &ModelParams::c},
    {"x1", &ModelParams::x1},
};

constexpr const char* kOptionKeys[] = {"tolerance", "oracle", "strict_alpha", "seed"};

template <typename T>
T scalar_as(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) {
    throw ParseError(fmt::format("field '{}' must be a scalar", field), node.Mark().line + 1, field);
  }
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError(fmt::format("field '{}' has invalid value '{}'", field, node.Scalar()),
                     node.Mark().line + 1, field);
  }
}

void check_keys(const YAML::Node& map, const std::string& section,
                const std::vector<std::string>& allowed, std::vector<std::string>& problems) {
  for (const auto& entry : map) {
    const auto key = entry.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      problems.push_back(fmt::format("unknown field '{}{}' (line {})", section, key,
                                     entry.first.Mark().line + 1));
    }
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const ScenarioOverrides& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line + 1);
  }
  if (!root.IsMap()) throw ParseError("scenario must be a key-value mapping", 1);

  Scenario scenario;
  std::vector<std::string> problems;
  check_keys(root, "", {"name", "params", "options"}, problems);

  if (const auto name = root["name"]; name) {
    scenario.name = scalar_as<std::string>(name, "name");
    static const std::regex kSafeName("[A-Za-z0-9_.-]+");
    if (!std::regex_match(scenario.name, kSafeName)) {
      problems.push_back(fmt::format(
          "name = '{}' must be non-empty and use only letters, digits, '_', '-', '.'",
          scenario.name));
    }
  } else {
    problems.push_back("missing required field 'name'");
  }

  const YAML::Node params = root["params"];
  bool params_complete = false;
  if (!params || !params.IsMap()) {
    problems.push_back("missing required mapping 'params'");
  } else {
    const std::size_t before = problems.size();
    std::vector<std::string> allowed{"horizon_T"};
    for (const auto& f : kParamFields) allowed.emplace_back(f.key);
    check_keys(params, "params.", allowed, problems);
    for (const auto& f : kParamFields) {
      const std::string field = std::string("params.") + f.key;
      if (const auto node = params[f.key]; node) {
        scenario.params.*f.member = scalar_as<double>(node, field);
      } else {
        problems.push_back(fmt::format("missing required field '{}'", field));
      }
    }
    if (const auto node = params["horizon_T"]; node) {
      scenario.params.horizon = scalar_as<int>(node, "params.horizon_T");
    } else {
      problems.push_back("missing required field 'params.horizon_T'");
    }
    params_complete = problems.size() == before;
  }

  if (const auto options = root["options"]; options) {
    if (!options.IsMap()) {
      problems.push_back("'options' must be a mapping");
    } else {
      check_keys(options, "options.", {std::begin(kOptionKeys), std::end(kOptionKeys)}, problems);
      auto& o = scenario.options;
      if (const auto n = options["tolerance"]; n) o.tolerance = scalar_as<double>(n, "options.tolerance");
      if (const auto n = options["oracle"]; n) o.oracle = scalar_as<bool>(n, "options.oracle");
      if (const auto n = options["strict_alpha"]; n) {
        o.strict_alpha = scalar_as<bool>(n, "options.strict_alpha");
      }
      if (const auto n = options["seed"]; n) o.seed = scalar_as<std::uint64_t>(n, "options.seed");
    }
  }

  auto& o = scenario.options;
  if (overrides.tolerance) o.tolerance = *overrides.tolerance;
  if (overrides.oracle) o.oracle = *overrides.oracle;
  if (overrides.strict_alpha) o.strict_alpha = *overrides.strict_alpha;
  if (overrides.seed) o.seed = *overrides.seed;
  if (!(o.tolerance > 0.0) || !std::isfinite(o.tolerance)) {
    problems.push_back(fmt::format("tolerance = {} violates bound > 0", o.tolerance));
  }

  // Bounds are only meaningful once every parameter was read.
  if (params_complete) {
    for (auto& p : validation_errors(scenario.params, {.strict_alpha = o.strict_alpha})) {
      problems.push_back(std::move(p));
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open scenario file '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), overrides);
}

}  // namespace csrgame
