#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "htband/harness.hpp"

namespace htband {

namespace {

std::string locate(const std::string& message, int line, int column) {
  if (line <= 0) {
    return message;
  }
  return "line " + std::to_string(line) + ", column " +
         std::to_string(column) + ": " + message;
}

[[noreturn]] void fail(const std::string& field, const std::string& message,
                       const YAML::Node& at) {
  const auto mark = at.Mark();
  if (mark.is_null()) {
    throw ConfigError(field, message);
  }
  throw ConfigError(field, message, mark.line + 1, mark.column + 1);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void require_map(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) {
    fail(path.empty() ? "<root>" : path, "expected a table of key/value pairs",
         node);
  }
}

void check_keys(const YAML::Node& node, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      fail(join(path, key), "unknown key '" + key + "'", kv.first);
    }
  }
}

double read_real(const YAML::Node& node, const std::string& field) {
  try {
    if (!node.IsScalar()) {
      fail(field, "expected a number", node);
    }
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(field, "expected a number", node);
  }
}

std::size_t read_count(const YAML::Node& node, const std::string& field) {
  const double x = read_real(node, field);
  if (!(x >= 0.0) || x != std::floor(x) || x > 9.0e15) {
    fail(field, "expected a nonnegative integer", node);
  }
  return static_cast<std::size_t>(x);
}

std::string read_string(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) {
    fail(field, "expected a string", node);
  }
  return node.as<std::string>();
}

std::uint64_t read_seed(const YAML::Node& node, const std::string& field) {
  try {
    if (!node.IsScalar()) {
      fail(field, "expected an unsigned 64-bit integer", node);
    }
    return node.as<std::uint64_t>();
  } catch (const YAML::Exception&) {
    fail(field, "expected an unsigned 64-bit integer", node);
  }
}

void check_epsilon(double eps, const std::string& field,
                   const YAML::Node& at) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    fail(field, "epsilon must lie in (0,1]", at);
  }
}

InstanceSpec parse_instance(const YAML::Node& node) {
  const std::string path = "instance";
  require_map(node, path);
  if (!node["kind"]) {
    fail(join(path, "kind"), "missing required key", node);
  }
  InstanceSpec spec;
  spec.kind = read_string(node["kind"], join(path, "kind"));

  std::set<std::string> allowed{"kind", "epsilon"};
  const auto lb = parse_lower_bound_kind(spec.kind);
  if (spec.kind == "explicit") {
    allowed.insert({"u", "arms"});
  } else if (!lb) {
    fail(join(path, "kind"), "unknown instance kind '" + spec.kind + "'",
         node["kind"]);
  } else {
    allowed.insert("delta");
    switch (*lb) {
      case LowerBoundKind::UAdaptiveBase:
        allowed.insert("u");
        break;
      case LowerBoundKind::UAdaptiveAlt:
        allowed.insert({"u", "u_alt"});
        break;
      case LowerBoundKind::EpsAdaptiveBase:
        break;
      case LowerBoundKind::EpsAdaptiveAlt:
        allowed.insert("epsilon_alt");
        break;
      case LowerBoundKind::AssumptionLb:
        allowed.insert({"u", "num_arms", "alt_arm"});
        break;
    }
  }
  check_keys(node, path, allowed);

  auto& lbp = spec.lower_bound;
  if (node["epsilon"]) {
    lbp.epsilon = read_real(node["epsilon"], join(path, "epsilon"));
    check_epsilon(lbp.epsilon, join(path, "epsilon"), node["epsilon"]);
  }
  if (node["u"]) {
    lbp.u = read_real(node["u"], join(path, "u"));
    if (!(lbp.u >= 0.0)) {
      fail(join(path, "u"), "u must be >= 0", node["u"]);
    }
  }
  spec.params = {lbp.epsilon, lbp.u};

  if (spec.kind == "explicit") {
    const auto arms = node["arms"];
    if (!arms || !arms.IsSequence() || arms.size() == 0) {
      fail(join(path, "arms"), "expected a nonempty list of atom lists",
           arms ? arms : node);
    }
    for (std::size_t i = 0; i < arms.size(); ++i) {
      const std::string arm_path = join(path, "arms[" + std::to_string(i) + "]");
      const auto atoms = arms[i];
      if (!atoms.IsSequence() || atoms.size() == 0) {
        fail(arm_path, "expected a list of [value, mass] pairs", atoms);
      }
      std::vector<Atom> parsed;
      for (const auto& pair : atoms) {
        if (!pair.IsSequence() || pair.size() != 2) {
          fail(arm_path, "expected a [value, mass] pair", pair);
        }
        parsed.push_back({read_real(pair[0], arm_path),
                          read_real(pair[1], arm_path)});
      }
      spec.arms.push_back(std::move(parsed));
    }
    return spec;
  }

  if (!node["delta"]) {
    fail(join(path, "delta"), "missing required key", node);
  }
  lbp.gap_scale = read_real(node["delta"], join(path, "delta"));
  if (node["u_alt"]) {
    lbp.u_alt = read_real(node["u_alt"], join(path, "u_alt"));
  }
  if (node["epsilon_alt"]) {
    lbp.epsilon_alt = read_real(node["epsilon_alt"], join(path, "epsilon_alt"));
    check_epsilon(lbp.epsilon_alt, join(path, "epsilon_alt"),
                  node["epsilon_alt"]);
  }
  if (node["num_arms"]) {
    lbp.num_arms = read_count(node["num_arms"], join(path, "num_arms"));
  }
  if (node["alt_arm"]) {
    lbp.alt_arm = read_count(node["alt_arm"], join(path, "alt_arm"));
  }
  return spec;
}

PolicySpec parse_policy(const YAML::Node& node) {
  const std::string path = "policy";
  PolicySpec spec;
  if (node.IsScalar()) {
    spec.name = node.as<std::string>();
  } else {
    require_map(node, path);
    if (!node["name"]) {
      fail(join(path, "name"), "missing required key", node);
    }
    spec.name = read_string(node["name"], join(path, "name"));
  }
  if (spec.name != "adarucb" && spec.name != "robustucb-tm" &&
      spec.name != "uniform") {
    fail(join(path, "name"), "unknown policy '" + spec.name + "'", node);
  }
  if (node.IsScalar()) {
    return spec;
  }
  if (spec.name != "adarucb") {
    check_keys(node, path, {"name"});
    return spec;
  }
  check_keys(node, path, {"name", "c", "guard_c", "solver", "eta"});
  auto& cfg = spec.adarucb;
  if (node["c"]) {
    cfg.threshold.c = read_real(node["c"], join(path, "c"));
    if (!(cfg.threshold.c > 2.0)) {
      fail(join(path, "c"), "c must be > 2", node["c"]);
    }
    if (!node["guard_c"]) {
      cfg.guard_c = std::max(cfg.guard_c, cfg.threshold.c);
    }
  }
  if (node["guard_c"]) {
    cfg.guard_c = read_real(node["guard_c"], join(path, "guard_c"));
    if (!(cfg.guard_c >= cfg.threshold.c)) {
      fail(join(path, "guard_c"), "guard_c must be >= c", node["guard_c"]);
    }
  }
  if (node["eta"]) {
    cfg.threshold.eta = read_real(node["eta"], join(path, "eta"));
    if (!(cfg.threshold.eta > 0.0)) {
      fail(join(path, "eta"), "eta must be > 0", node["eta"]);
    }
  }
  if (node["solver"]) {
    const auto name = read_string(node["solver"], join(path, "solver"));
    const auto kind = parse_solver_kind(name);
    if (!kind) {
      fail(join(path, "solver"),
           "solver must be 'exact-segment-scan' or 'doubling'", node["solver"]);
    }
    cfg.threshold.solver = *kind;
  }
  return spec;
}

bool valid_name(const std::string& name) {
  return !name.empty() &&
         std::all_of(name.begin(), name.end(), [](unsigned char ch) {
           return std::isalnum(ch) || ch == '_' || ch == '-' || ch == '.';
         });
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message,
                         int line, int column)
    : std::runtime_error(locate(field + ": " + message, line, column)),
      field_(std::move(field)),
      line_(line),
      column_(column) {}

BanditInstance InstanceSpec::build() const {
  if (kind == "explicit") {
    std::vector<RewardDistribution> dists;
    for (std::size_t i = 0; i < arms.size(); ++i) {
      dists.emplace_back(arms[i], "arm" + std::to_string(i));
    }
    return BanditInstance(std::move(dists), params, "explicit");
  }
  const auto lb = parse_lower_bound_kind(kind);
  if (!lb) {
    throw std::domain_error("unknown instance kind '" + kind + "'");
  }
  return make_lb_instance(*lb, lower_bound);
}

ExperimentConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    const int line = e.mark.is_null() ? 0 : e.mark.line + 1;
    const int column = e.mark.is_null() ? 0 : e.mark.column + 1;
    throw ConfigError("<syntax>", e.msg, line, column);
  }
  if (!root || root.IsNull()) {
    throw ConfigError("<root>", "empty configuration");
  }
  require_map(root, "");
  check_keys(root, "",
             {"name", "instance", "policy", "horizons", "replications",
              "master_seed", "checkpoints", "output_dir", "parallelism"});

  ExperimentConfig cfg;
  for (const char* key : {"name", "instance", "policy", "horizons"}) {
    if (!root[key]) {
      throw ConfigError(key, "missing required key");
    }
  }
  cfg.name = read_string(root["name"], "name");
  if (!valid_name(cfg.name)) {
    fail("name", "name may only contain letters, digits, '_', '-' and '.'",
         root["name"]);
  }

  cfg.instance = parse_instance(root["instance"]);
  try {
    (void)cfg.instance.build();
  } catch (const std::exception& e) {
    fail("instance", e.what(), root["instance"]);
  }
  cfg.policy = parse_policy(root["policy"]);

  const auto horizons = root["horizons"];
  std::vector<YAML::Node> horizon_nodes;
  if (horizons.IsSequence()) {
    for (const auto& h : horizons) {
      horizon_nodes.push_back(h);
    }
  } else {
    horizon_nodes.push_back(horizons);
  }
  if (horizon_nodes.empty()) {
    fail("horizons", "horizons must be nonempty", horizons);
  }
  const bool paired = cfg.policy.name == "adarucb";
  for (const auto& h : horizon_nodes) {
    std::size_t t = read_count(h, "horizons");
    if (paired && t % 2 == 1) {
      cfg.warnings.push_back("horizon " + std::to_string(t) +
                             " is odd; rounded down to " +
                             std::to_string(t - 1) + " for paired policy " +
                             cfg.policy.name);
      --t;
    }
    if (t == 0) {
      fail("horizons", "horizons must be positive", h);
    }
    cfg.horizons.push_back(t);
  }
  std::sort(cfg.horizons.begin(), cfg.horizons.end());
  cfg.horizons.erase(std::unique(cfg.horizons.begin(), cfg.horizons.end()),
                     cfg.horizons.end());

  if (root["replications"]) {
    cfg.replications = read_count(root["replications"], "replications");
    if (cfg.replications < 1) {
      fail("replications", "replications must be >= 1", root["replications"]);
    }
  }
  if (root["master_seed"]) {
    cfg.master_seed = read_seed(root["master_seed"], "master_seed");
  }
  if (root["checkpoints"]) {
    const auto node = root["checkpoints"];
    if (node.IsScalar()) {
      if (node.as<std::string>() != "geometric") {
        fail("checkpoints", "expected 'geometric' or a list of pull counts",
             node);
      }
    } else if (node.IsSequence()) {
      for (const auto& c : node) {
        const auto t = read_count(c, "checkpoints");
        if (t == 0) {
          fail("checkpoints", "checkpoints must be positive", c);
        }
        cfg.checkpoints.push_back(t);
      }
      std::sort(cfg.checkpoints.begin(), cfg.checkpoints.end());
      cfg.checkpoints.erase(
          std::unique(cfg.checkpoints.begin(), cfg.checkpoints.end()),
          cfg.checkpoints.end());
    } else {
      fail("checkpoints", "expected 'geometric' or a list of pull counts",
           node);
    }
  }
  if (root["output_dir"]) {
    cfg.output_dir = read_string(root["output_dir"], "output_dir");
  }
  if (root["parallelism"]) {
    const auto node = root["parallelism"];
    if (node.IsScalar() && node.as<std::string>() == "auto") {
      cfg.parallelism = 0;
    } else {
      cfg.parallelism = read_count(node, "parallelism");
      if (cfg.parallelism == 0) {
        fail("parallelism", "expected 'auto' or a positive count", node);
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("<file>", "cannot read " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace htband
