#include "cbtail/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "cbtail/errors.hpp"

namespace cbtail {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!item.empty()) out.push_back(std::move(item));
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  if (!item.empty()) out.push_back(std::move(item));
  return out;
}

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("key '{}': cannot parse '{}'", key, text));
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string s = lower(trim(text));
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError(fmt::format("key '{}': expected a boolean, got '{}'", key, text));
}

class Section {
 public:
  Section(const pt::ptree& tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> get(const std::string& key) {
    used_.insert(key);
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'))) {
      return trim(*v);
    }
    return std::nullopt;
  }

  std::string require(const std::string& key, const std::string& why) {
    auto v = get(key);
    if (!v) throw ConfigError(fmt::format("[{}] missing key '{}' ({})", name_, key, why));
    return *v;
  }

  void reject_unknown() const {
    for (const auto& [key, child] : tree_) {
      if (!used_.count(key)) {
        throw ConfigError(fmt::format("[{}] unknown key '{}'", name_, key));
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::string name_;
  std::set<std::string> used_;
};

CopulaModel parse_model(Section& s) {
  const std::string family = lower(s.require("model", "copula family"));
  auto number = [&](const std::string& key, const std::string& why) {
    return parse_value<double>(key, s.require(key, why));
  };
  try {
    if (family == "independence") return CopulaModel::independence();
    if (family == "comonotone") return CopulaModel::comonotone();
    if (family == "clayton") return CopulaModel::clayton(number("theta", "Clayton parameter"));
    if (family == "gaussian") {
      return CopulaModel::gaussian(number("rho_corr", "Gaussian correlation"));
    }
    if (family == "student_t") {
      // No defaults: the reference study leaves (rho, nu) unstated.
      const double r = number("rho_corr", "Student-t correlation");
      return CopulaModel::student_t(r, number("nu", "Student-t degrees of freedom"));
    }
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("model '{}': {}", family, e.what()));
  }
  throw ConfigError(fmt::format(
      "unknown model '{}' (expected independence, comonotone, clayton, gaussian, student_t)",
      family));
}

}  // namespace

std::string to_string(TailSide side) { return side == TailSide::Lower ? "lower" : "upper"; }

TailSide parse_side(const std::string& text) {
  const std::string s = lower(trim(text));
  if (s == "lower") return TailSide::Lower;
  if (s == "upper") return TailSide::Upper;
  throw ConfigError(fmt::format("side must be 'lower' or 'upper', got '{}'", text));
}

OutputFormat parse_format(const std::string& text) {
  const std::string s = lower(trim(text));
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ConfigError(fmt::format("format must be 'csv' or 'json', got '{}'", text));
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}:{}: {}", origin, e.line(), e.message()));
  }

  const auto schema = tree.get_optional<std::string>("schema");
  if (!schema) throw ConfigError(fmt::format("{}: missing top-level 'schema = 1'", origin));
  if (parse_value<int>("schema", *schema) != kConfigSchema) {
    throw ConfigError(fmt::format("{}: unsupported schema {} (this build reads schema {})",
                                  origin, trim(*schema), kConfigSchema));
  }
  for (const auto& [key, child] : tree) {
    if (key != "schema" && key != "experiment") {
      throw ConfigError(fmt::format("{}: unknown top-level entry '{}'", origin, key));
    }
  }
  const auto exp = tree.get_child_optional("experiment");
  if (!exp) throw ConfigError(fmt::format("{}: missing [experiment] section", origin));

  Section s(*exp, "experiment");
  ExperimentConfig c;
  c.model = parse_model(s);

  if (auto v = s.get("n")) {
    c.ns.clear();
    for (const auto& item : split_list(*v)) c.ns.push_back(parse_value<std::size_t>("n", item));
    if (c.ns.empty()) throw ConfigError("key 'n': empty list");
  }
  if (auto v = s.get("pairs")) {
    c.pairs.clear();
    for (const auto& item : split_list(*v)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw ConfigError(fmt::format("key 'pairs': expected alpha:beta, got '{}'", item));
      }
      c.pairs.emplace_back(parse_value<double>("pairs", item.substr(0, colon)),
                           parse_value<double>("pairs", item.substr(colon + 1)));
    }
    if (c.pairs.empty()) throw ConfigError("key 'pairs': empty list");
  }
  if (auto v = s.get("rho")) c.rho = parse_value<double>("rho", *v);
  if (auto v = s.get("side")) c.side = parse_side(*v);
  if (auto v = s.get("B")) c.B = parse_value<std::size_t>("B", *v);
  if (auto v = s.get("reps")) c.reps = parse_value<std::size_t>("reps", *v);
  if (auto v = s.get("level")) c.level = parse_value<double>("level", *v);
  if (auto v = s.get("seed")) c.seed = parse_value<std::uint64_t>("seed", *v);
  if (auto v = s.get("parallelism")) c.parallelism = parse_value<int>("parallelism", *v);
  if (auto v = s.get("output")) c.output = *v;
  if (auto v = s.get("format")) {
    c.format = parse_format(*v);
  } else {
    c.format = lower(c.output.extension().string()) == ".json" ? OutputFormat::Json
                                                                : OutputFormat::Csv;
  }
  if (auto v = s.get("record_timing")) c.record_timing = parse_bool("record_timing", *v);
  s.reject_unknown();

  if (c.B < 2) throw ConfigError(fmt::format("B must be >= 2, got {}", c.B));
  if (c.reps < 1) throw ConfigError("reps must be >= 1");
  if (!(c.level > 0.0 && c.level < 1.0)) {
    throw ConfigError(fmt::format("level must lie in (0, 1), got {}", c.level));
  }
  if (!(c.rho > 0.0)) throw ConfigError(fmt::format("rho must be > 0, got {}", c.rho));
  if (c.parallelism < 1) throw ConfigError("parallelism must be >= 1");

  if (const char* dir = std::getenv("CBTAIL_OUTPUT_DIR"); dir && *dir) {
    c.output = std::filesystem::path(dir) / c.output.filename();
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  return parse_config(in, path.string());
}

std::string canonical_config(const ExperimentConfig& c) {
  std::string out = fmt::format("schema={}\nmodel={}\nn=", kConfigSchema, c.model.describe());
  for (std::size_t i = 0; i < c.ns.size(); ++i) out += fmt::format("{}{}", i ? "," : "", c.ns[i]);
  out += "\npairs=";
  for (std::size_t i = 0; i < c.pairs.size(); ++i) {
    out += fmt::format("{}{}:{}", i ? "," : "", c.pairs[i].first, c.pairs[i].second);
  }
  out += fmt::format("\nrho={}\nside={}\nB={}\nreps={}\nlevel={}\nseed={}\n", c.rho,
                     to_string(c.side), c.B, c.reps, c.level, c.seed);
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace cbtail
