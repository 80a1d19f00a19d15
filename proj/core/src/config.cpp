#include "posauth/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "posauth/error.hpp"
#include "posauth/text.hpp"

namespace posauth {

namespace {

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (std::string_view item : split(text, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_double(item));
    } else if (parts.size() == 3) {
      const double start = parse_double(parts[0]);
      const double step = parse_double(parts[1]);
      const double stop = parse_double(parts[2]);
      if (!(step > 0.0) || stop < start) {
        throw InvalidArgument("range '" + std::string(item) + "' must be start:step:stop with step > 0");
      }
      const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
      for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    } else {
      throw InvalidArgument("malformed list item '" + std::string(item) + "'");
    }
  }
  return out;
}

Vec2 parse_vec2(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 2) throw InvalidArgument("expected two comma separated numbers");
  return Vec2(v[0], v[1]);
}

std::string vec2_text(const Vec2& v) { return format_double(v.x()) + ", " + format_double(v.y()); }

std::uint64_t parse_u64(const std::string& text) {
  const std::string_view t = trim(text);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string_view::npos) {
    throw InvalidArgument("expected a non-negative integer, got '" + std::string(t) + "'");
  }
  try {
    return std::stoull(std::string(t));
  } catch (const std::exception&) {
    throw InvalidArgument("integer out of range: '" + std::string(t) + "'");
  }
}

int parse_int(const std::string& text) {
  const std::uint64_t v = parse_u64(text);
  if (v > 1'000'000'000ULL) throw InvalidArgument("integer too large: '" + text + "'");
  return static_cast<int>(v);
}

std::string bool_free_kernel(KernelType k) { return k == KernelType::linear ? "linear" : "rbf"; }

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define POSAUTH_NUM(sec, name, member)                                                 \
  Field {                                                                              \
    sec, name, [](const ExperimentConfig& c) { return format_double(c.member); },      \
        [](ExperimentConfig& c, const std::string& v) { c.member = parse_double(v); } \
  }
#define POSAUTH_LIST(sec, name, member)                                                \
  Field {                                                                              \
    sec, name, [](const ExperimentConfig& c) { return join(c.member); },               \
        [](ExperimentConfig& c, const std::string& v) { c.member = parse_list(v); }   \
  }
#define POSAUTH_VEC2(sec, name, member)                                                \
  Field {                                                                              \
    sec, name, [](const ExperimentConfig& c) { return vec2_text(c.member); },          \
        [](ExperimentConfig& c, const std::string& v) { c.member = parse_vec2(v); }   \
  }
#define POSAUTH_SIZE(sec, name, member)                                                         \
  Field {                                                                                       \
    sec, name, [](const ExperimentConfig& c) { return std::to_string(c.member); },              \
        [](ExperimentConfig& c, const std::string& v) {                                         \
          c.member = static_cast<decltype(c.member)>(parse_u64(v));                             \
        }                                                                                       \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      POSAUTH_NUM("scenario", "road_length", scenario.road_length),
      POSAUTH_NUM("scenario", "road_width", scenario.road_width),
      POSAUTH_NUM("scenario", "rsu_spacing", scenario.rsu_spacing),
      POSAUTH_NUM("scenario", "rsu_range_limit", scenario.rsu_range_limit),
      POSAUTH_VEC2("scenario", "legit_start", scenario.legit_start),
      POSAUTH_VEC2("scenario", "attacker_start", scenario.attacker_start),
      POSAUTH_NUM("scenario", "speed", scenario.speed),
      POSAUTH_VEC2("scenario", "heading", scenario.heading),

      POSAUTH_NUM("channel", "tx_power", channel.tx_power),
      POSAUTH_NUM("channel", "carrier_freq", channel.carrier_freq),
      POSAUTH_NUM("channel", "pathloss_exponent", channel.pathloss_exponent),
      Field{"channel", "toa_scale",
            [](const ExperimentConfig& c) {
              return c.channel.toa_scale_mode == ToaScaleMode::fixed
                         ? format_double(c.channel.toa_scale_value)
                         : to_string(c.channel.toa_scale_mode);
            },
            [](ExperimentConfig& c, const std::string& v) {
              const auto t = trim(v);
              if (t == "literal") {
                c.channel.toa_scale_mode = ToaScaleMode::literal;
              } else if (t == "carrier") {
                c.channel.toa_scale_mode = ToaScaleMode::carrier;
              } else {
                c.channel.toa_scale_mode = ToaScaleMode::fixed;
                c.channel.toa_scale_value = parse_double(t);
              }
            }},
      POSAUTH_NUM("channel", "rf_speed", channel.rf_speed),

      POSAUTH_LIST("sweep", "lq_db", sweep.lq_db),
      POSAUTH_LIST("sweep", "thresholds", sweep.thresholds),
      POSAUTH_LIST("sweep", "speeds", sweep.speeds),
      POSAUTH_SIZE("sweep", "trials", sweep.trials),
      POSAUTH_NUM("sweep", "slot_duration", sweep.slot_duration),
      POSAUTH_NUM("sweep", "aoa_threshold", sweep.aoa_threshold),
      POSAUTH_NUM("sweep", "max_coverage_failure", sweep.max_coverage_failure),

      POSAUTH_LIST("roc", "lq_db", roc.lq_db),
      POSAUTH_LIST("roc", "speeds", roc.speeds),
      POSAUTH_SIZE("roc", "grid_points", roc.grid_points),
      Field{"roc", "grid",
            [](const ExperimentConfig& c) {
              return std::string(c.roc.grid == RocGrid::quantile ? "quantile" : "linear");
            },
            [](ExperimentConfig& c, const std::string& v) {
              const auto t = trim(v);
              if (t == "quantile") c.roc.grid = RocGrid::quantile;
              else if (t == "linear") c.roc.grid = RocGrid::linear;
              else throw InvalidArgument("grid must be quantile or linear");
            }},
      POSAUTH_NUM("roc", "max_threshold", roc.max_threshold),

      POSAUTH_NUM("dataset", "region_size", dataset.region_size),
      Field{"dataset", "rsu_count",
            [](const ExperimentConfig& c) { return std::to_string(c.dataset.rsu_count); },
            [](ExperimentConfig& c, const std::string& v) { c.dataset.rsu_count = parse_int(v); }},
      POSAUTH_NUM("dataset", "range_limit", dataset.range_limit),
      POSAUTH_NUM("dataset", "lq_min_db", dataset.lq_min_db),
      POSAUTH_NUM("dataset", "lq_max_db", dataset.lq_max_db),
      POSAUTH_NUM("dataset", "lq_step_db", dataset.lq_step_db),
      POSAUTH_SIZE("dataset", "slots_per_lq", dataset.slots_per_lq),
      POSAUTH_NUM("dataset", "speed_min", dataset.speed_min),
      POSAUTH_NUM("dataset", "speed_max", dataset.speed_max),
      POSAUTH_NUM("dataset", "dt", dataset.dt),
      Field{"dataset", "heading_retries",
            [](const ExperimentConfig& c) { return std::to_string(c.dataset.heading_retries); },
            [](ExperimentConfig& c, const std::string& v) {
              c.dataset.heading_retries = parse_int(v);
            }},

      Field{"model", "kind",
            [](const ExperimentConfig& c) { return std::string(to_string(c.model.kind)); },
            [](ExperimentConfig& c, const std::string& v) {
              c.model.kind = parse_regressor_kind(trim(v));
            }},
      Field{"model", "path", [](const ExperimentConfig& c) { return c.model.path; },
            [](ExperimentConfig& c, const std::string& v) { c.model.path = std::string(trim(v)); }},
      Field{"model", "dataset_path", [](const ExperimentConfig& c) { return c.model.dataset_path; },
            [](ExperimentConfig& c, const std::string& v) {
              c.model.dataset_path = std::string(trim(v));
            }},
      POSAUTH_NUM("model", "split_ratio", model.split_ratio),
      Field{"model", "tree_max_depth",
            [](const ExperimentConfig& c) { return std::to_string(c.model.tree.max_depth); },
            [](ExperimentConfig& c, const std::string& v) { c.model.tree.max_depth = parse_int(v); }},
      POSAUTH_SIZE("model", "tree_min_leaf", model.tree.min_leaf),
      POSAUTH_NUM("model", "svr_c", model.svr.c),
      POSAUTH_NUM("model", "svr_epsilon", model.svr.epsilon),
      Field{"model", "svr_kernel",
            [](const ExperimentConfig& c) { return bool_free_kernel(c.model.svr.kernel); },
            [](ExperimentConfig& c, const std::string& v) {
              const auto t = trim(v);
              if (t == "linear") c.model.svr.kernel = KernelType::linear;
              else if (t == "rbf") c.model.svr.kernel = KernelType::rbf;
              else throw InvalidArgument("svr_kernel must be linear or rbf");
            }},
      POSAUTH_NUM("model", "svr_gamma", model.svr.gamma),
      POSAUTH_NUM("model", "svr_tolerance", model.svr.tolerance),
      POSAUTH_SIZE("model", "svr_max_iterations", model.svr.max_iterations),

      POSAUTH_SIZE("run", "seed", master_seed),
      Field{"run", "output_dir", [](const ExperimentConfig& c) { return c.output_dir; },
            [](ExperimentConfig& c, const std::string& v) { c.output_dir = std::string(trim(v)); }},
  };
  return table;
}

#undef POSAUTH_NUM
#undef POSAUTH_LIST
#undef POSAUTH_VEC2
#undef POSAUTH_SIZE

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void require_speeds(const std::vector<double>& speeds, const char* where) {
  require(!speeds.empty(), std::string(where) + " speeds must be non-empty");
  for (double s : speeds) {
    require(s >= 0.0 && s <= kMaxVehicleSpeed,
            std::string(where) + " speeds must lie within [0, 33] m/s");
  }
}

}  // namespace

SweepSpec::SweepSpec() {
  for (int i = 0; i <= 20; ++i) lq_db.push_back(static_cast<double>(i));
}

void validate(const ExperimentConfig& c) {
  require(!c.sweep.lq_db.empty(), "[sweep] lq_db must be non-empty");
  require(!c.sweep.thresholds.empty(), "[sweep] thresholds must be non-empty");
  for (double t : c.sweep.thresholds) require(t >= 0.0, "[sweep] thresholds must be >= 0");
  require_speeds(c.sweep.speeds, "[sweep]");
  require(c.sweep.trials >= 1, "[sweep] trials must be >= 1");
  require(c.sweep.slot_duration > 0.0, "[sweep] slot_duration must be positive");
  require(c.sweep.aoa_threshold >= 0.0, "[sweep] aoa_threshold must be >= 0");
  require(c.sweep.max_coverage_failure >= 0.0 && c.sweep.max_coverage_failure <= 1.0,
          "[sweep] max_coverage_failure must lie in [0, 1]");
  require(!c.roc.lq_db.empty(), "[roc] lq_db must be non-empty");
  require_speeds(c.roc.speeds, "[roc]");
  require(c.roc.grid_points >= 2, "[roc] grid_points must be >= 2");
  require(c.roc.max_threshold >= 0.0, "[roc] max_threshold must be >= 0");
  require(c.model.split_ratio > 0.0 && c.model.split_ratio < 1.0,
          "[model] split_ratio must lie strictly between 0 and 1");
  require(c.scenario.speed >= 0.0 && c.scenario.speed <= kMaxVehicleSpeed,
          "[scenario] speed must lie within [0, 33] m/s");
  try {
    validate(c.channel);
    validate(c.dataset);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }

  std::map<std::string, std::map<std::string, const Field*>> index;
  for (const Field& f : fields()) index[f.section][f.key] = &f;

  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("key '" + section + "' must appear inside a [section]");
    }
    const auto sec = index.find(section);
    if (sec == index.end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) {
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      }
      try {
        it->second->set(config, value.data());
      } catch (const InvalidArgument& e) {
        throw ConfigError("[" + section + "] " + key + ": " + e.what());
      }
    }
  }
  validate(config);
  return config;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  std::string current;
  for (const Field& f : fields()) {
    if (f.section != current) {
      if (!current.empty()) out += '\n';
      out += '[' + f.section + "]\n";
      current = f.section;
    }
    out += f.key + " = " + f.get(config) + '\n';
  }
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace posauth
