#pragma once

// Flat `key = value` experiment configuration with section-prefixed keys
// (forest.n_trees, cat.alpha, ...). Unknown keys are rejected so typos fail
// loudly in experiment logs. One global `seed` drives every derived
// sub-seed; per-module seeds are not configurable.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dds/cat.hpp"
#include "dds/csv.hpp"
#include "dds/forest.hpp"
#include "dds/gpr.hpp"
#include "dds/model.hpp"

namespace dds {

struct RunConfig {
  ForestConfig forest;
  std::optional<Kernel> kernel;  // set only when the full gpr.* triple is given
  CatConfig cat;
  std::vector<Metric> schemes = {Metric::sinr};  // from cat.metric; may list several
  BuildOptions build;
  std::uint64_t seed = 0;
  int validate_repeats = 1;  // stochastic draws per record in the validate command
};

namespace detail {

struct ConfigParser {
  std::string ctx;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument(ctx + ":" + std::to_string(line) + ": " + what);
  }

  double number(std::string_view key, std::string_view value) const {
    double v = 0;
    if (!parse_double(value, v))
      fail("invalid number '" + std::string(value) + "' for key '" + std::string(key) + "'");
    return v;
  }

  std::int64_t integer(std::string_view key, std::string_view value) const {
    std::int64_t v = 0;
    if (!parse_i64(value, v))
      fail("invalid integer '" + std::string(value) + "' for key '" + std::string(key) + "'");
    return v;
  }

  bool boolean(std::string_view key, std::string_view value) const {
    if (value == "true" || value == "on" || value == "1") return true;
    if (value == "false" || value == "off" || value == "0") return false;
    fail("invalid boolean '" + std::string(value) + "' for key '" + std::string(key) + "'");
  }
};

}  // namespace detail

inline RunConfig parse_config_text(std::string_view text, const std::string& ctx) {
  RunConfig cfg;
  detail::ConfigParser p{ctx, 0};
  std::optional<double> sv, ls, nv;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++p.line;

    const std::string_view sv_line = trim(raw);
    if (sv_line.empty() || sv_line.front() == '#') continue;
    const std::size_t eq = sv_line.find('=');
    if (eq == std::string_view::npos) p.fail("expected 'key = value'");
    const std::string key{trim(sv_line.substr(0, eq))};
    const std::string_view value = trim(sv_line.substr(eq + 1));
    if (key.empty() || value.empty()) p.fail("expected 'key = value'");

    if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(p.integer(key, value));
    } else if (key == "forest.n_trees") {
      cfg.forest.n_trees = static_cast<int>(p.integer(key, value));
    } else if (key == "forest.feature_subset") {
      cfg.forest.feature_subset = static_cast<int>(p.integer(key, value));
    } else if (key == "forest.min_leaf") {
      cfg.forest.min_leaf = static_cast<int>(p.integer(key, value));
    } else if (key == "forest.max_depth") {
      cfg.forest.max_depth = static_cast<int>(p.integer(key, value));
    } else if (key == "forest.bootstrap") {
      cfg.forest.bootstrap = p.boolean(key, value);
    } else if (key == "gpr.signal_variance") {
      sv = p.number(key, value);
    } else if (key == "gpr.length_scale") {
      ls = p.number(key, value);
    } else if (key == "gpr.noise_variance") {
      nv = p.number(key, value);
    } else if (key == "gpr.max_points") {
      const auto v = p.integer(key, value);
      if (v < 0) p.fail("gpr.max_points must be >= 0");
      cfg.build.gpr_max_points = static_cast<std::size_t>(v);
    } else if (key == "dds.oob") {
      cfg.build.oob_predictions = p.boolean(key, value);
    } else if (key == "cat.t_min") {
      cfg.cat.t_min = p.number(key, value);
    } else if (key == "cat.t_max") {
      cfg.cat.t_max = p.number(key, value);
    } else if (key == "cat.alpha") {
      cfg.cat.alpha = p.number(key, value);
    } else if (key == "cat.phi_min") {
      cfg.cat.phi_min = p.number(key, value);
    } else if (key == "cat.phi_max") {
      cfg.cat.phi_max = p.number(key, value);
    } else if (key == "cat.source_rate") {
      const auto v = p.integer(key, value);
      if (v <= 0) p.fail("cat.source_rate must be > 0");
      cfg.cat.source_rate = static_cast<std::uint64_t>(v);
    } else if (key == "cat.tick") {
      cfg.cat.tick = p.number(key, value);
    } else if (key == "cat.periodic_interval") {
      cfg.cat.periodic_interval = p.number(key, value);
    } else if (key == "cat.metric") {
      cfg.schemes.clear();
      for (auto part : split_fields(value)) {
        const auto name = trim(part);
        const auto metric = metric_from_name(name);
        if (!metric) p.fail("unknown metric '" + std::string(name) + "'");
        cfg.schemes.push_back(*metric);
      }
      if (cfg.schemes.empty()) p.fail("cat.metric lists no schemes");
      cfg.cat.metric = cfg.schemes.front();
    } else if (key == "validate.repeats") {
      const auto v = p.integer(key, value);
      if (v < 1) p.fail("validate.repeats must be >= 1");
      cfg.validate_repeats = static_cast<int>(v);
    } else {
      p.fail("unknown key '" + key + "'");
    }
  }

  const int given = int(bool(sv)) + int(bool(ls)) + int(bool(nv));
  if (given != 0 && given != 3)
    throw std::invalid_argument(
        ctx + ": gpr.signal_variance, gpr.length_scale and gpr.noise_variance "
              "must be given together");
  if (given == 3) cfg.kernel = Kernel{*sv, *ls, *nv};
  return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
  return parse_config_text(read_text_file(path), path);
}

}  // namespace dds
