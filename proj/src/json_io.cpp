#include "mrepp/json_io.hpp"

#include <cstdio>
#include <fstream>

namespace mrepp {

MapSpec parse_map_string(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("map spec must look like mod1:<m> or lsv:<alpha>");
  std::string family = text.substr(0, colon);
  std::string arg = text.substr(colon + 1);
  try {
    if (family == "mod1") return MapSpec::mod1(std::stoi(arg));
    if (family == "lsv") return MapSpec::lsv(std::stod(arg));
  } catch (const std::logic_error&) {
    throw ConfigError("bad numeric argument in map spec: " + text);
  }
  throw ConfigError("unknown map family: " + family);
}

std::string map_to_string(const MapSpec& map) {
  if (const auto* m = std::get_if<LinearMod1>(&map.variant)) return "mod1:" + std::to_string(m->m);
  if (const auto* l = std::get_if<Lsv>(&map.variant)) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "lsv:%.17g", l->alpha);
    return buf;
  }
  throw ConfigError("piecewise maps have no compact string form");
}

Json map_to_json(const MapSpec& map) {
  Json j;
  if (const auto* m = std::get_if<LinearMod1>(&map.variant)) {
    j["variant"] = "mod1";
    j["m"] = m->m;
  } else if (const auto* l = std::get_if<Lsv>(&map.variant)) {
    j["variant"] = "lsv";
    j["alpha"] = l->alpha;
  } else {
    const auto& pw = std::get<PiecewiseLinear>(map.variant);
    j["variant"] = "piecewise";
    j["breakpoints"] = pw.breakpoints;
    j["slopes"] = pw.slopes;
  }
  return j;
}

MapSpec map_from_json(const Json& j) {
  if (j.is_string()) return parse_map_string(j.get<std::string>());
  std::string variant = j.at("variant").get<std::string>();
  if (variant == "mod1") return MapSpec::mod1(j.at("m").get<int>());
  if (variant == "lsv") return MapSpec::lsv(j.at("alpha").get<double>());
  if (variant == "piecewise")
    return MapSpec::piecewise(j.at("breakpoints").get<std::vector<double>>(),
                              j.at("slopes").get<std::vector<double>>());
  throw ConfigError("unknown map variant: " + variant);
}

Json observable_to_json(const ObservableSpec& obs) {
  Json j;
  std::visit(
      [&j](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Type1Log>) {
          j["type"] = "log";
        } else if constexpr (std::is_same_v<T, Type2Pareto>) {
          j["type"] = "pareto";
          j["alpha"] = g.alpha;
        } else {
          j["type"] = "bounded";
          j["D"] = g.D;
          j["alpha"] = g.alpha;
        }
      },
      obs.g_type);
  j["zeta"] = obs.zeta;
  return j;
}

ObservableSpec observable_from_json(const Json& j) {
  std::string type = j.at("type").get<std::string>();
  double zeta = j.at("zeta").get<double>();
  if (type == "log") return ObservableSpec::log_type(zeta);
  if (type == "pareto") return ObservableSpec::pareto(j.at("alpha").get<double>(), zeta);
  if (type == "bounded")
    return ObservableSpec::bounded(j.at("D").get<double>(), j.at("alpha").get<double>(), zeta);
  throw ConfigError("unknown observable type: " + type);
}

Json multiplicity_to_json(const MultiplicityDist& dist) {
  Json j;
  std::visit(
      [&j](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Geometric>) {
          j["variant"] = "geometric";
          j["theta"] = d.theta;
        } else if constexpr (std::is_same_v<T, GpdExp>) {
          j["variant"] = "gpd_exp";
        } else if constexpr (std::is_same_v<T, GpdPareto>) {
          j["variant"] = "gpd_pareto";
          j["beta"] = d.beta;
        } else if constexpr (std::is_same_v<T, GpdBounded>) {
          j["variant"] = "gpd_bounded";
          j["gamma"] = d.gamma;
        } else if constexpr (std::is_same_v<T, AotLog>) {
          j["variant"] = "aot_log";
          j["M"] = d.expansion;
        } else if constexpr (std::is_same_v<T, AotPareto>) {
          j["variant"] = "aot_pareto";
          j["alpha"] = d.alpha;
          j["M"] = d.expansion;
        } else {
          j["variant"] = "aot_bounded";
          j["alpha"] = d.alpha;
          j["M"] = d.expansion;
        }
      },
      dist.variant);
  return j;
}

MultiplicityDist multiplicity_from_json(const Json& j) {
  std::string variant = j.at("variant").get<std::string>();
  if (variant == "geometric") return MultiplicityDist::geometric(j.at("theta").get<double>());
  if (variant == "gpd_exp") return MultiplicityDist::gpd_exp();
  if (variant == "gpd_pareto") return MultiplicityDist::gpd_pareto(j.at("beta").get<double>());
  if (variant == "gpd_bounded") return MultiplicityDist::gpd_bounded(j.at("gamma").get<double>());
  if (variant == "aot_log") return MultiplicityDist::aot_log(j.at("M").get<double>());
  if (variant == "aot_pareto")
    return MultiplicityDist::aot_pareto(j.at("alpha").get<double>(), j.at("M").get<double>());
  if (variant == "aot_bounded")
    return MultiplicityDist::aot_bounded(j.at("alpha").get<double>(), j.at("M").get<double>());
  throw ConfigError("unknown multiplicity variant: " + variant);
}

Json compound_poisson_to_json(const CompoundPoissonSpec& spec) {
  Json j;
  j["theta"] = spec.theta;
  j["mult"] = multiplicity_to_json(spec.mult);
  return j;
}

CompoundPoissonSpec compound_poisson_from_json(const Json& j) {
  CompoundPoissonSpec spec;
  spec.theta = j.at("theta").get<double>();
  spec.mult = multiplicity_from_json(j.at("mult"));
  return spec;
}

std::string kind_to_string(MarkKind kind) {
  switch (kind) {
    case MarkKind::Repp:
      return "repp";
    case MarkKind::Aot:
      return "aot";
    case MarkKind::Pot:
      return "pot";
  }
  throw ConfigError("unknown mark kind");
}

MarkKind kind_from_string(const std::string& s) {
  if (s == "repp") return MarkKind::Repp;
  if (s == "aot") return MarkKind::Aot;
  if (s == "pot") return MarkKind::Pot;
  throw ConfigError("unknown mark kind: " + s);
}

Json config_to_json(const ExperimentConfig& config) {
  Json j;
  j["map"] = map_to_string(config.map);
  j["observable"] = observable_to_json(config.observable);
  j["p"] = config.p;
  j["kind"] = kind_to_string(config.kind);
  j["tau"] = config.tau;
  j["n_levels"] = config.n_levels;
  j["replicas"] = config.replicas;
  j["master_seed"] = config.master_seed;
  if (config.threshold_mode.analytic) {
    j["threshold_mode"] = Json{{"mode", "analytic"}, {"density", config.threshold_mode.density}};
  } else {
    j["threshold_mode"] = Json{{"mode", "empirical"}};
  }
  j["exclude_truncated"] = config.exclude_truncated;
  if (config.induced)
    j["induced"] = Json{{"B", std::vector<double>{config.induced->base.lo, config.induced->base.hi}}};
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig config;
  config.map = map_from_json(j.at("map"));
  config.observable = observable_from_json(j.at("observable"));
  config.p = j.at("p").get<int>();
  config.kind = kind_from_string(j.at("kind").get<std::string>());
  config.tau = j.at("tau").get<double>();
  config.n_levels = j.at("n_levels").get<std::vector<std::size_t>>();
  config.replicas = j.at("replicas").get<std::size_t>();
  config.master_seed = j.at("master_seed").get<std::uint64_t>();
  const Json& mode = j.at("threshold_mode");
  std::string mode_name = mode.at("mode").get<std::string>();
  if (mode_name == "analytic") {
    config.threshold_mode.analytic = true;
    config.threshold_mode.density = mode.at("density").get<double>();
  } else if (mode_name == "empirical") {
    config.threshold_mode.analytic = false;
  } else {
    throw ConfigError("unknown threshold mode: " + mode_name);
  }
  if (j.contains("exclude_truncated")) config.exclude_truncated = j.at("exclude_truncated").get<bool>();
  if (j.contains("induced") && !j.at("induced").is_null()) {
    auto b = j.at("induced").at("B").get<std::vector<double>>();
    if (b.size() != 2 || !(b[0] < b[1])) throw ConfigError("induced.B must be [lo, hi] with lo < hi");
    config.induced = InducedCfg{Interval{b[0], b[1]}};
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file: " + path);
  Json j;
  try {
    j = Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("bad config JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace mrepp
