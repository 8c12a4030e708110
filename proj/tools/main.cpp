#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "mrepp/experiments.hpp"
#include "mrepp/json_io.hpp"

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw mrepp::IoError("cannot open output file: " + path);
  return os;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void cmd_simulate(const std::string& map_str, const std::string& x0_str, std::size_t n,
                  std::size_t burn_in, std::uint64_t seed, const std::string& out) {
  mrepp::MapSpec map = mrepp::parse_map_string(map_str);
  double x0;
  if (x0_str == "random") {
    std::mt19937_64 rng(seed);
    x0 = mrepp::uniform01(rng);
  } else {
    x0 = std::stod(x0_str);
  }
  mrepp::Orbit orbit = mrepp::iterate(map, x0, n, burn_in);
  auto os = open_out(out);
  os << "t,x\n";
  for (std::size_t t = 0; t < orbit.states.size(); ++t)
    os << t << ',' << fmt(orbit.states[t]) << '\n';
}

void cmd_ei(const std::string& config_path, const std::string& out) {
  mrepp::ExperimentConfig config = mrepp::load_config(config_path);
  auto os = open_out(out);
  os << "n,theta_hat\n";
  for (std::size_t n : config.n_levels) {
    mrepp::LevelRun run = mrepp::run_level(config, n);
    mrepp::PooledLevel pooled = mrepp::pool_level(config, run);
    os << n << ',' << fmt(pooled.theta_hat) << '\n';
  }
}

void cmd_marks(const std::string& config_path, const std::string& out) {
  mrepp::ExperimentConfig config = mrepp::load_config(config_path);
  auto os = open_out(out);
  os << "n,replica_id,rescaled_time,raw_mark,scaled_mark,cluster_size,truncated\n";
  for (std::size_t n : config.n_levels) {
    mrepp::LevelRun run = mrepp::run_level(config, n);
    for (std::size_t r = 0; r < run.replicas.size(); ++r) {
      const auto& mp = run.replicas[r].process;
      for (std::size_t i = 0; i < mp.points.size(); ++i) {
        const auto& pt = mp.points[i];
        if (config.exclude_truncated && pt.truncated) continue;
        os << n << ',' << r << ',' << fmt(pt.rescaled_time) << ',' << fmt(pt.mark) << ','
           << fmt(mp.a_u * pt.mark) << ',' << pt.cluster_size << ',' << (pt.truncated ? 1 : 0)
           << '\n';
      }
    }
  }
}

void cmd_converge(const std::string& config_path, const std::string& out, const std::string& format) {
  mrepp::ExperimentConfig config = mrepp::load_config(config_path);
  mrepp::ExperimentReport report = mrepp::run_convergence(config);
  mrepp::emit_report(report,
                     format == "json" ? mrepp::ReportFormat::Json : mrepp::ReportFormat::Csv, out);
}

void cmd_sample_cpp(double theta, const std::string& mult_arg, double horizon, std::uint64_t seed,
                    const std::string& out) {
  std::string text = mult_arg;
  if (!text.empty() && text[0] != '{') {
    std::ifstream is(mult_arg);
    if (!is) throw mrepp::IoError("cannot open multiplicity spec: " + mult_arg);
    text.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
  }
  mrepp::CompoundPoissonSpec spec{theta, mrepp::multiplicity_from_json(mrepp::Json::parse(text))};
  std::mt19937_64 rng(seed);
  mrepp::CppRealization sample = mrepp::sample_compound_poisson(spec, horizon, rng);
  auto os = open_out(out);
  os << "time,mark\n";
  for (std::size_t i = 0; i < sample.times.size(); ++i)
    os << fmt(sample.times[i]) << ',' << fmt(sample.marks[i]) << '\n';
}

void cmd_induce(const std::string& config_path, const std::string& out) {
  mrepp::ExperimentConfig config = mrepp::load_config(config_path);
  auto rows = mrepp::transfer_check(config);
  auto os = open_out(out);
  os << "n,u_n,v_n,v_n_induced,mark_ks,mark_ks_threshold_99,count_ks,count_ks_threshold_99\n";
  for (const auto& row : rows) {
    os << row.n << ',' << fmt(row.u_n) << ',' << fmt(row.v_n) << ',' << fmt(row.v_n_induced) << ','
       << fmt(row.mark_ks.statistic) << ',' << fmt(row.mark_ks.threshold_99()) << ','
       << fmt(row.count_ks.statistic) << ',' << fmt(row.count_ks.threshold_99()) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exceedance point processes of chaotic interval maps"};
  app.require_subcommand(1);

  std::string map_str, x0_str = "random", config_path, out, format = "csv", mult_arg;
  std::size_t n = 1000, burn_in = mrepp::kDefaultBurnIn;
  std::uint64_t seed = 0;
  double theta = 1.0, horizon = 1.0;

  auto* simulate = app.add_subcommand("simulate", "Iterate a map and write the orbit");
  simulate->add_option("--map", map_str, "Map spec, e.g. mod1:2 or lsv:0.4")->required();
  simulate->add_option("--x0", x0_str, "Initial state or 'random'");
  simulate->add_option("--n", n, "Number of recorded states")->required();
  simulate->add_option("--burn-in", burn_in, "Discarded initial iterates");
  simulate->add_option("--seed", seed, "Seed for random --x0");
  simulate->add_option("--out", out, "Output CSV path")->required();

  auto* ei = app.add_subcommand("ei", "Extremal-index estimates per level");
  ei->add_option("--config", config_path)->required();
  ei->add_option("--out", out)->required();

  auto* marks = app.add_subcommand("marks", "Scaled cluster-mark samples");
  marks->add_option("--config", config_path)->required();
  marks->add_option("--out", out)->required();

  auto* converge = app.add_subcommand("converge", "Full convergence report");
  converge->add_option("--config", config_path)->required();
  converge->add_option("--out", out)->required();
  converge->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  auto* sample = app.add_subcommand("sample-cpp", "Sample a compound Poisson realization");
  sample->add_option("--theta", theta)->required();
  sample->add_option("--mult", mult_arg, "Multiplicity JSON (inline or a file path)")->required();
  sample->add_option("--horizon", horizon)->required();
  sample->add_option("--seed", seed);
  sample->add_option("--out", out)->required();

  auto* induce = app.add_subcommand("induce", "First-return transfer comparison");
  induce->add_option("--config", config_path)->required();
  induce->add_option("--out", out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) cmd_simulate(map_str, x0_str, n, burn_in, seed, out);
    if (ei->parsed()) cmd_ei(config_path, out);
    if (marks->parsed()) cmd_marks(config_path, out);
    if (converge->parsed()) cmd_converge(config_path, out, format);
    if (sample->parsed()) cmd_sample_cpp(theta, mult_arg, horizon, seed, out);
    if (induce->parsed()) cmd_induce(config_path, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
