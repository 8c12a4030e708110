#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "mrepp/experiments.hpp"
#include "mrepp/json_io.hpp"

namespace py = pybind11;
using namespace mrepp;

namespace {

std::vector<Interval> to_intervals(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<Interval> out;
  out.reserve(pairs.size());
  for (const auto& [lo, hi] : pairs) out.push_back({lo, hi});
  return out;
}

}  // namespace

PYBIND11_MODULE(mrepp, m) {
  m.doc() = "Exceedance point processes of chaotic interval maps";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Interval>(m, "Interval")
      .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
      .def_readonly("lo", &Interval::lo)
      .def_readonly("hi", &Interval::hi)
      .def("contains", &Interval::contains)
      .def("length", &Interval::length);

  py::class_<MapSpec>(m, "MapSpec")
      .def_static("mod1", &MapSpec::mod1, py::arg("m"))
      .def_static("lsv", &MapSpec::lsv, py::arg("alpha"))
      .def_static("piecewise", &MapSpec::piecewise, py::arg("breakpoints"), py::arg("slopes"))
      .def_static("parse", &parse_map_string, py::arg("text"))
      .def("__repr__", [](const MapSpec& spec) {
        return "MapSpec(" + map_to_json(spec).dump() + ")";
      });

  py::class_<Orbit>(m, "Orbit")
      .def_readonly("states", &Orbit::states)
      .def_readonly("seed", &Orbit::seed)
      .def_readonly("burn_in", &Orbit::burn_in);

  py::class_<InducedSeries>(m, "InducedSeries")
      .def_readonly("induced_states", &InducedSeries::induced_states)
      .def_readonly("return_times", &InducedSeries::return_times)
      .def_readonly("cumulative_times", &InducedSeries::cumulative_times);

  py::class_<PeriodicCheck>(m, "PeriodicCheck")
      .def_readonly("is_periodic", &PeriodicCheck::is_periodic)
      .def_readonly("deriv_product", &PeriodicCheck::deriv_product);

  m.def("map_apply", &map_apply, py::arg("map"), py::arg("x"));
  m.def("map_derivative", &map_derivative, py::arg("map"), py::arg("x"));
  m.def("iterate", &iterate, py::arg("map"), py::arg("x0"), py::arg("n"), py::arg("burn_in") = 0);
  m.def("verify_periodic", &verify_periodic, py::arg("map"), py::arg("zeta"), py::arg("p"),
        py::arg("tol") = kPeriodicTol);
  m.def(
      "hitting_time",
      [](const Orbit& orbit, std::pair<double, double> target, std::size_t start) {
        return hitting_time(orbit, {target.first, target.second}, start);
      },
      py::arg("orbit"), py::arg("target"), py::arg("start") = 0);
  m.def(
      "induce",
      [](const MapSpec& map, std::pair<double, double> base, double x0, std::size_t n_returns) {
        return induce(map, {base.first, base.second}, x0, n_returns);
      },
      py::arg("map"), py::arg("base"), py::arg("x0"), py::arg("n_returns"));

  py::class_<ObservableSpec>(m, "ObservableSpec")
      .def_static("log_type", &ObservableSpec::log_type, py::arg("zeta"))
      .def_static("pareto", &ObservableSpec::pareto, py::arg("alpha"), py::arg("zeta"))
      .def_static("bounded", &ObservableSpec::bounded, py::arg("D"), py::arg("alpha"),
                  py::arg("zeta"))
      .def_readonly("zeta", &ObservableSpec::zeta);

  py::class_<ThresholdLevel>(m, "ThresholdLevel")
      .def_readonly("u", &ThresholdLevel::u)
      .def_readonly("tail_prob", &ThresholdLevel::tail_prob)
      .def_readonly("v_u", &ThresholdLevel::v_u)
      .def_readonly("a_u", &ThresholdLevel::a_u);

  m.def("evaluate", &evaluate, py::arg("obs"), py::arg("x"));
  m.def("g_inverse", &g_inverse, py::arg("obs"), py::arg("u"));
  m.def("scaling_a", &scaling_a, py::arg("obs"), py::arg("u"));
  m.def(
      "threshold_analytic",
      [](const ObservableSpec& obs, std::size_t n, double tau, double density) {
        return threshold_from_tau(obs, n, tau, AnalyticMode{density});
      },
      py::arg("obs"), py::arg("n"), py::arg("tau"), py::arg("density") = 1.0);
  m.def(
      "threshold_empirical",
      [](const ObservableSpec& obs, std::size_t n, double tau, const std::vector<double>& samples) {
        return threshold_from_tau(obs, n, tau, samples);
      },
      py::arg("obs"), py::arg("n"), py::arg("tau"), py::arg("samples"));

  py::enum_<MarkKind>(m, "MarkKind")
      .value("REPP", MarkKind::Repp)
      .value("AOT", MarkKind::Aot)
      .value("POT", MarkKind::Pot);

  py::class_<ExceedanceEvent>(m, "ExceedanceEvent")
      .def_readonly("time", &ExceedanceEvent::time)
      .def_readonly("excess", &ExceedanceEvent::excess);

  py::class_<ExceedanceSeries>(m, "ExceedanceSeries")
      .def_readonly("u", &ExceedanceSeries::u)
      .def_readonly("series_length", &ExceedanceSeries::series_length)
      .def_readonly("events", &ExceedanceSeries::events);

  py::class_<Cluster>(m, "Cluster")
      .def_readonly("times", &Cluster::times)
      .def_readonly("excesses", &Cluster::excesses)
      .def_readonly("truncated", &Cluster::truncated);

  py::class_<MarkedPoint>(m, "MarkedPoint")
      .def_readonly("rescaled_time", &MarkedPoint::rescaled_time)
      .def_readonly("mark", &MarkedPoint::mark)
      .def_readonly("cluster_size", &MarkedPoint::cluster_size)
      .def_readonly("truncated", &MarkedPoint::truncated);

  py::class_<MarkedPointProcess>(m, "MarkedPointProcess")
      .def_readonly("points", &MarkedPointProcess::points)
      .def_readonly("u", &MarkedPointProcess::u)
      .def_readonly("v_u", &MarkedPointProcess::v_u)
      .def_readonly("a_u", &MarkedPointProcess::a_u)
      .def_readonly("p", &MarkedPointProcess::p)
      .def_readonly("kind", &MarkedPointProcess::kind)
      .def("scaled_mark", &MarkedPointProcess::scaled_mark, py::arg("i"));

  m.def(
      "extract_exceedances",
      [](const std::vector<double>& values, double u) { return extract_exceedances(values, u); },
      py::arg("values"), py::arg("u"));
  m.def("identify_clusters", &identify_clusters, py::arg("exceedances"), py::arg("p"));
  m.def("compute_mark", &compute_mark, py::arg("cluster"), py::arg("kind"));
  m.def(
      "build_mrepp",
      [](const std::vector<double>& values, const ThresholdLevel& level, int p, MarkKind kind) {
        return build_mrepp(values, level, p, kind);
      },
      py::arg("values"), py::arg("level"), py::arg("p"), py::arg("kind"));
  m.def(
      "count_on_interval",
      [](const MarkedPointProcess& mp, const std::vector<std::pair<double, double>>& J,
         bool scaled) { return count_on_interval(mp, to_intervals(J), scaled); },
      py::arg("process"), py::arg("intervals"), py::arg("scaled") = false);
  m.def(
      "max_statistic",
      [](const std::vector<double>& values, double u) {
        auto s = max_statistic(values, u);
        return py::make_tuple(s.m_n, s.no_exceedance);
      },
      py::arg("values"), py::arg("u"));

  py::class_<MultiplicityDist>(m, "MultiplicityDist")
      .def_static("geometric", &MultiplicityDist::geometric, py::arg("theta"))
      .def_static("gpd_exp", &MultiplicityDist::gpd_exp)
      .def_static("gpd_pareto", &MultiplicityDist::gpd_pareto, py::arg("beta"))
      .def_static("gpd_bounded", &MultiplicityDist::gpd_bounded, py::arg("gamma"))
      .def_static("aot_log", &MultiplicityDist::aot_log, py::arg("M"))
      .def_static("aot_pareto", &MultiplicityDist::aot_pareto, py::arg("alpha"), py::arg("M"))
      .def_static("aot_bounded", &MultiplicityDist::aot_bounded, py::arg("alpha"), py::arg("M"))
      .def_static(
          "from_json",
          [](const std::string& text) { return multiplicity_from_json(Json::parse(text)); },
          py::arg("text"))
      .def("to_json", [](const MultiplicityDist& dist) { return multiplicity_to_json(dist).dump(); })
      .def("__repr__", [](const MultiplicityDist& dist) {
        return "MultiplicityDist(" + multiplicity_to_json(dist).dump() + ")";
      });

  py::class_<CompoundPoissonSpec>(m, "CompoundPoissonSpec")
      .def(py::init<double, MultiplicityDist>(), py::arg("theta"), py::arg("mult"))
      .def_readonly("theta", &CompoundPoissonSpec::theta)
      .def_readonly("mult", &CompoundPoissonSpec::mult);

  m.def("ei_periodic", &ei_periodic, py::arg("map"), py::arg("zeta"), py::arg("p"));
  m.def(
      "obrien_estimate",
      [](const std::vector<double>& values, double u, int p) {
        return obrien_estimate(values, u, p);
      },
      py::arg("values"), py::arg("u"), py::arg("p"));
  m.def("multiplicity_cdf", &multiplicity_cdf, py::arg("dist"), py::arg("x"));
  m.def("kappa_of_x", &kappa_of_x, py::arg("dist"), py::arg("x"));
  m.def("aot_boundary", &aot_boundary, py::arg("dist"), py::arg("kappa"));
  m.def("sample_multiplicity", &sample_multiplicity, py::arg("dist"), py::arg("unif"));
  m.def(
      "sample_compound_poisson",
      [](const CompoundPoissonSpec& spec, double horizon, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        auto sample = sample_compound_poisson(spec, horizon, rng);
        return py::make_tuple(sample.times, sample.marks);
      },
      py::arg("spec"), py::arg("horizon"), py::arg("seed"));
  m.def("laplace_multiplicity", &laplace_multiplicity, py::arg("dist"), py::arg("y"));
  m.def(
      "laplace_process",
      [](const CompoundPoissonSpec& spec, const std::vector<std::pair<double, double>>& intervals,
         const std::vector<double>& ys) {
        return laplace_process(spec, to_intervals(intervals), ys);
      },
      py::arg("spec"), py::arg("intervals"), py::arg("ys"));
  m.def(
      "dprime_diagnostic",
      [](const std::vector<double>& values, double u, int p, std::size_t k_n) {
        if (k_n == 0) k_n = default_kn(values.size());
        return dprime_diagnostic(values, u, p, k_n);
      },
      py::arg("values"), py::arg("u"), py::arg("p"), py::arg("k_n") = 0);
  m.def("default_kn", &default_kn, py::arg("n"));
  m.def(
      "r_event_frequency",
      [](const ExceedanceSeries& ex, int p, MarkKind kind, double a_u,
         const std::vector<double>& xs) { return r_event_frequency(ex, p, kind, a_u, xs); },
      py::arg("exceedances"), py::arg("p"), py::arg("kind"), py::arg("a_u"), py::arg("xs"));

  py::class_<EmpiricalCDF>(m, "EmpiricalCDF")
      .def_readonly("sorted_samples", &EmpiricalCDF::sorted_samples)
      .def("__call__", &EmpiricalCDF::operator(), py::arg("x"));

  py::class_<KSResult>(m, "KSResult")
      .def_readonly("statistic", &KSResult::statistic)
      .def_readonly("n_effective", &KSResult::n_effective)
      .def("threshold_99", &KSResult::threshold_99);

  m.def(
      "empirical_cdf",
      [](const std::vector<double>& samples) { return empirical_cdf(samples); },
      py::arg("samples"));
  m.def(
      "ks_distance",
      [](const EmpiricalCDF& ecdf, const std::function<double(double)>& cdf) {
        return ks_distance(ecdf, cdf);
      },
      py::arg("ecdf"), py::arg("cdf"));
  m.def(
      "empirical_laplace",
      [](const std::vector<double>& samples, double y) { return empirical_laplace(samples, y); },
      py::arg("samples"), py::arg("y"));
  m.def("interarrival_exponential_check",
        py::overload_cast<const MarkedPointProcess&, double>(&interarrival_exponential_check),
        py::arg("process"), py::arg("theta"));
  m.def(
      "two_sample_ks",
      [](const std::vector<double>& a, const std::vector<double>& b) { return two_sample_ks(a, b); },
      py::arg("a"), py::arg("b"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static(
          "from_json", [](const std::string& text) { return config_from_json(Json::parse(text)); },
          py::arg("text"))
      .def_static("load", &load_config, py::arg("path"))
      .def("to_json", [](const ExperimentConfig& config) { return config_to_json(config).dump(); });

  py::class_<ReportRow>(m, "ReportRow")
      .def_readonly("n", &ReportRow::n)
      .def_readonly("u_n", &ReportRow::u_n)
      .def_readonly("a_n", &ReportRow::a_n)
      .def_readonly("v_n", &ReportRow::v_n)
      .def_readonly("theta_hat", &ReportRow::theta_hat)
      .def_readonly("cluster_count", &ReportRow::cluster_count)
      .def_readonly("mark_ks_vs_limit", &ReportRow::mark_ks_vs_limit)
      .def_readonly("interarrival_ks", &ReportRow::interarrival_ks)
      .def_readonly("dprime_value", &ReportRow::dprime_value)
      .def_readonly("evl_prob", &ReportRow::evl_prob)
      .def_readonly("transfer_ks", &ReportRow::transfer_ks);

  py::class_<ExperimentReport>(m, "ExperimentReport")
      .def_readonly("rows", &ExperimentReport::rows)
      .def("to_csv", &report_to_csv)
      .def("to_json", &report_to_json);

  py::class_<TransferRow>(m, "TransferRow")
      .def_readonly("n", &TransferRow::n)
      .def_readonly("u_n", &TransferRow::u_n)
      .def_readonly("v_n", &TransferRow::v_n)
      .def_readonly("v_n_induced", &TransferRow::v_n_induced)
      .def_readonly("mark_ks", &TransferRow::mark_ks)
      .def_readonly("count_ks", &TransferRow::count_ks);

  py::enum_<ReportFormat>(m, "ReportFormat")
      .value("CSV", ReportFormat::Csv)
      .value("JSON", ReportFormat::Json);

  m.def("run_convergence", &run_convergence, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("transfer_check", &transfer_check, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("emit_report", &emit_report, py::arg("report"), py::arg("format"), py::arg("path"));
}
