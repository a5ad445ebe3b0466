#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "geostat/config.hpp"
#include "geostat/data_io.hpp"
#include "geostat/errors.hpp"
#include "geostat/geocp.hpp"
#include "geostat/metrics.hpp"
#include "geostat/pipeline.hpp"
#include "geostat/presets.hpp"
#include "geostat/variogram.hpp"

namespace py = pybind11;
using namespace geostat;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a, const char* name) {
  if (a.ndim() != 1) throw InvalidArgument(std::string(name) + " must be one-dimensional");
  return {a.data(), a.data() + a.size()};
}

std::vector<Point2> to_points(const Array& x, const Array& y) {
  const auto xs = to_vector(x, "x"), ys = to_vector(y, "y");
  if (xs.size() != ys.size()) throw LengthMismatch("x and y differ in length");
  std::vector<Point2> pts(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) pts[i] = {xs[i], ys[i]};
  return pts;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict spec_dict(const VariogramSpec& s) {
  py::dict d;
  d["kind"] = std::string(to_string(s.kind()));
  d["nugget"] = s.nugget();
  d["partial_sill"] = s.partial_sill();
  d["range"] = s.range();
  d["exponent"] = s.exponent();
  return d;
}

nlohmann::json parse_overrides(const std::string& text) {
  if (text.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
}

py::dict krige(const Array& x, const Array& y, const Array& values, const Array& target_x,
               const Array& target_y, const std::string& preset_name, std::uint64_t seed,
               const std::string& overrides) {
  auto preset = kriging_preset(preset_name);
  apply_overrides(preset, parse_overrides(overrides));
  const PointSet train(to_points(x, y), to_vector(values, "values"));
  const auto targets = to_points(target_x, target_y);

  std::vector<KrigingPrediction> preds;
  KrigingFit fit = [&] {
    py::gil_scoped_release release;
    auto f = fit_kriging(preset, train, seed);
    preds = make_kriging_model(preset, train, f).predict(targets);
    return f;
  }();

  std::vector<double> value, variance;
  std::vector<bool> fallback;
  for (const auto& p : preds) {
    value.push_back(p.value);
    variance.push_back(p.variance);
    fallback.push_back(p.used_fallback);
  }
  py::dict out;
  out["prediction"] = to_array(value);
  out["variance"] = to_array(variance);
  out["used_fallback"] = fallback;
  out["variogram"] = spec_dict(fit.report.spec);
  out["aic"] = fit.report.aic;
  out["log_transform"] = fit.transform.enabled;
  out["log_offset"] = fit.transform.delta;
  return out;
}

py::dict geocp(const Array& calib_pred, const Array& calib_obs, const Array& calib_x,
               const Array& calib_y, const Array& test_pred, const Array& test_x,
               const Array& test_y, const std::string& preset_name, double alpha,
               std::uint64_t seed, const std::string& overrides) {
  auto preset = geocp_preset(preset_name);
  apply_overrides(preset, parse_overrides(overrides));
  const auto config = make_geocp_config(preset, alpha, seed);
  const auto cp = to_vector(calib_pred, "calib_pred"), co = to_vector(calib_obs, "calib_obs");
  const auto tp = to_vector(test_pred, "test_pred");
  const auto cc = to_points(calib_x, calib_y), tc = to_points(test_x, test_y);

  GeoCPResult res;
  {
    py::gil_scoped_release release;
    res = run_geocp(cp, co, cc, tp, tc, config);
  }
  std::vector<double> lower, upper, threshold;
  for (const auto& iv : res.intervals) {
    lower.push_back(iv.lower);
    upper.push_back(iv.upper);
    threshold.push_back(iv.threshold);
  }
  py::dict out;
  out["lower"] = to_array(lower);
  out["upper"] = to_array(upper);
  out["threshold"] = to_array(threshold);
  out["sigma"] = res.sigma ? py::cast(*res.sigma) : py::none();
  out["degenerate_weights"] = res.degenerate_weights;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kriging and geographically weighted conformal prediction";

  // Held for the life of the interpreter.
  static py::handle base = py::exception<Error>(m, "GeostatError", PyExc_ValueError).release();
  static py::handle config_error = py::exception<Error>(m, "ConfigError", base).release();
  static py::handle data_error = py::exception<Error>(m, "DataError", base).release();
  static py::handle numerical_error = py::exception<Error>(m, "NumericalError", base).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::Config: py::set_error(config_error, e.what()); break;
        case ErrorKind::Data: py::set_error(data_error, e.what()); break;
        case ErrorKind::Numerical: py::set_error(numerical_error, e.what()); break;
      }
    }
  });

  m.def("preset_names", [] {
    return std::vector<std::string>(kPresetNames.begin(), kPresetNames.end());
  });
  m.def(
      "preset_config",
      [](const std::string& task, const std::string& name) {
        const auto preset = resolve_preset(parse_task(task), name);
        return std::visit([](const auto& p) { return to_json(p).dump(); }, preset);
      },
      py::arg("task"), py::arg("name"), "Preset configuration as a JSON string.");

  m.def(
      "variogram",
      [](const std::string& kind, double nugget, double partial_sill, double range,
         double exponent, const Array& h) {
        const VariogramSpec spec(parse_variogram_kind(kind), nugget, partial_sill, range, exponent);
        auto lags = to_vector(h, "h");
        for (auto& v : lags) v = spec(v);
        return to_array(lags);
      },
      py::arg("kind"), py::arg("nugget"), py::arg("partial_sill"), py::arg("range"),
      py::arg("exponent") = 1.0, py::arg("h"));

  m.def(
      "synth_gaussian_field",
      [](std::size_t n, const std::string& kind, double nugget, double partial_sill, double range,
         double exponent, std::uint64_t seed, std::vector<double> domain) {
        if (domain.size() != 4) throw InvalidArgument("domain must be (xmin, xmax, ymin, ymax)");
        const VariogramSpec spec(parse_variogram_kind(kind), nugget, partial_sill, range, exponent);
        const auto ds = synth_gaussian_field(n, spec, {domain[0], domain[1], domain[2], domain[3]}, seed);
        std::vector<double> x, y;
        for (const auto& p : ds.coords) {
          x.push_back(p.x);
          y.push_back(p.y);
        }
        py::dict out;
        out["x"] = to_array(x);
        out["y"] = to_array(y);
        out["value"] = to_array(ds.target);
        return out;
      },
      py::arg("n"), py::arg("kind") = "exponential", py::arg("nugget") = 0.1,
      py::arg("partial_sill") = 1.0, py::arg("range") = 0.2, py::arg("exponent") = 1.0,
      py::arg("seed") = 0, py::arg("domain") = std::vector<double>{0.0, 1.0, 0.0, 1.0});

  m.def("krige", &krige, py::arg("x"), py::arg("y"), py::arg("values"), py::arg("target_x"),
        py::arg("target_y"), py::arg("preset") = "geoevolve", py::arg("seed") = 42,
        py::arg("config") = "",
        "Fit a variogram on the observations and krige at the targets.");

  m.def("geocp", &geocp, py::arg("calib_pred"), py::arg("calib_obs"), py::arg("calib_x"),
        py::arg("calib_y"), py::arg("test_pred"), py::arg("test_x"), py::arg("test_y"),
        py::arg("preset") = "geoevolve", py::arg("alpha") = 0.1, py::arg("seed") = 42,
        py::arg("config") = "", "Geographically weighted conformal intervals.");

  m.def(
      "weighted_quantile",
      [](const Array& scores, const Array& weights, double q, const std::string& method) {
        return weighted_quantile(parse_quantile_method(method), to_vector(scores, "scores"),
                                 to_vector(weights, "weights"), q);
      },
      py::arg("scores"), py::arg("weights"), py::arg("q"), py::arg("method") = "stepwise");

  m.def("interval_score", py::vectorize([](double lower, double upper, double y, double alpha) {
          return interval_score(lower, upper, y, alpha);
        }),
        py::arg("lower"), py::arg("upper"), py::arg("y"), py::arg("alpha"));

  m.def(
      "regression_metrics",
      [](const Array& pred, const Array& obs) {
        const auto r = regression_metrics(to_vector(pred, "pred"), to_vector(obs, "obs"));
        py::dict d;
        d["rmse"] = r.rmse;
        d["mae"] = r.mae;
        d["r2"] = r.r2;
        return d;
      },
      py::arg("pred"), py::arg("obs"));

  m.def(
      "interval_metrics",
      [](const Array& lower, const Array& upper, const Array& obs, double alpha) {
        const auto lo = to_vector(lower, "lower"), hi = to_vector(upper, "upper");
        if (lo.size() != hi.size()) throw LengthMismatch("lower and upper differ in length");
        std::vector<PredictionInterval> iv(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i)
          iv[i] = {lo[i], hi[i], 0.5 * (hi[i] - lo[i]), 0.5 * (hi[i] + lo[i])};
        const auto r = interval_metrics(iv, to_vector(obs, "obs"), alpha);
        py::dict d;
        d["mean_interval_score"] = r.mean_interval_score;
        d["mean_interval_size"] = r.mean_interval_size;
        d["empirical_coverage"] = r.empirical_coverage;
        d["coverage_deviation"] = r.coverage_deviation;
        return d;
      },
      py::arg("lower"), py::arg("upper"), py::arg("obs"), py::arg("alpha"));
}
