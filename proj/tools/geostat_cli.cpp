#include <exception>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "geostat/errors.hpp"

namespace {

// Exit codes: 0 success, 2 configuration, 3 data, 4 numerical failure.
int exit_code(geostat::ErrorKind kind) {
  switch (kind) {
    case geostat::ErrorKind::Config: return 2;
    case geostat::ErrorKind::Data: return 3;
    case geostat::ErrorKind::Numerical: return 4;
  }
  return 4;
}

void add_run_options(CLI::App& cmd, geostat::cli::RunOptions& o, bool needs_task) {
  auto* task = cmd.add_option("--task", o.task, "kriging or geocp");
  if (needs_task) task->required();
  cmd.add_option("--preset", o.preset, "original, openevolve, openevolve_geoknow or geoevolve");
  cmd.add_option("--config", o.config, "JSON overrides or a sidecar from an earlier run");
  cmd.add_option("--input", o.input, "input CSV")->required();
  cmd.add_option("--x-col", o.x_col, "x coordinate column")->capture_default_str();
  cmd.add_option("--y-col", o.y_col, "y coordinate column")->capture_default_str();
  cmd.add_option("--value-col", o.value_col, "target column")->capture_default_str();
  cmd.add_option("--feature-cols", o.feature_cols, "feature columns for the k-NN base predictor")
      ->delimiter(',');
  cmd.add_option("--prediction-col", o.prediction_col, "column of external base predictions");
  cmd.add_option("--alpha", o.alpha, "miscoverage level (default 0.1)");
  cmd.add_option("--seed", o.seed, "split and search seed (default 42)");
  cmd.add_option("--knn-k", o.knn_k, "neighbours for the k-NN base predictor")->capture_default_str();
  cmd.add_option("--out", o.out, "output CSV; metadata goes to the .json sidecar")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geostatistical kriging and geographically weighted conformal prediction"};
  app.require_subcommand(1);

  geostat::cli::RunOptions krige_opts, geocp_opts, compare_opts;
  geostat::cli::SynthOptions synth_opts;

  auto* krige = app.add_subcommand("krige", "fit a variogram and krige the test split");
  add_run_options(*krige, krige_opts, false);
  auto* geocp = app.add_subcommand("geocp", "conformal intervals on the test split");
  add_run_options(*geocp, geocp_opts, false);
  auto* compare = app.add_subcommand("compare", "run every preset on one split");
  add_run_options(*compare, compare_opts, true);

  auto* synth = app.add_subcommand("synth", "simulate a Gaussian random field");
  synth->add_option("--n", synth_opts.n, "number of points (at most 2000)")->capture_default_str();
  synth->add_option("--kind", synth_opts.kind, "variogram kind")->capture_default_str();
  synth->add_option("--nugget", synth_opts.nugget)->capture_default_str();
  synth->add_option("--sill", synth_opts.sill, "partial sill")->capture_default_str();
  synth->add_option("--range", synth_opts.range)->capture_default_str();
  synth->add_option("--exponent", synth_opts.exponent, "powered_exponential only")
      ->capture_default_str();
  synth->add_option("--xmin", synth_opts.xmin)->capture_default_str();
  synth->add_option("--xmax", synth_opts.xmax)->capture_default_str();
  synth->add_option("--ymin", synth_opts.ymin)->capture_default_str();
  synth->add_option("--ymax", synth_opts.ymax)->capture_default_str();
  synth->add_option("--seed", synth_opts.seed)->capture_default_str();
  synth->add_option("--out", synth_opts.out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "geostat: " << e.what() << '\n';
    return 2;
  }

  try {
    if (krige->parsed()) {
      if (!krige_opts.task.empty() && krige_opts.task != "kriging")
        throw geostat::InvalidArgument("krige runs --task kriging only");
      geostat::cli::cmd_krige(krige_opts);
    }
    if (geocp->parsed()) {
      if (!geocp_opts.task.empty() && geocp_opts.task != "geocp")
        throw geostat::InvalidArgument("geocp runs --task geocp only");
      geostat::cli::cmd_geocp(geocp_opts);
    }
    if (compare->parsed()) geostat::cli::cmd_compare(compare_opts);
    if (synth->parsed()) geostat::cli::cmd_synth(synth_opts);
  } catch (const geostat::Error& e) {
    std::cerr << "geostat: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "geostat: config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "geostat: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
