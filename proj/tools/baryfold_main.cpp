// Command-line front end: configures a model, dispatches one verification
// command, prints the JSON summary, and writes machine-readable reports.
//
// Exit codes: 0 all checks passed, 1 check failures, 2 usage/config errors.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "baryfold/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"baryfold: barycentric straightening verification suite"};
  app.require_subcommand(0, 1);

  std::string config_path, model_json, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int samples = -1, resolution = -1, k = -1, s_count = -1;
  double tol = -1.0, horizon = -1.0, s_param = -1.0, s_min = -1.0, s_max = -1.0;
  std::vector<double> window;

  app.add_option("--config", config_path, "JSON config file; flags override it");
  app.add_option("--model", model_json, "model descriptor JSON");
  app.add_option("--seed", seed, "64-bit seed for all randomized sweeps")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--samples", samples, "sample/trial count");
  app.add_option("--resolution", resolution, "boundary quadrature resolution");
  app.add_option("--tol", tol, "check tolerance");
  app.add_option("--out", out_dir, "output directory for report.json and CSVs");
  app.add_option("--k", k, "trace index for curvature conditions");
  app.add_option("--T", horizon, "Jacobi integration horizon");
  app.add_option("--s", s_param, "natural-map parameter s");
  app.add_option("--s-min", s_min, "natural-map sweep start");
  app.add_option("--s-max", s_max, "natural-map sweep end");
  app.add_option("--s-count", s_count, "natural-map sweep length");
  app.add_option("--window", window, "entropy fit window r0 r1")->expected(2);

  std::vector<CLI::App*> subs;
  for (const auto& name : baryfold::known_commands()) {
    CLI::App* sub = app.add_subcommand(name, "");
    sub->fallthrough();
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    nlohmann::json cfg_json;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot open config file " + config_path);
      in >> cfg_json;
    }
    baryfold::RunConfig cfg = baryfold::RunConfig::from_json(cfg_json);

    for (CLI::App* sub : subs)
      if (sub->parsed()) cfg.command = sub->get_name();
    if (!model_json.empty()) cfg.model = nlohmann::json::parse(model_json);
    if (seed_set) cfg.seed = seed;
    if (samples >= 0) cfg.samples = samples;
    if (resolution >= 0) cfg.resolution = resolution;
    if (tol >= 0.0) cfg.tol = tol;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (k >= 0) cfg.k = k;
    if (horizon >= 0.0) cfg.horizon = horizon;
    if (s_param >= 0.0) cfg.s = s_param;
    if (s_min >= 0.0) cfg.s_min = s_min;
    if (s_max >= 0.0) cfg.s_max = s_max;
    if (s_count >= 0) cfg.s_count = s_count;
    if (window.size() == 2) {
      cfg.window_r0 = window[0];
      cfg.window_r1 = window[1];
    }
    if (cfg.command.empty())
      throw std::invalid_argument("no command given (try --help)");

    const baryfold::Report rep = baryfold::run(cfg);
    std::cout << rep.to_json().dump(2) << "\n";
    std::cerr << "wall: " << rep.wall_seconds << " s\n";
    return rep.exit_code();
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
