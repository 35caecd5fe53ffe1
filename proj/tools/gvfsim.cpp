// gvfsim: run guidance scenarios, export field grids, and validate configs.
//
// Exit codes: 0 success, 1 configuration/validation error, 2 runtime
// guidance failure (singular field, stall, degenerate field, ...).
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gvf/errors.hpp"
#include "gvf/path_library.hpp"
#include "gvf/runner.hpp"
#include "gvf/scenario.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::string base_dir_of(const std::string& filename) {
  const std::size_t slash = filename.find_last_of('/');
  return slash == std::string::npos ? "." : filename.substr(0, slash);
}

void write_file(const std::string& filename, const std::string& content) {
  std::ofstream out(filename, std::ios::binary);
  if (!out) throw gvf::ValidationError("cannot write '" + filename + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

int run_command(const std::string& scenario_file, const std::string& out_file,
                const std::string& metrics_file, std::optional<std::uint64_t> seed) {
  const gvf::ScenarioConfig cfg = gvf::load_scenario(scenario_file, seed);
  const gvf::RunResult result = gvf::run_scenario(cfg, base_dir_of(scenario_file));
  write_file(out_file, gvf::telemetry_csv(result.records));
  if (!metrics_file.empty())
    write_file(metrics_file, gvf::metrics_to_json(result.metrics).dump(2) + "\n");
  const auto& m = result.metrics;
  std::printf("%s: %zu vehicles, %zu telemetry rows, %.9g s simulated\n",
              cfg.name.empty() ? "scenario" : cfg.name.c_str(), cfg.vehicles.size(),
              result.records.size(), m.duration);
  for (const auto& v : m.vehicles) {
    std::printf("  vehicle %d: steady mean %.3f m, steady max %.3f m (%s)", v.vehicle,
                v.steady_mean, v.steady_max, v.distance_metric.c_str());
    if (v.convergence_time)
      std::printf(", converged at %.2f s\n", *v.convergence_time);
    else
      std::printf(", did not converge\n");
  }
  if (m.final_consensus_error)
    std::printf("  consensus: final error %.6g, %llu messages delivered, %llu dropped\n",
                *m.final_consensus_error,
                static_cast<unsigned long long>(m.messages_delivered),
                static_cast<unsigned long long>(m.messages_dropped));
  return 0;
}

int field_command(const std::string& scenario_file, const std::string& grid,
                  const std::string& out_file, double w, std::optional<double> z,
                  const std::vector<double>& bbox) {
  gvf::FieldGridRequest req;
  if (std::sscanf(grid.c_str(), "%dx%d", &req.nx, &req.ny) != 2)
    throw gvf::ValidationError("--grid must look like 40x40, got '" + grid + "'");
  req.w = w;
  req.z = z;
  if (!bbox.empty()) {
    if (bbox.size() != 4)
      throw gvf::ValidationError("--bbox needs 4 numbers: xmin ymin xmax ymax");
    req.bbox = {bbox[0], bbox[1], bbox[2], bbox[3]};
  }
  const gvf::ScenarioConfig cfg = gvf::load_scenario(scenario_file);
  write_file(out_file, gvf::field_grid_csv(cfg, req, base_dir_of(scenario_file)));
  std::printf("wrote %dx%d field grid to %s\n", req.nx, req.ny, out_file.c_str());
  return 0;
}

int validate_command(const std::string& scenario_file) {
  const gvf::ScenarioConfig cfg = gvf::load_scenario(scenario_file);
  std::printf("ok: %s, mode %s, %zu vehicle(s), duration %.9g s, dt %.9g s%s\n",
              cfg.name.empty() ? scenario_file.c_str() : cfg.name.c_str(),
              gvf::to_string(cfg.mode), cfg.vehicles.size(), cfg.duration, cfg.dt,
              cfg.coordination ? ", coordinated" : "");
  return 0;
}

int list_command() {
  std::printf("builtin trajectories (positional params):\n");
  std::printf("  circle         cx cy r                      implicit\n");
  std::printf("  ellipse        cx cy a b rotation[rad]      implicit\n");
  std::printf("  ellipse3d      xo yo r zl zh alpha[deg]     parametric 3D\n");
  std::printf("  lissajous3d    cx cy cz Ax Ay Az fx fy fz px py pz   parametric 3D\n");
  std::printf("  circle2d_param cx cy r                      parametric 2D\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"guiding-vector-field guidance simulator"};
  app.require_subcommand(1);

  std::string scenario_file, out_file, metrics_file, grid = "40x40";
  std::optional<std::uint64_t> seed;
  double w_slice = 0.0;
  std::optional<double> z_slice;
  std::vector<double> bbox;

  CLI::App* run = app.add_subcommand("run", "simulate a scenario and write telemetry");
  run->add_option("scenario", scenario_file, "scenario JSON file")->required();
  run->add_option("--out", out_file, "telemetry CSV output path")->required();
  run->add_option("--metrics", metrics_file, "metrics JSON output path");
  run->add_option("--seed", seed, "override the scenario seed");

  CLI::App* field = app.add_subcommand("field", "sample the guidance field on a grid");
  field->add_option("scenario", scenario_file, "scenario JSON file")->required();
  field->add_option("--grid", grid, "grid size AxB (default 40x40)");
  field->add_option("--out", out_file, "field CSV output path")->required();
  field->add_option("--w", w_slice, "virtual coordinate of the slice (pgvf)");
  field->add_option("--z", z_slice, "altitude of the slice (pgvf, 3D)");
  field->add_option("--bbox", bbox, "xmin ymin xmax ymax")->expected(4);

  CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", scenario_file, "scenario JSON file")->required();

  app.add_subcommand("list-trajectories", "list builtin trajectory names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(scenario_file, out_file, metrics_file, seed);
    if (field->parsed()) return field_command(scenario_file, grid, out_file, w_slice, z_slice, bbox);
    if (validate->parsed()) return validate_command(scenario_file);
    return list_command();
  } catch (const gvf::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const gvf::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return kExitRuntime;
  }
}
