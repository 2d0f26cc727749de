// Command-line front end: run, convergence, verify, demo.

#include "yeefem/checks.hpp"
#include "yeefem/errors.hpp"
#include "yeefem/io.hpp"
#include "yeefem/verification.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <iostream>

using namespace yeefem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

class Timer
{
public:
  double seconds() const
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool report(const std::string& name, bool ok, const std::string& detail, double seconds)
{
  fmt::print("{} {:<14} {} [{:.2f} s]\n", ok ? "PASS" : "FAIL", name, detail, seconds);
  return ok;
}

int run_verify()
{
  bool ok = true;
  {
    Timer t;
    const auto demo = build_scattering_demo_mesh(0.05, 32);
    const auto d = mass_diagonality(1000, 1, &demo);
    ok &= report("diagonality", d.passed(),
                 fmt::format("{} triangles, {} rectangles, {} demo elements: max off-diagonal/diagonal {:.2e}, "
                             "min diagonal ratio {:.3g}",
                             d.triangles, d.rectangles, d.mesh_elements, d.worst_off_diagonal, d.min_diagonal),
                 t.seconds());
  }
  {
    Timer t;
    const auto e = quadrature_exactness();
    ok &= report("exactness", e.passed(),
                 fmt::format("triangle degree<=2 error {:.2e}, rectangle degree<=1 error {:.2e}, y^2 error {:.15g}",
                             e.triangle_error, e.rectangle_error, e.rectangle_y2_error),
                 t.seconds());
  }
  {
    Timer t;
    const auto y = yee_equivalence_check(8, 8, 1.0 / 8.0);
    ok &= report("yee", !y.vacuous && y.max_deviation <= 1e-12,
                 fmt::format("8x8 grid, {} vectors, {} interior dofs: max relative deviation {:.2e}", y.samples,
                             y.interior_dofs, y.max_deviation),
                 t.seconds());
  }
  {
    Timer t;
    const auto mesh = family_mesh(MeshFamily::Hybrid, 16);
    const auto e = energy_drift(mesh, 5000, 0.9);
    const auto g = instability_growth(mesh, 5000, 1.2);
    ok &= report("energy", e.relative_drift <= 1e-10 && g.growth > 1e3,
                 fmt::format("{} steps at safety 0.9: drift {:.2e}; safety 1.2: growth {:.3g} after {} steps",
                             e.steps, e.relative_drift, g.growth, g.steps),
                 t.seconds());
  }
  return ok ? exit_ok : exit_failed;
}

int run_convergence(const std::vector<std::string>& families, const ConvergenceOptions& options,
                    const std::string& csv_dir)
{
  const auto exact = standing_mode_solution();
  for (const auto& name : families)
  {
    const auto family = parse_mesh_family(name);
    const auto rep = convergence_study(exact, family, options);
    fmt::print("{} family, solution {}\n", name, rep.solution);
    fmt::print("{:>5} {:>10} {:>12} {:>12} {:>8} {:>8} {:>7}\n", "level", "h", "err_dtE", "err_curl",
               "r_dtE", "r_curl", "steps");
    for (std::size_t i = 0; i < rep.levels.size(); ++i)
    {
      const auto& l = rep.levels[i];
      const auto rate = [&](double r) { return i ? fmt::format("{:.3f}", r) : std::string("-"); };
      fmt::print("{:>5} {:>10.4g} {:>12.4e} {:>12.4e} {:>8} {:>8} {:>7}\n", l.level, l.h, l.err_dtE, l.err_curl,
                 rate(i ? rep.rate_dtE(i) : 0.0), rate(i ? rep.rate_curl(i) : 0.0), l.steps);
    }
    if (rep.non_monotone)
      fmt::print("warning: errors are not monotone in h\n");
    if (!csv_dir.empty())
    {
      const auto path = std::filesystem::path(csv_dir) / fmt::format("convergence_{}.csv", name);
      write_csv_report(rep, path);
      fmt::print("wrote {}\n", path.string());
    }
  }
  return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Mass-lumped edge element solver for the 2D curl-curl wave equation on hybrid meshes"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a configuration file or preset");
  std::string config_path, preset_name, run_output;
  run->add_option("config", config_path, "Configuration file");
  run->add_option("--preset", preset_name, "Named preset (scattering)");
  run->add_option("--output-dir", run_output, "Override the output directory");

  auto* conv = app.add_subcommand("convergence", "Standing-mode convergence study");
  std::vector<std::string> families{"rect", "tri", "hybrid"};
  ConvergenceOptions options;
  std::string csv_dir, study_config;
  conv->add_option("--family", families, "Mesh families (rect, tri, hybrid)")
      ->check(CLI::IsMember({"rect", "tri", "hybrid"}));
  conv->add_option("--levels", options.levels, "Number of refinement levels")->check(CLI::Range(2, 10));
  conv->add_option("--base-cells", options.base_cells, "Cells per side on the coarsest level")
      ->check(CLI::PositiveNumber);
  conv->add_option("--t-end", options.t_end, "Final time")->check(CLI::PositiveNumber);
  conv->add_option("--cfl-safety", options.cfl_safety, "Fraction of the stability limit")
      ->check(CLI::Range(1e-6, 1.0));
  conv->add_option("--csv-dir", csv_dir, "Write one CSV file per family into this directory");
  conv->add_option("--config", study_config, "Take the [study] section from a configuration file");

  app.add_subcommand("verify", "Diagonality, exactness, staggered-grid equivalence and energy checks");

  auto* demo = app.add_subcommand("demo", "Scattering demo: pulse from the left onto a hybrid mesh with a hole");
  double demo_t_end = 5.0, demo_h = 0.05;
  std::string demo_output = "demo_output";
  demo->add_option("--t-end", demo_t_end, "Final time")->check(CLI::PositiveNumber);
  demo->add_option("--mesh-size", demo_h, "Target mesh size h")->check(CLI::Range(0.005, 0.5));
  demo->add_option("--output-dir", demo_output, "Output directory");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp& e)
  {
    return app.exit(e);
  }
  catch (const CLI::CallForAllHelp& e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError& e)
  {
    app.exit(e);
    std::cerr << app.help();
    return exit_usage;
  }

  try
  {
    if (*run)
    {
      if (config_path.empty() == preset_name.empty())
      {
        std::cerr << "run: give either a configuration file or --preset\n" << run->help();
        return exit_usage;
      }
      auto cfg = preset_name.empty() ? read_config(config_path) : preset(preset_name);
      if (!run_output.empty())
        cfg.output_dir = run_output;
      const auto outcome = execute_run(cfg, std::cout);
      fmt::print("summary: {}\n", outcome.summary_file.string());
      return exit_ok;
    }
    if (*conv)
    {
      if (!study_config.empty())
      {
        const auto cfg = read_config(study_config, false);
        options = cfg.study.options;
        families.clear();
        for (auto f : cfg.study.families)
          families.push_back(to_string(f));
      }
      return run_convergence(families, options, csv_dir);
    }
    if (app.got_subcommand("verify"))
      return run_verify();
    if (*demo)
    {
      auto cfg = preset("scattering");
      cfg.t_end = demo_t_end;
      cfg.mesh.h = demo_h;
      cfg.output_dir = demo_output;
      std::erase_if(cfg.output_times, [&](double t) { return t > demo_t_end; });
      if (cfg.output_times.empty() || cfg.output_times.back() != demo_t_end)
        cfg.output_times.push_back(demo_t_end);
      const auto outcome = execute_run(cfg, std::cout);
      fmt::print("summary: {}\n", outcome.summary_file.string());
      return exit_ok;
    }
  }
  catch (const ParseError& e)
  {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_usage;
  }
  catch (const ConfigError& e)
  {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_usage;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_failed;
  }
  return exit_usage;
}
