#include "yeefem/errors.hpp"
#include "yeefem/io.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <cmath>
#include <fstream>

namespace yeefem {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out)
    throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out)
    throw Error("failed writing " + path.string());
}

std::string one_line(std::string s)
{
  for (auto& c : s)
    if (c == '\n' || c == '\r')
      c = ' ';
  if (s.size() > 255)
    s.resize(255);
  return s;
}

void append_rate(fmt::memory_buffer& buf, double rate)
{
  if (std::isfinite(rate))
    fmt::format_to(std::back_inserter(buf), "{:.17g}", rate);
}

} // namespace

std::string format_vtk_snapshot(const HybridMesh& mesh, const DofMap& dofs, std::span<const double> coeffs,
                                const std::string& title)
{
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "# vtk DataFile Version 3.0\n{}\nASCII\nDATASET UNSTRUCTURED_GRID\n", one_line(title));
  fmt::format_to(out, "POINTS {} double\n", mesh.num_vertices());
  for (const auto& v : mesh.vertices())
    fmt::format_to(out, "{:.17g} {:.17g} 0\n", v.x, v.y);

  const int nt = mesh.num_triangles();
  const int nr = mesh.num_rectangles();
  fmt::format_to(out, "CELLS {} {}\n", nt + nr, 4 * nt + 5 * nr);
  for (const auto& t : mesh.triangles())
    fmt::format_to(out, "3 {} {} {}\n", t[0], t[1], t[2]);
  for (const auto& r : mesh.rectangles())
    fmt::format_to(out, "4 {} {} {} {}\n", r[0], r[1], r[2], r[3]);
  fmt::format_to(out, "CELL_TYPES {}\n", nt + nr);
  for (int i = 0; i < nt; ++i)
    fmt::format_to(out, "5\n");
  for (int i = 0; i < nr; ++i)
    fmt::format_to(out, "9\n");

  std::vector<Vec2> field(mesh.num_elements());
  std::vector<double> curl(mesh.num_elements());
  for (int el = 0; el < mesh.num_elements(); ++el)
  {
    const Vec2 c = mesh.element_centroid(el);
    field[el] = evaluate_field(mesh, dofs, coeffs, el, c);
    curl[el] = evaluate_curl(mesh, dofs, coeffs, el, c);
  }
  fmt::format_to(out, "CELL_DATA {}\n", mesh.num_elements());
  fmt::format_to(out, "SCALARS E1 double 1\nLOOKUP_TABLE default\n");
  for (const auto& v : field)
    fmt::format_to(out, "{:.17g}\n", v.x);
  fmt::format_to(out, "SCALARS E2 double 1\nLOOKUP_TABLE default\n");
  for (const auto& v : field)
    fmt::format_to(out, "{:.17g}\n", v.y);
  fmt::format_to(out, "SCALARS curlE double 1\nLOOKUP_TABLE default\n");
  for (double c : curl)
    fmt::format_to(out, "{:.17g}\n", c);
  return fmt::to_string(buf);
}

void write_vtk_snapshot(const HybridMesh& mesh, const DofMap& dofs, std::span<const double> coeffs,
                        const std::string& title, const std::filesystem::path& path)
{
  write_text(path, format_vtk_snapshot(mesh, dofs, coeffs, title));
}

std::string format_csv_report(const ConvergenceReport& report)
{
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "level,h,err_dtE,err_curl,rate_dtE,rate_curl\n");
  for (std::size_t i = 0; i < report.levels.size(); ++i)
  {
    const auto& l = report.levels[i];
    fmt::format_to(out, "{},{:.17g},{:.17g},{:.17g},", l.level, l.h, l.err_dtE, l.err_curl);
    if (i > 0)
      append_rate(buf, report.rate_dtE(i));
    fmt::format_to(out, ",");
    if (i > 0)
      append_rate(buf, report.rate_curl(i));
    fmt::format_to(out, "\n");
  }
  return fmt::to_string(buf);
}

void write_csv_report(const ConvergenceReport& report, const std::filesystem::path& path)
{
  write_text(path, format_csv_report(report));
}

RunOutcome execute_run(const RunConfig& config, std::ostream& log)
{
  RunOutcome outcome;
  const auto mesh = build_mesh(config.mesh);
  outcome.mesh_stats = validate_mesh(mesh);
  const auto& st = outcome.mesh_stats;
  const auto dofs = build_dof_map(mesh, essential_edges(mesh, config));
  fmt::print(log, "mesh: {} triangles, {} rectangles, {} edges, h_max {:.4g}, h_min {:.4g}\n", st.num_triangles,
             st.num_rectangles, st.num_edges, st.h_max, st.h_min);
  fmt::print(log, "dofs: {} ({} constrained)\n", dofs.num_dofs(), dofs.dirichlet_dofs().size());

  TimeConfig tc;
  tc.t_end = config.t_end;
  tc.dt = config.dt;
  tc.cfl_safety = config.cfl_safety;
  tc.output_interval = config.output_interval;
  tc.output_times = config.output_times;
  tc.source = expressions::source(config.source);
  tc.boundary = boundary_trace(config);
  tc.initial_field = expressions::initial_field(config.initial);

  std::filesystem::create_directories(config.output_dir);
  nlohmann::json snaps = nlohmann::json::array();
  const auto sink = [&](const Snapshot& snap) {
    const int k = static_cast<int>(outcome.snapshots.size());
    const auto path = config.output_dir / fmt::format("snapshot_{:03d}.vtk", k);
    const double t = snap.state.t();
    const auto title = fmt::format("yeefem E field t={:.10g} requested={:.10g} step={} dt={:.10g} h_max={:.6g}", t,
                                   snap.requested_time, snap.state.n, snap.state.dt, st.h_max);
    write_vtk_snapshot(mesh, dofs, snap.state.e_curr, title, path);
    outcome.snapshots.push_back(path);
    snaps.push_back({{"file", path.filename().string()},
                     {"t", t},
                     {"requested", snap.requested_time},
                     {"step", snap.state.n}});
    fmt::print(log, "snapshot {} at t = {:.6g} (requested {:.6g}) -> {}\n", k, t, snap.requested_time,
               path.string());
  };
  outcome.summary = run_simulation(mesh, dofs, tc, sink);
  const auto& s = outcome.summary;
  fmt::print(log, "steps: {}, dt {:.6g}, lambda_max {:.6g}{}\n", s.steps, s.dt, s.lambda_max,
             s.lambda_converged ? "" : " (power iteration not converged)");
  fmt::print(log, "energy: initial {:.6g}, final {:.6g}; max |coefficient| {:.6g}\n", s.initial_energy,
             s.final_energy, s.max_abs);

  nlohmann::json j;
  j["mesh"] = {{"generator", config.mesh.file.empty() ? config.mesh.generator : config.mesh.file.string()},
               {"h_target", config.mesh.h},
               {"triangles", st.num_triangles},
               {"rectangles", st.num_rectangles},
               {"edges", st.num_edges},
               {"h_max", st.h_max},
               {"h_min", st.h_min},
               {"dofs", dofs.num_dofs()}};
  j["time"] = {{"t_end", config.t_end},
               {"dt", s.dt},
               {"steps", s.steps},
               {"cfl_safety", config.cfl_safety},
               {"lambda_max", s.lambda_max},
               {"lambda_converged", s.lambda_converged}};
  j["energy"] = {{"initial", s.initial_energy}, {"final", s.final_energy}};
  j["max_abs"] = s.max_abs;
  j["snapshots"] = snaps;
  outcome.summary_file = config.output_dir / "summary.json";
  write_text(outcome.summary_file, j.dump(2) + "\n");
  return outcome;
}

} // namespace yeefem
