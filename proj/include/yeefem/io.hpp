#pragma once

#include "yeefem/assembly.hpp"
#include "yeefem/timestepping.hpp"
#include "yeefem/verification.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace yeefem {

/// Built-in expressions usable from configuration files.
namespace expressions {

/// Boundary traces E.t: zero, demo_left_pulse (sin(10 t) exp(-10 y^2)).
TraceFunction trace(const std::string& name);
/// Fields at t = 0 for initial data: zero, standing_mode.
SpaceField initial_field(const std::string& name);
/// Source terms: zero, standing_mode (both f = 0); empty result means no source.
SpaceTimeField source(const std::string& name);

const std::vector<std::string>& trace_names();
const std::vector<std::string>& field_names();

} // namespace expressions

struct MeshSource
{
  /// rect, tri, hybrid, scattering (empty when reading from a file)
  std::string generator;
  std::filesystem::path file;
  int nx = 8;
  int ny = 8;
  BoundingBox box{{0, 0}, {1, 1}};
  int nx_rect = 4;
  SplitDirection split = SplitDirection::Diagonal;
  double h = 0.05;
  int n_circle = 32;
};

struct BoundaryAssignment
{
  EdgeTag tag;
  bool essential = false;
  std::string expression = "zero";
};

struct StudyConfig
{
  std::vector<MeshFamily> families{MeshFamily::Rect, MeshFamily::Tri, MeshFamily::Hybrid};
  ConvergenceOptions options;
};

struct RunConfig
{
  MeshSource mesh;
  /// One entry per boundary tag (left, ball, other); unlisted tags are natural.
  std::vector<BoundaryAssignment> bc;
  std::string initial = "zero";
  std::string source = "zero";
  double t_end = 1.0;
  std::optional<double> dt;
  double cfl_safety = 0.9;
  std::filesystem::path output_dir = "output";
  double output_interval = 0.0;
  std::vector<double> output_times;
  StudyConfig study;
};

/// `key = value` text with [mesh] [bc] [time] [output] [study] sections and
/// `#` comments. Unknown sections or keys, malformed values and unknown
/// boundary tags raise ParseError with the line number; a missing or doubled
/// mesh source raises ConfigError. With require_mesh = false (study-only
/// files) a missing mesh source is accepted.
RunConfig parse_config(const std::string& text, bool require_mesh = true);
RunConfig read_config(const std::filesystem::path& path, bool require_mesh = true);

/// Named presets; "scattering" is the pulse-on-the-left scattering setup.
RunConfig preset(const std::string& name);

HybridMesh build_mesh(const MeshSource& source);

/// Edges whose boundary tag is assigned an essential condition.
std::vector<int> essential_edges(const HybridMesh& mesh, const RunConfig& config);
/// Combined trace callback dispatching on the edge tag.
TraceFunction boundary_trace(const RunConfig& config);

/// Legacy ASCII VTK unstructured grid: triangles (type 5), quads (type 9),
/// cell data E1, E2, curlE at the element centroids. `title` goes into the
/// header line.
void write_vtk_snapshot(const HybridMesh& mesh, const DofMap& dofs, std::span<const double> coeffs,
                        const std::string& title, const std::filesystem::path& path);
std::string format_vtk_snapshot(const HybridMesh& mesh, const DofMap& dofs, std::span<const double> coeffs,
                                const std::string& title);

/// level,h,err_dtE,err_curl,rate_dtE,rate_curl with blank rates on the first row.
void write_csv_report(const ConvergenceReport& report, const std::filesystem::path& path);
std::string format_csv_report(const ConvergenceReport& report);

struct RunOutcome
{
  RunSummary summary;
  MeshStatistics mesh_stats;
  std::vector<std::filesystem::path> snapshots;
  std::filesystem::path summary_file;
};

/// Builds the mesh, runs the simulation, writes snapshot_<k>.vtk files and a
/// summary.json into config.output_dir.
RunOutcome execute_run(const RunConfig& config, std::ostream& log);

} // namespace yeefem
