#include "yeefem/errors.hpp"
#include "yeefem/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace yeefem {

namespace expressions {

const std::vector<std::string>& trace_names()
{
  static const std::vector<std::string> names{"zero", "demo_left_pulse"};
  return names;
}

const std::vector<std::string>& field_names()
{
  static const std::vector<std::string> names{"zero", "standing_mode"};
  return names;
}

TraceFunction trace(const std::string& name)
{
  if (name == "zero")
    return [](const Vec2&, EdgeTag, double) { return 0.0; };
  if (name == "demo_left_pulse")
    return [](const Vec2& p, EdgeTag, double t) { return std::sin(10.0 * t) * std::exp(-10.0 * p.y * p.y); };
  throw ConfigError("unknown boundary expression '" + name + "'");
}

SpaceField initial_field(const std::string& name)
{
  if (name == "zero")
    return {};
  if (name == "standing_mode")
  {
    const auto s = standing_mode_solution();
    return [e = s.e](const Vec2& p) { return e(p, 0.0); };
  }
  throw ConfigError("unknown field expression '" + name + "'");
}

SpaceTimeField source(const std::string& name)
{
  if (name == "zero" || name == "standing_mode")
    return {};
  throw ConfigError("unknown source expression '" + name + "'");
}

} // namespace expressions

namespace {

std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string join(const std::vector<std::string>& items)
{
  std::string out;
  for (const auto& s : items)
    out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep))
    if (auto t = trim(item); !t.empty())
      out.push_back(t);
  return out;
}

double to_double(const std::string& v, std::size_t line)
{
  double x{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(x))
    throw ParseError("cannot parse '" + v + "' as a number", line);
  return x;
}

int to_int(const std::string& v, std::size_t line)
{
  int x{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ParseError("cannot parse '" + v + "' as an integer", line);
  return x;
}

void require_name(const std::string& value, const std::vector<std::string>& known, const std::string& what,
                  std::size_t line)
{
  if (std::find(known.begin(), known.end(), value) == known.end())
    throw ParseError("unknown " + what + " '" + value + "' (known: " + join(known) + ")", line);
}

SplitDirection parse_split(const std::string& v, std::size_t line)
{
  if (v == "diagonal")
    return SplitDirection::Diagonal;
  if (v == "anti_diagonal")
    return SplitDirection::AntiDiagonal;
  if (v == "alternating")
    return SplitDirection::Alternating;
  throw ParseError("unknown split '" + v + "' (known: diagonal, anti_diagonal, alternating)", line);
}

const std::vector<std::string> generators{"rect", "tri", "hybrid", "scattering"};
const std::vector<std::string> boundary_tags{"left", "ball", "other"};

} // namespace

RunConfig parse_config(const std::string& text, bool require_mesh)
{
  RunConfig cfg;
  std::string section;
  std::size_t number = 0;
  bool any = false;
  std::optional<std::size_t> generator_line, file_line;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw))
  {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos)
      raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty())
      continue;
    any = true;
    if (line.front() == '[')
    {
      if (line.back() != ']')
        throw ParseError("malformed section header '" + line + "'", number);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      static const std::vector<std::string> sections{"mesh", "bc", "time", "output", "study"};
      require_name(section, sections, "section", number);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value', got '" + line + "'", number);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (section.empty())
      throw ParseError("key '" + key + "' appears before any section", number);
    if (value.empty())
      throw ParseError("key '" + key + "' has no value", number);
    auto unknown = [&] { return ParseError("unknown key '" + key + "' in [" + section + "]", number); };

    if (section == "mesh")
    {
      auto& m = cfg.mesh;
      if (key == "generator")
      {
        require_name(value, generators, "mesh generator", number);
        m.generator = value;
        generator_line = number;
      }
      else if (key == "file")
      {
        m.file = value;
        file_line = number;
      }
      else if (key == "nx")
        m.nx = to_int(value, number);
      else if (key == "ny")
        m.ny = to_int(value, number);
      else if (key == "xmin")
        m.box.lo.x = to_double(value, number);
      else if (key == "xmax")
        m.box.hi.x = to_double(value, number);
      else if (key == "ymin")
        m.box.lo.y = to_double(value, number);
      else if (key == "ymax")
        m.box.hi.y = to_double(value, number);
      else if (key == "nx_rect")
        m.nx_rect = to_int(value, number);
      else if (key == "split")
        m.split = parse_split(value, number);
      else if (key == "h")
        m.h = to_double(value, number);
      else if (key == "n_circle")
        m.n_circle = to_int(value, number);
      else
        throw unknown();
      if (m.nx < 1 || m.ny < 1 || m.nx_rect < 0 || !(m.h > 0.0) || m.n_circle < 3)
        throw ParseError("'" + key + "' out of range (nx, ny >= 1, nx_rect >= 0, h > 0, n_circle >= 3)", number);
    }
    else if (section == "bc")
    {
      if (std::find(boundary_tags.begin(), boundary_tags.end(), key) == boundary_tags.end())
        throw ParseError("unknown boundary tag '" + key + "' (valid tags: " + join(boundary_tags) + ")", number);
      const auto words = split(value, ' ');
      BoundaryAssignment a{*parse_edge_tag(key)};
      if (words[0] == "natural" && words.size() == 1)
        a.essential = false;
      else if (words[0] == "essential" && words.size() <= 2)
      {
        a.essential = true;
        a.expression = words.size() == 2 ? words[1] : "zero";
        require_name(a.expression, expressions::trace_names(), "boundary expression", number);
      }
      else
        throw ParseError("expected 'natural' or 'essential <expression>' for tag '" + key + "'", number);
      std::erase_if(cfg.bc, [&](const BoundaryAssignment& b) { return b.tag == a.tag; });
      cfg.bc.push_back(a);
    }
    else if (section == "time")
    {
      if (key == "t_end")
        cfg.t_end = to_double(value, number);
      else if (key == "dt")
        cfg.dt = to_double(value, number);
      else if (key == "cfl_safety")
        cfg.cfl_safety = to_double(value, number);
      else if (key == "initial")
      {
        require_name(value, expressions::field_names(), "initial field", number);
        cfg.initial = value;
      }
      else if (key == "source")
      {
        require_name(value, expressions::field_names(), "source", number);
        cfg.source = value;
      }
      else
        throw unknown();
      if (key == "t_end" && cfg.t_end < 0.0)
        throw ParseError("t_end must be non-negative", number);
      if (key == "dt" && !(*cfg.dt > 0.0))
        throw ParseError("dt must be positive", number);
      if (key == "cfl_safety" && !(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
        throw ParseError("cfl_safety must lie in (0, 1]", number);
    }
    else if (section == "output")
    {
      if (key == "directory")
        cfg.output_dir = value;
      else if (key == "interval")
        cfg.output_interval = to_double(value, number);
      else if (key == "times")
      {
        cfg.output_times.clear();
        for (const auto& t : split(value, ','))
          cfg.output_times.push_back(to_double(t, number));
      }
      else
        throw unknown();
    }
    else if (section == "study")
    {
      auto& o = cfg.study.options;
      if (key == "families")
      {
        cfg.study.families.clear();
        for (const auto& f : split(value, ','))
        {
          require_name(f, {"rect", "tri", "hybrid"}, "mesh family", number);
          cfg.study.families.push_back(parse_mesh_family(f));
        }
      }
      else if (key == "levels")
        o.levels = to_int(value, number);
      else if (key == "base_cells")
        o.base_cells = to_int(value, number);
      else if (key == "t_end")
        o.t_end = to_double(value, number);
      else if (key == "cfl_safety")
        o.cfl_safety = to_double(value, number);
      else if (key == "samples_in_time")
        o.samples_in_time = to_int(value, number);
      else
        throw unknown();
      if (o.levels < 2 || o.base_cells < 1 || !(o.t_end > 0.0) || o.samples_in_time < 1 ||
          !(o.cfl_safety > 0.0 && o.cfl_safety <= 1.0))
        throw ParseError("'" + key + "' out of range (levels >= 2, base_cells >= 1, t_end > 0, "
                         "samples_in_time >= 1, 0 < cfl_safety <= 1)", number);
    }
  }

  if (!any && require_mesh)
    throw ConfigError("empty configuration; required: [mesh] generator (" + join(generators) +
                      ") or [mesh] file");
  if (generator_line && file_line)
    throw ConfigError("[mesh] lines " + std::to_string(*generator_line) + " and " + std::to_string(*file_line) +
                      ": give either a generator or a file, not both");
  if (require_mesh && !generator_line && !file_line)
    throw ConfigError("[mesh]: missing required key 'generator' (" + join(generators) + ") or 'file'");
  return cfg;
}

RunConfig read_config(const std::filesystem::path& path, bool require_mesh)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open configuration file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  auto cfg = parse_config(text.str(), require_mesh);
  if (!cfg.mesh.file.empty() && cfg.mesh.file.is_relative())
    cfg.mesh.file = path.parent_path() / cfg.mesh.file;
  return cfg;
}

RunConfig preset(const std::string& name)
{
  if (name != "scattering")
    throw ConfigError("unknown preset '" + name + "' (known: scattering)");
  RunConfig cfg;
  cfg.mesh.generator = "scattering";
  cfg.mesh.h = 0.05;
  cfg.mesh.n_circle = 32;
  cfg.bc = {{EdgeTag::Left, true, "demo_left_pulse"}, {EdgeTag::Ball, true, "zero"}, {EdgeTag::Other, false, "zero"}};
  cfg.t_end = 5.0;
  cfg.cfl_safety = 0.9;
  cfg.output_dir = "demo_output";
  cfg.output_times = {2.3, 5.0};
  return cfg;
}

HybridMesh build_mesh(const MeshSource& m)
{
  if (!m.file.empty())
    return read_mesh(m.file);
  if (m.generator == "rect")
    return build_structured_rect_mesh(m.nx, m.ny, m.box);
  if (m.generator == "tri")
    return build_structured_tri_mesh(m.nx, m.ny, m.box, m.split);
  if (m.generator == "hybrid")
    return build_structured_hybrid_mesh(m.nx, m.ny, m.box, m.nx_rect, m.split);
  if (m.generator == "scattering")
    return build_scattering_demo_mesh(m.h, m.n_circle);
  throw ConfigError("unknown mesh generator '" + m.generator + "'");
}

std::vector<int> essential_edges(const HybridMesh& mesh, const RunConfig& config)
{
  std::vector<int> edges;
  for (int e = 0; e < mesh.num_edges(); ++e)
    for (const auto& a : config.bc)
      if (a.essential && a.tag == mesh.edge_tag(e))
        edges.push_back(e);
  return edges;
}

TraceFunction boundary_trace(const RunConfig& config)
{
  std::map<EdgeTag, TraceFunction> traces;
  for (const auto& a : config.bc)
    if (a.essential)
      traces[a.tag] = expressions::trace(a.expression);
  return [traces](const Vec2& p, EdgeTag tag, double t) {
    const auto it = traces.find(tag);
    return it == traces.end() ? 0.0 : it->second(p, tag, t);
  };
}

} // namespace yeefem
