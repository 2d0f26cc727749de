#include "yeefem/errors.hpp"
#include "yeefem/mesh.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace yeefem {

namespace {

struct Line
{
  std::size_t number;
  std::vector<std::string_view> tokens;
};

std::vector<Line> tokenize(std::string_view text)
{
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!text.empty())
  {
    ++number;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);

    Line out{number, {}};
    std::size_t i = 0;
    while (i < line.size())
    {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
        ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
        ++j;
      if (j > i)
        out.tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (!out.tokens.empty())
      lines.push_back(std::move(out));
  }
  return lines;
}

template <class T>
T parse_number(std::string_view token, std::size_t line)
{
  T value{};
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParseError("cannot parse '" + std::string(token) + "' as a number", line);
  return value;
}

class Reader
{
public:
  explicit Reader(std::vector<Line> lines) : lines_(std::move(lines)) {}

  bool done() const { return pos_ >= lines_.size(); }
  const Line& peek() const { return lines_[pos_]; }
  const Line& next()
  {
    if (done())
      throw ParseError("unexpected end of file", lines_.empty() ? 0 : lines_.back().number);
    return lines_[pos_++];
  }

  std::size_t count()
  {
    const auto& line = next();
    if (line.tokens.size() != 1)
      throw ParseError("expected a single record count", line.number);
    const auto n = parse_number<long>(line.tokens[0], line.number);
    if (n < 0)
      throw ParseError("negative record count", line.number);
    return static_cast<std::size_t>(n);
  }

  const Line& record(std::size_t fields, const char* what)
  {
    const auto& line = next();
    if (line.tokens.size() != fields)
      throw ParseError(std::string(what) + " record needs " + std::to_string(fields) +
                         " fields, found " + std::to_string(line.tokens.size()),
                       line.number);
    return line;
  }

private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

} // namespace

HybridMesh parse_mesh(std::string_view text)
{
  Reader reader(tokenize(text));
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 4>> rectangles;
  std::vector<BoundaryTagEntry> tags;
  bool have_vertices = false;

  auto index = [&](std::string_view token, std::size_t line) {
    const int i = parse_number<int>(token, line);
    if (i < 0 || i >= static_cast<int>(vertices.size()))
      throw ParseError("vertex index " + std::to_string(i) + " out of range", line);
    return i;
  };

  while (!reader.done())
  {
    const auto& header = reader.next();
    if (header.tokens.size() != 1 || header.tokens[0].empty() || header.tokens[0][0] != '$')
      throw ParseError("expected a section header such as $Vertices", header.number);
    const auto section = header.tokens[0];
    const std::size_t n = reader.count();

    if (section == "$Vertices")
    {
      for (std::size_t k = 0; k < n; ++k)
      {
        const auto& l = reader.record(2, "vertex");
        vertices.push_back({parse_number<double>(l.tokens[0], l.number),
                            parse_number<double>(l.tokens[1], l.number)});
      }
      have_vertices = true;
      continue;
    }
    if (!have_vertices)
      throw ParseError("$Vertices must come first", header.number);

    if (section == "$Triangles")
    {
      for (std::size_t k = 0; k < n; ++k)
      {
        const auto& l = reader.record(3, "triangle");
        triangles.push_back({index(l.tokens[0], l.number), index(l.tokens[1], l.number),
                             index(l.tokens[2], l.number)});
      }
    }
    else if (section == "$Rectangles")
    {
      for (std::size_t k = 0; k < n; ++k)
      {
        const auto& l = reader.record(4, "rectangle");
        rectangles.push_back({index(l.tokens[0], l.number), index(l.tokens[1], l.number),
                              index(l.tokens[2], l.number), index(l.tokens[3], l.number)});
      }
    }
    else if (section == "$BoundaryTags")
    {
      for (std::size_t k = 0; k < n; ++k)
      {
        const auto& l = reader.record(3, "boundary tag");
        const auto tag = parse_edge_tag(l.tokens[2]);
        if (!tag || !is_boundary_tag(*tag))
          throw ParseError("unknown boundary tag '" + std::string(l.tokens[2]) +
                             "' (valid: left, ball, other)",
                           l.number);
        tags.push_back({index(l.tokens[0], l.number), index(l.tokens[1], l.number), *tag});
      }
    }
    else
    {
      throw ParseError("unknown section '" + std::string(section) + "'", header.number);
    }
  }
  if (!have_vertices)
    throw ParseError("missing $Vertices section", 0);
  return HybridMesh::build(std::move(vertices), std::move(triangles), std::move(rectangles), tags);
}

HybridMesh read_mesh(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open mesh file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_mesh(buffer.str());
}

std::string format_mesh(const HybridMesh& mesh)
{
  std::string out = "# yeefem hybrid mesh\n";
  out += fmt::format("$Vertices\n{}\n", mesh.num_vertices());
  for (const auto& p : mesh.vertices())
    out += fmt::format("{:.17g} {:.17g}\n", p.x, p.y);
  out += fmt::format("$Triangles\n{}\n", mesh.num_triangles());
  for (const auto& t : mesh.triangles())
    out += fmt::format("{} {} {}\n", t[0], t[1], t[2]);
  out += fmt::format("$Rectangles\n{}\n", mesh.num_rectangles());
  for (const auto& r : mesh.rectangles())
    out += fmt::format("{} {} {} {}\n", r[0], r[1], r[2], r[3]);

  std::vector<int> boundary;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.is_boundary_edge(e))
      boundary.push_back(e);
  out += fmt::format("$BoundaryTags\n{}\n", boundary.size());
  for (int e : boundary)
    out += fmt::format("{} {} {}\n", mesh.edges()[e].v0, mesh.edges()[e].v1, to_string(mesh.edge_tag(e)));
  return out;
}

void write_mesh(const HybridMesh& mesh, const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write mesh file " + path.string());
  out << format_mesh(mesh);
  if (!out)
    throw Error("failed writing mesh file " + path.string());
}

} // namespace yeefem
