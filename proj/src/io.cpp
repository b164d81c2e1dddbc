#include "umereg/io.hpp"

#include "umereg/errors.hpp"

#include <Eigen/Geometry>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace umereg {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

// Line-oriented reader that tracks 1-based line numbers and skips blank lines
// and lines whose first token starts with '#'.
class LineReader {
 public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  bool next(std::vector<std::string_view>& tokens) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      tokens = split_ws(line_);
      if (tokens.empty() || tokens.front().front() == '#') continue;
      return true;
    }
    ++line_no_;
    return false;
  }

  std::vector<std::string_view> require(const char* what) {
    std::vector<std::string_view> tokens;
    if (!next(tokens)) fail(std::string("unexpected end of file, expected ") + what);
    return tokens;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(name_, line_no_, what); }

  double number(std::string_view token) const {
    double v = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec != std::errc() || ptr != end) fail("invalid number '" + std::string(token) + "'");
    if (!std::isfinite(v)) fail("non-finite value '" + std::string(token) + "'");
    return v;
  }

  long long integer(std::string_view token) const {
    long long v = 0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec != std::errc() || ptr != end) fail("invalid integer '" + std::string(token) + "'");
    return v;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string name_;
  std::string line_;
  std::size_t line_no_ = 0;
};

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  return out;
}

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  struct Property {
    std::string name;
    bool is_list = false;
  };
  std::vector<Property> properties;
};

struct PlyData {
  std::vector<Vec3> vertices;
  std::vector<std::vector<long long>> faces;
};

PlyData parse_ply(std::istream& in, const std::string& name) {
  // Header lines are read verbatim: "comment" lines are legal there.
  LineReader r(in, name);
  auto tokens = r.require("'ply'");
  if (tokens.size() != 1 || tokens[0] != "ply") r.fail("missing 'ply' magic");
  std::vector<PlyElement> elements;
  bool format_seen = false;
  for (;;) {
    tokens = r.require("PLY header line");
    const auto key = tokens[0];
    if (key == "end_header") break;
    if (key == "comment" || key == "obj_info") continue;
    if (key == "format") {
      if (tokens.size() < 2) r.fail("malformed format line");
      if (tokens[1] != "ascii") r.fail("only ASCII PLY is supported, found '" + std::string(tokens[1]) + "'");
      format_seen = true;
    } else if (key == "element") {
      if (tokens.size() != 3) r.fail("malformed element line");
      const long long count = r.integer(tokens[2]);
      if (count < 0) r.fail("negative element count");
      elements.push_back({std::string(tokens[1]), static_cast<std::size_t>(count), {}});
    } else if (key == "property") {
      if (elements.empty()) r.fail("property before any element");
      if (tokens.size() == 5 && tokens[1] == "list") {
        elements.back().properties.push_back({std::string(tokens[4]), true});
      } else if (tokens.size() == 3) {
        elements.back().properties.push_back({std::string(tokens[2]), false});
      } else {
        r.fail("malformed property line");
      }
    } else {
      r.fail("unknown header keyword '" + std::string(key) + "'");
    }
  }
  if (!format_seen) r.fail("missing format line");

  PlyData data;
  for (const auto& el : elements) {
    int ix = -1, iy = -1, iz = -1, ilist = -1;
    for (std::size_t k = 0; k < el.properties.size(); ++k) {
      const auto& p = el.properties[k];
      if (p.name == "x") ix = static_cast<int>(k);
      if (p.name == "y") iy = static_cast<int>(k);
      if (p.name == "z") iz = static_cast<int>(k);
      if (p.is_list && (p.name == "vertex_indices" || p.name == "vertex_index")) ilist = static_cast<int>(k);
    }
    const bool is_vertex = el.name == "vertex";
    const bool is_face = el.name == "face";
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) r.fail("vertex element lacks x/y/z properties");

    for (std::size_t row = 0; row < el.count; ++row) {
      tokens = r.require(("row of element '" + el.name + "'").c_str());
      std::size_t pos = 0;
      Vec3 v = Vec3::Zero();
      std::vector<long long> face;
      for (std::size_t k = 0; k < el.properties.size(); ++k) {
        if (pos >= tokens.size()) r.fail("too few values in '" + el.name + "' row");
        if (el.properties[k].is_list) {
          const long long n = r.integer(tokens[pos++]);
          if (n < 0 || pos + static_cast<std::size_t>(n) > tokens.size()) r.fail("list length exceeds row");
          for (long long i = 0; i < n; ++i) {
            const long long value = r.integer(tokens[pos++]);
            if (static_cast<int>(k) == ilist) face.push_back(value);
          }
        } else {
          const double value = r.number(tokens[pos++]);
          if (static_cast<int>(k) == ix) v[0] = value;
          if (static_cast<int>(k) == iy) v[1] = value;
          if (static_cast<int>(k) == iz) v[2] = value;
        }
      }
      if (pos != tokens.size()) r.fail("too many values in '" + el.name + "' row");
      if (is_vertex) data.vertices.push_back(v);
      if (is_face && ilist >= 0) {
        if (face.size() < 3) r.fail("face with fewer than 3 vertices");
        for (long long idx : face) {
          if (idx < 0 || static_cast<std::size_t>(idx) >= data.vertices.size()) r.fail("face index out of range");
        }
        data.faces.push_back(std::move(face));
      }
    }
  }
  return data;
}

void add_polygon(Mesh& mesh, const std::vector<long long>& poly, const LineReader& r) {
  if (poly.size() < 3) r.fail("face with fewer than 3 vertices");
  for (long long idx : poly) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= mesh.vertices.size()) r.fail("face index out of range");
  }
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    mesh.triangles.push_back({static_cast<std::uint32_t>(poly[0]), static_cast<std::uint32_t>(poly[k]),
                              static_cast<std::uint32_t>(poly[k + 1])});
  }
}

}  // namespace

FileFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".xyz" || ext == ".txt" || ext == ".pts") return FileFormat::Xyz;
  if (ext == ".ply") return FileFormat::PlyAscii;
  if (ext == ".off") return FileFormat::Off;
  throw InvalidInput("unrecognized file extension '" + ext + "'");
}

PointCloud parse_xyz(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  std::vector<Vec3> points;
  std::vector<std::string_view> tokens;
  while (r.next(tokens)) {
    if (tokens.size() < 3) r.fail("expected 3 coordinates");
    points.emplace_back(r.number(tokens[0]), r.number(tokens[1]), r.number(tokens[2]));
  }
  return with_sequential_ids(std::move(points));
}

PointCloud parse_ply_cloud(std::istream& in, const std::string& name) {
  return with_sequential_ids(parse_ply(in, name).vertices);
}

Mesh parse_ply_mesh(std::istream& in, const std::string& name) {
  PlyData data = parse_ply(in, name);
  Mesh mesh;
  mesh.vertices = std::move(data.vertices);
  // Faces were range-checked while parsing.
  for (const auto& f : data.faces) {
    for (std::size_t k = 1; k + 1 < f.size(); ++k) {
      mesh.triangles.push_back({static_cast<std::uint32_t>(f[0]), static_cast<std::uint32_t>(f[k]),
                                static_cast<std::uint32_t>(f[k + 1])});
    }
  }
  return mesh;
}

Mesh parse_off(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  auto tokens = r.require("'OFF' header");
  if (tokens[0] != "OFF") r.fail("missing 'OFF' magic");
  tokens.erase(tokens.begin());
  if (tokens.empty()) tokens = r.require("vertex/face counts");
  if (tokens.size() < 2) r.fail("malformed count line");
  const long long nv = r.integer(tokens[0]);
  const long long nf = r.integer(tokens[1]);
  if (nv < 0 || nf < 0) r.fail("negative counts");

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    tokens = r.require("vertex row");
    if (tokens.size() < 3) r.fail("expected 3 vertex coordinates");
    mesh.vertices.emplace_back(r.number(tokens[0]), r.number(tokens[1]), r.number(tokens[2]));
  }
  for (long long i = 0; i < nf; ++i) {
    tokens = r.require("face row");
    const long long n = r.integer(tokens[0]);
    if (n < 0 || static_cast<std::size_t>(n) + 1 > tokens.size()) r.fail("face row shorter than its vertex count");
    std::vector<long long> poly;
    for (long long k = 1; k <= n; ++k) poly.push_back(r.integer(tokens[static_cast<std::size_t>(k)]));
    add_polygon(mesh, poly, r);
  }
  return mesh;
}

Loaded load_cloud(const std::filesystem::path& path, FileFormat format) {
  auto in = open_in(path);
  switch (format) {
    case FileFormat::Xyz:
      return parse_xyz(in, path.string());
    case FileFormat::PlyAscii:
      return parse_ply_cloud(in, path.string());
    case FileFormat::Off:
      return parse_off(in, path.string());
  }
  throw InvalidInput("unknown format");
}

PointCloud load_points(const std::filesystem::path& path) {
  Loaded loaded = load_cloud(path, format_from_path(path));
  if (auto* cloud = std::get_if<PointCloud>(&loaded)) return std::move(*cloud);
  return with_sequential_ids(std::get<Mesh>(loaded).vertices);
}

Mesh load_mesh(const std::filesystem::path& path) {
  const FileFormat format = format_from_path(path);
  auto in = open_in(path);
  if (format == FileFormat::Off) return parse_off(in, path.string());
  if (format == FileFormat::PlyAscii) return parse_ply_mesh(in, path.string());
  throw InvalidInput(path.string() + " is not a mesh format (expected .off or .ply)");
}

void save_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const Vec3& p : cloud.points()) {
    out << format_double17(p[0]) << ' ' << format_double17(p[1]) << ' ' << format_double17(p[2]) << '\n';
  }
  if (!out) throw InvalidInput("write failed: " + path.string());
}

PointCloud sample_mesh(const Mesh& mesh, std::size_t n, Rng& rng) {
  std::vector<double> cumulative;
  cumulative.reserve(mesh.triangles.size());
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    for (auto idx : t) {
      if (idx >= mesh.vertices.size()) throw InvalidInput("triangle index out of range");
    }
    const Vec3& a = mesh.vertices[t[0]];
    total += 0.5 * (mesh.vertices[t[1]] - a).cross(mesh.vertices[t[2]] - a).norm();
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw InvalidInput("mesh has zero total area");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    const auto& t = mesh.triangles[static_cast<std::size_t>(it - cumulative.begin())];
    const double s = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    points.push_back((1.0 - s) * mesh.vertices[t[0]] + s * (1.0 - r2) * mesh.vertices[t[1]] +
                     s * r2 * mesh.vertices[t[2]]);
  }
  return with_sequential_ids(std::move(points));
}

UmefBundle parse_umef(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  auto tokens = r.require("'UMEF 1' header");
  if (tokens.size() != 2 || tokens[0] != "UMEF" || tokens[1] != "1") r.fail("expected header 'UMEF 1'");
  tokens = r.require("'points N'");
  if (tokens.size() != 2 || tokens[0] != "points") r.fail("expected 'points N'");
  const long long n = r.integer(tokens[1]);
  tokens = r.require("'features K'");
  if (tokens.size() != 2 || tokens[0] != "features") r.fail("expected 'features K'");
  const long long k = r.integer(tokens[1]);
  if (n < 0) r.fail("negative point count");
  if (k < 1) r.fail("feature count must be at least 1");

  std::vector<Vec3> coords;
  coords.reserve(static_cast<std::size_t>(n));
  Matrix features(n, k);
  for (long long i = 0; i < n; ++i) {
    tokens = r.require("data row (fewer rows than declared)");
    if (tokens.size() != static_cast<std::size_t>(3 + k)) {
      r.fail("expected " + std::to_string(3 + k) + " values, found " + std::to_string(tokens.size()));
    }
    coords.emplace_back(r.number(tokens[0]), r.number(tokens[1]), r.number(tokens[2]));
    for (long long j = 0; j < k; ++j) features(i, j) = r.number(tokens[static_cast<std::size_t>(3 + j)]);
  }
  if (r.next(tokens)) r.fail("more rows than the declared " + std::to_string(n));
  return {with_sequential_ids(std::move(coords)), std::move(features)};
}

void format_umef(const UmefBundle& bundle, std::ostream& out) {
  if (static_cast<std::size_t>(bundle.features.rows()) != bundle.coords.size()) {
    throw InvalidInput("UMEF bundle: feature rows do not match coordinates");
  }
  if (bundle.features.cols() < 1) throw InvalidInput("UMEF bundle needs at least one feature");
  if (!bundle.features.allFinite()) throw InvalidInput("UMEF bundle has non-finite features");
  out << "UMEF 1\npoints " << bundle.coords.size() << "\nfeatures " << bundle.features.cols() << '\n';
  for (std::size_t i = 0; i < bundle.coords.size(); ++i) {
    const Vec3& c = bundle.coords[i];
    out << format_double17(c[0]) << ' ' << format_double17(c[1]) << ' ' << format_double17(c[2]);
    for (Eigen::Index j = 0; j < bundle.features.cols(); ++j) {
      out << ' ' << format_double17(bundle.features(static_cast<Eigen::Index>(i), j));
    }
    out << '\n';
  }
}

UmefBundle read_umef(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_umef(in, path.string());
}

void write_umef(const UmefBundle& bundle, const std::filesystem::path& path) {
  auto out = open_out(path);
  format_umef(bundle, out);
  if (!out) throw InvalidInput("write failed: " + path.string());
}

std::string transform_to_json(const RigidTransform& T) {
  std::string s = "{\"rotation\": [";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (r + c > 0) s += ", ";
      s += format_double17(T.rotation()(r, c));
    }
  }
  s += "], \"translation\": [";
  for (int k = 0; k < 3; ++k) {
    if (k > 0) s += ", ";
    s += format_double17(T.translation()[k]);
  }
  s += "]}\n";
  return s;
}

RigidTransform transform_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("<transform>", 0, e.what());
  }
  if (!j.contains("rotation") || !j.contains("translation") || !j["rotation"].is_array() ||
      !j["translation"].is_array() || j["rotation"].size() != 9 || j["translation"].size() != 3) {
    throw ParseError("<transform>", 0, "expected 9 rotation and 3 translation entries");
  }
  Mat3 R;
  Vec3 t;
  try {
    for (int k = 0; k < 9; ++k) R(k / 3, k % 3) = j["rotation"][static_cast<std::size_t>(k)].get<double>();
    for (int k = 0; k < 3; ++k) t[k] = j["translation"][static_cast<std::size_t>(k)].get<double>();
  } catch (const nlohmann::json::type_error&) {
    throw ParseError("<transform>", 0, "transform entries must be numbers");
  }
  return RigidTransform(R, t);
}

void write_transform_json(const RigidTransform& T, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << transform_to_json(T);
  if (!out) throw InvalidInput("write failed: " + path.string());
}

RigidTransform read_transform_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return transform_from_json(ss.str());
}

std::string format_double17(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::string format_double_shortest(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidInput("invalid number '" + std::string(text) + "'");
  return v;
}

}  // namespace umereg
