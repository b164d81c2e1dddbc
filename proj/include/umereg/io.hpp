#pragma once

#include "umereg/geom.hpp"
#include "umereg/solver.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace umereg {

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
};

enum class FileFormat { Xyz, PlyAscii, Off };

/// From the extension: .xyz/.txt/.pts, .ply, .off. Throws InvalidInput.
FileFormat format_from_path(const std::filesystem::path& path);

using Loaded = std::variant<PointCloud, Mesh>;

/// xyz -> cloud; ply-ascii -> vertex elements as cloud; off -> mesh.
Loaded load_cloud(const std::filesystem::path& path, FileFormat format);

/// Whitespace-separated x y z per line; blank lines and '#' comments skipped.
PointCloud parse_xyz(std::istream& in, const std::string& name = "<stream>");
PointCloud parse_ply_cloud(std::istream& in, const std::string& name = "<stream>");
Mesh parse_ply_mesh(std::istream& in, const std::string& name = "<stream>");
/// Polygonal faces are fan-triangulated.
Mesh parse_off(std::istream& in, const std::string& name = "<stream>");

/// Reads any supported file as a point cloud (mesh files yield their vertices).
PointCloud load_points(const std::filesystem::path& path);
/// Reads an OFF or PLY mesh.
Mesh load_mesh(const std::filesystem::path& path);

void save_xyz(const PointCloud& cloud, const std::filesystem::path& path);

/// Area-weighted triangle choice followed by uniform barycentric sampling.
/// Output ids are 0..n-1.
PointCloud sample_mesh(const Mesh& mesh, std::size_t n, Rng& rng);

// UMEF interchange: "UMEF 1", "points N", "features K", then N rows of 3+K
// reals at 17 significant digits.
UmefBundle parse_umef(std::istream& in, const std::string& name = "<stream>");
void format_umef(const UmefBundle& bundle, std::ostream& out);
UmefBundle read_umef(const std::filesystem::path& path);
void write_umef(const UmefBundle& bundle, const std::filesystem::path& path);

// Transform JSON: {"rotation": [9 row-major], "translation": [3]}.
std::string transform_to_json(const RigidTransform& T);
RigidTransform transform_from_json(std::string_view text);
void write_transform_json(const RigidTransform& T, const std::filesystem::path& path);
RigidTransform read_transform_json(const std::filesystem::path& path);

/// Locale-independent decimal rendering with 17 significant digits.
std::string format_double17(double value);
/// Shortest decimal string that round-trips, locale-independent.
std::string format_double_shortest(double value);
/// Locale-independent strict parse; throws InvalidInput.
double parse_double(std::string_view text);

}  // namespace umereg
