#include "memlme/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "memlme/error.hpp"

namespace memlme {
namespace fs = std::filesystem;
namespace {

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

[[noreturn]] void parse_fail(const fs::path& path, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Returns the next non-empty, non-comment line; false at EOF.
bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

struct RawMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
};

RawMesh read_off(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  if (!next_line(in, line, lineno)) parse_fail(path, lineno, "empty file");
  std::istringstream head(line);
  std::string magic;
  head >> magic;
  if (magic.rfind("OFF", 0) != 0) parse_fail(path, lineno, "missing OFF header");
  long nv = -1, nf = -1, ne = 0;
  if (!(head >> nv)) {
    if (!next_line(in, line, lineno)) parse_fail(path, lineno, "missing counts");
    head = std::istringstream(line);
    head >> nv;
  }
  if (!(head >> nf) || nv < 0 || nf < 0) parse_fail(path, lineno, "bad counts");
  head >> ne;

  RawMesh m;
  m.vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    if (!next_line(in, line, lineno)) parse_fail(path, lineno, "truncated vertex list");
    std::istringstream s(line);
    Vec3 p;
    if (!(s >> p.x() >> p.y() >> p.z())) parse_fail(path, lineno, "bad vertex");
    m.vertices.push_back(p);
  }
  for (long i = 0; i < nf; ++i) {
    if (!next_line(in, line, lineno)) parse_fail(path, lineno, "truncated face list");
    std::istringstream s(line);
    int k = 0;
    Face f{};
    if (!(s >> k) || k != 3) parse_fail(path, lineno, "only triangles are supported");
    if (!(s >> f[0] >> f[1] >> f[2])) parse_fail(path, lineno, "bad face");
    m.faces.push_back(f);
  }
  return m;
}

RawMesh read_obj(const fs::path& path) {
  std::ifstream in = open_in(path);
  RawMesh m;
  std::string line;
  std::size_t lineno = 0;
  while (next_line(in, line, lineno)) {
    std::istringstream s(line);
    std::string tag;
    s >> tag;
    if (tag == "v") {
      Vec3 p;
      if (!(s >> p.x() >> p.y() >> p.z())) parse_fail(path, lineno, "bad vertex");
      m.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (s >> tok) {
        try {
          int i = std::stoi(tok.substr(0, tok.find('/')));
          i = i < 0 ? static_cast<int>(m.vertices.size()) + i : i - 1;
          idx.push_back(i);
        } catch (const std::exception&) {
          parse_fail(path, lineno, "bad face index '" + tok + "'");
        }
      }
      if (idx.size() != 3) parse_fail(path, lineno, "only triangles are supported");
      m.faces.push_back({idx[0], idx[1], idx[2]});
    }
  }
  return m;
}

RawMesh read_raw(const fs::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".off") return read_off(path);
  if (ext == ".obj") return read_obj(path);
  throw Error(ErrorCode::kParse, "unsupported mesh format: " + path.string());
}

std::vector<Vec3> read_frame_positions(const fs::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".off" || ext == ".obj") return read_raw(path).vertices;
  return load_points(path);
}

}  // namespace

TriMesh load_mesh(const fs::path& path) {
  RawMesh m = read_raw(path);
  try {
    return TriMesh(std::move(m.vertices), std::move(m.faces));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument)
      throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
    throw;
  }
}

void save_off(const TriMesh& mesh, const fs::path& path) {
  std::ofstream out = open_out(path);
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << ' ' << mesh.num_edges() << '\n';
  for (const Vec3& p : mesh.vertices())
    out << fmt17(p.x()) << ' ' << fmt17(p.y()) << ' ' << fmt17(p.z()) << '\n';
  for (const Face& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::vector<Vec3> load_points(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<Vec3> pts;
  std::string line;
  std::size_t lineno = 0;
  while (next_line(in, line, lineno)) {
    std::istringstream s(line);
    Vec3 p;
    if (!(s >> p.x() >> p.y() >> p.z())) parse_fail(path, lineno, "expected 'x y z'");
    pts.push_back(p);
  }
  return pts;
}

void save_points(std::span<const Vec3> points, const fs::path& path) {
  std::ofstream out = open_out(path);
  for (const Vec3& p : points) out << fmt17(p.x()) << ' ' << fmt17(p.y()) << ' ' << fmt17(p.z()) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

Trajectory load_trajectory(const fs::path& manifest) {
  nlohmann::json j;
  try {
    std::ifstream in = open_in(manifest);
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, manifest.string() + ": " + e.what());
  }
  const fs::path dir = manifest.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : dir / p; };

  Trajectory traj;
  try {
    const auto& frames = j.at("frames");
    if (!frames.is_array() || frames.empty())
      throw Error(ErrorCode::kInvalidArgument, manifest.string() + ": manifest lists no frames");
    fs::path topo;
    if (j.contains("topology")) {
      topo = resolve(j.at("topology").get<std::string>());
    } else {
      topo = resolve(frames.front().at("file").get<std::string>());
    }
    const TriMesh ref = load_mesh(topo);
    traj.faces.assign(ref.faces().begin(), ref.faces().end());
    for (const auto& fr : frames) {
      const fs::path file = resolve(fr.at("file").get<std::string>());
      traj.times.push_back(fr.at("t").get<double>());
      traj.frames.push_back(read_frame_positions(file));
      if (traj.frames.back().size() != ref.num_vertices())
        throw Error(ErrorCode::kParse, file.string() + ": vertex count does not match topology");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, manifest.string() + ": " + e.what());
  }
  try {
    traj.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, manifest.string() + ": " + e.what());
  }
  return traj;
}

void save_trajectory(const Trajectory& traj, const fs::path& manifest) {
  traj.validate();
  const fs::path dir = manifest.parent_path();
  const std::string stem = manifest.stem().string();
  std::error_code ec;
  if (!dir.empty()) fs::create_directories(dir, ec);  // a failure surfaces as IoError on the first write
  nlohmann::json j;
  j["frames"] = nlohmann::json::array();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const std::string name = stem + "_" + std::to_string(k) + ".off";
    save_off(TriMesh(traj.frames[k], traj.faces), dir / name);
    j["frames"].push_back({{"file", name}, {"t", traj.times[k]}});
  }
  std::ofstream out = open_out(manifest);
  out << j.dump(2) << '\n';
}

}  // namespace memlme
