#include "relocnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "relocnet/errors.hpp"
#include "relocnet/image_io.hpp"

namespace fs = std::filesystem;

namespace relocnet {

std::string role_name(Role r) {
  switch (r) {
    case Role::Train: return "train";
    case Role::Validation: return "validation";
    case Role::Test: return "test";
  }
  return "?";
}

Role role_from_name(const std::string& s) {
  if (s == "train") return Role::Train;
  if (s == "validation") return Role::Validation;
  if (s == "test") return Role::Test;
  throw IngestionError("unknown trajectory role: " + s);
}

const Trajectory* DatasetBundle::find(const std::string& name) const {
  for (const auto& t : trajectories)
    if (t.name == name) return &t;
  return nullptr;
}

namespace {

Quaternion checked_unit(Quaternion q, const std::string& where) {
  const double n = q.norm();
  if (n <= 0 || !std::isfinite(n))
    throw IngestionError("degenerate quaternion in " + where);
  if (std::abs(n - 1.0) > 1e-6) {
    // tolerate file rounding, re-normalize
  }
  return quat_normalize(q);
}

struct TimedEntry {
  double ts;
  std::vector<std::string> fields;
};

std::vector<TimedEntry> read_tum_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IngestionError("missing TUM file: " + path);
  std::vector<TimedEntry> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    TimedEntry e;
    if (!(is >> e.ts)) continue;
    std::string tok;
    while (is >> tok) e.fields.push_back(tok);
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [](const TimedEntry& a, const TimedEntry& b) { return a.ts < b.ts; });
  return out;
}

// Index of the entry nearest in time, by binary search over sorted entries.
std::size_t nearest_index(const std::vector<TimedEntry>& v, double ts) {
  auto it = std::lower_bound(
      v.begin(), v.end(), ts,
      [](const TimedEntry& e, double t) { return e.ts < t; });
  if (it == v.begin()) return 0;
  if (it == v.end()) return v.size() - 1;
  const auto prev = it - 1;
  return (ts - prev->ts <= it->ts - ts) ? std::size_t(prev - v.begin())
                                        : std::size_t(it - v.begin());
}

}  // namespace

Trajectory load_tum_sequence(const std::string& root, double assoc_tolerance,
                             IngestStats* stats) {
  const auto rgb = read_tum_file(root + "/rgb.txt");
  const auto depth = read_tum_file(root + "/depth.txt");
  const auto gt = read_tum_file(root + "/groundtruth.txt");
  if (gt.empty()) throw IngestionError("empty groundtruth: " + root);

  Trajectory t;
  t.name = fs::path(root).filename().string();
  IngestStats local;
  for (const auto& r : rgb) {
    if (r.fields.empty()) continue;
    const std::size_t di = depth.empty() ? 0 : nearest_index(depth, r.ts);
    const std::size_t gi = nearest_index(gt, r.ts);
    const bool depth_ok =
        !depth.empty() && std::abs(depth[di].ts - r.ts) <= assoc_tolerance;
    const bool gt_ok = std::abs(gt[gi].ts - r.ts) <= assoc_tolerance;
    if (!gt_ok || (!depth.empty() && !depth_ok)) {
      ++local.dropped;
      continue;
    }
    const auto& g = gt[gi].fields;
    if (g.size() < 7)
      throw IngestionError("malformed groundtruth line at t=" +
                           std::to_string(gt[gi].ts));
    FrameRecord fr;
    fr.frame_id = r.fields[0];
    fr.rgb_path = root + "/" + r.fields[0];
    if (!depth.empty() && !depth[di].fields.empty()) {
      fr.depth_path = root + "/" + depth[di].fields[0];
      fr.depth_scale = 5000.0;  // TUM 16-bit depth factor
    }
    fr.timestamp = r.ts;
    const double tx = std::stod(g[0]), ty = std::stod(g[1]),
                 tz = std::stod(g[2]);
    // file order qx qy qz qw -> internal (w,x,y,z)
    Quaternion q{std::stod(g[6]), std::stod(g[3]), std::stod(g[4]),
                 std::stod(g[5])};
    fr.pose = Pose({tx, ty, tz}, checked_unit(q, "groundtruth t=" +
                                                     std::to_string(r.ts)));
    t.frames.push_back(std::move(fr));
    ++local.frames;
  }
  if (t.frames.empty())
    throw IngestionError("zero matched frames in TUM sequence: " + root);
  if (stats) *stats = local;
  return t;
}

Trajectory load_7scenes_sequence(const std::string& root) {
  Trajectory t;
  t.name = fs::path(root).filename().string();
  t.intrinsics = {585.0, 585.0, 320.0, 240.0};  // Kinect defaults for 7-Scenes

  std::vector<std::string> pose_files;
  if (!fs::is_directory(root))
    throw IngestionError("not a directory: " + root);
  for (const auto& e : fs::directory_iterator(root)) {
    const auto name = e.path().filename().string();
    if (name.size() > 9 && name.substr(name.size() - 9) == ".pose.txt")
      pose_files.push_back(e.path().string());
  }
  std::sort(pose_files.begin(), pose_files.end());
  if (pose_files.empty())
    throw IngestionError("no frame-*.pose.txt files in " + root);

  for (const auto& pf : pose_files) {
    std::ifstream f(pf);
    if (!f) throw IngestionError("cannot read pose file: " + pf);
    std::array<double, 16> m{};
    for (auto& v : m)
      if (!(f >> v)) throw IngestionError("malformed 4x4 pose: " + pf);
    std::array<double, 9> r = {m[0], m[1], m[2], m[4], m[5],
                               m[6], m[8], m[9], m[10]};
    FrameRecord fr;
    const std::string stem =
        fs::path(pf).filename().string().substr(0, 12);  // frame-NNNNNN
    fr.frame_id = stem;
    try {
      fr.pose = Pose({m[3], m[7], m[11]}, rotmat_to_quat(r));
    } catch (const DomainError& e) {
      throw IngestionError("frame " + stem + ": " + e.what());
    }
    const std::string dir = fs::path(pf).parent_path().string();
    const std::string color = dir + "/" + stem + ".color.png";
    const std::string depth = dir + "/" + stem + ".depth.png";
    if (fs::exists(color)) fr.rgb_path = color;
    if (fs::exists(depth)) {
      fr.depth_path = depth;
      fr.depth_scale = 1000.0;  // millimeters
    }
    t.frames.push_back(std::move(fr));
  }
  return t;
}

Trajectory load_cambridge_sequence(const std::string& root,
                                   const std::string& split_file) {
  const std::string path = root + "/" + split_file;
  std::ifstream f(path);
  if (!f) throw IngestionError("missing split file: " + path);
  Trajectory t;
  t.name = fs::path(split_file).stem().string();
  std::string line;
  std::size_t lineno = 0;
  bool in_body = false;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string img;
    double x, y, z, qw, qx, qy, qz;
    if (!(is >> img >> x >> y >> z >> qw >> qx >> qy >> qz)) {
      if (!in_body) continue;  // free-form header
      throw IngestionError("malformed line " + std::to_string(lineno) +
                           " in " + path);
    }
    in_body = true;
    FrameRecord fr;
    fr.frame_id = img;
    fr.rgb_path = root + "/" + img;
    fr.pose = Pose({x, y, z},
                   checked_unit({qw, qx, qy, qz},
                                "line " + std::to_string(lineno)));
    t.frames.push_back(std::move(fr));
  }
  if (t.frames.empty())
    throw IngestionError("zero frames in split file: " + path);
  return t;
}

Curriculum make_leave_one_out(const DatasetBundle& bundle,
                              const std::string& test_name) {
  if (bundle.trajectories.size() < 2)
    throw ContractViolation("leave-one-out needs at least 2 trajectories");
  Curriculum c;
  bool found = false;
  std::vector<std::size_t> remaining;
  for (std::size_t i = 0; i < bundle.trajectories.size(); ++i) {
    if (bundle.trajectories[i].name == test_name) {
      c.test_index = i;
      found = true;
    } else {
      remaining.push_back(i);
    }
  }
  if (!found)
    throw ContractViolation("unknown test trajectory: " + test_name);
  for (std::size_t k = 1; k <= remaining.size(); ++k)
    c.stages.emplace_back(remaining.begin(), remaining.begin() + long(k));
  return c;
}

void save_trajectory_manifest(const Trajectory& t, const std::string& dir) {
  fs::create_directories(dir);
  nlohmann::json j;
  j["name"] = t.name;
  j["role"] = role_name(t.role);
  j["intrinsics"] = {{"fx", t.intrinsics.fx},
                     {"fy", t.intrinsics.fy},
                     {"cx", t.intrinsics.cx},
                     {"cy", t.intrinsics.cy}};
  j["frames"] = nlohmann::json::array();
  std::size_t idx = 0;
  for (const auto& f : t.frames) {
    nlohmann::json fj;
    fj["id"] = f.frame_id;
    const PoseVector p = pose_to_vector(f.pose);
    fj["pose"] = std::vector<double>(p.begin(), p.end());
    if (f.timestamp) fj["timestamp"] = *f.timestamp;
    fj["depth_scale"] = f.depth_scale;
    if (f.rgb) {
      const std::string rel = "frame_" + std::to_string(idx) + ".rgb.bin";
      save_tensor(*f.rgb, dir + "/" + rel);
      fj["rgb"] = rel;
      fj["rgb_kind"] = "tensor";
    } else if (!f.rgb_path.empty()) {
      fj["rgb"] = f.rgb_path;
      fj["rgb_kind"] = "image";
    }
    if (f.depth) {
      const std::string rel = "frame_" + std::to_string(idx) + ".depth.bin";
      save_tensor(*f.depth, dir + "/" + rel);
      fj["depth"] = rel;
      fj["depth_kind"] = "tensor";
    } else if (!f.depth_path.empty()) {
      fj["depth"] = f.depth_path;
      fj["depth_kind"] = "image";
    }
    j["frames"].push_back(fj);
    ++idx;
  }
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw IngestionError("cannot write manifest under " + dir);
  out << j.dump(2) << "\n";
}

Trajectory load_trajectory_manifest(const std::string& manifest_path) {
  std::ifstream f(manifest_path);
  if (!f) throw IngestionError("cannot open manifest: " + manifest_path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError("malformed manifest: " + std::string(e.what()));
  }
  const std::string dir = fs::path(manifest_path).parent_path().string();
  Trajectory t;
  t.name = j.at("name").get<std::string>();
  t.role = role_from_name(j.value("role", "train"));
  if (j.contains("intrinsics")) {
    const auto& ij = j["intrinsics"];
    t.intrinsics = {ij.at("fx"), ij.at("fy"), ij.at("cx"), ij.at("cy")};
  }
  for (const auto& fj : j.at("frames")) {
    FrameRecord fr;
    fr.frame_id = fj.at("id").get<std::string>();
    const auto p = fj.at("pose").get<std::vector<double>>();
    if (p.size() != 7)
      throw IngestionError("pose is not a 7-vector in " + fr.frame_id);
    // Bypass construction-time normalization: poses round-trip bit-exactly.
    fr.pose.position = {p[0], p[1], p[2]};
    fr.pose.orientation = {p[3], p[4], p[5], p[6]};
    if (fj.contains("timestamp")) fr.timestamp = fj["timestamp"].get<double>();
    fr.depth_scale = fj.value("depth_scale", 1.0);
    if (fj.contains("rgb")) {
      const auto ref = fj["rgb"].get<std::string>();
      if (fj.value("rgb_kind", "image") == "tensor")
        fr.rgb = load_tensor(dir + "/" + ref);
      else
        fr.rgb_path = ref;
    }
    if (fj.contains("depth")) {
      const auto ref = fj["depth"].get<std::string>();
      if (fj.value("depth_kind", "image") == "tensor")
        fr.depth = load_tensor(dir + "/" + ref);
      else
        fr.depth_path = ref;
    }
    t.frames.push_back(std::move(fr));
  }
  if (t.frames.empty())
    throw IngestionError("empty trajectory manifest: " + manifest_path);
  return t;
}

void materialize_frame(FrameRecord& f) {
  if (!f.rgb && !f.rgb_path.empty()) f.rgb = load_rgb_image(f.rgb_path);
  if (!f.depth && !f.depth_path.empty())
    f.depth = load_depth_image(f.depth_path, f.depth_scale);
}

}  // namespace relocnet
