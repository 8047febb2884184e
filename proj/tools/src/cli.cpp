#include "memlme_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "memlme/error.hpp"
#include "memlme/generators.hpp"
#include "memlme/mesh_io.hpp"
#include "memlme/pipeline.hpp"
#include "memlme/protocols.hpp"
#include "memlme/rigidity.hpp"

#ifndef MEMLME_VERSION
#define MEMLME_VERSION "0.0.0"
#endif

namespace memlme::cli {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Flags shared by the pipeline-driven subcommands.
struct PipelineFlags {
  double beta_bar = 100.0;
  int m = 10;
  double tol = 1e-6;
  int max_iter = 100;
  std::string stencil = "shell";
  double spacing = 0.0;
  std::vector<double> window;
  int threads = 0;

  void add_to(CLI::App* app, bool scalar_beta_m = true) {
    if (scalar_beta_m) {
      app->add_option("--beta-bar", beta_bar, "Dimensionless locality parameter")->capture_default_str();
      app->add_option("--m", m, "Neighbour order of the stencil")->capture_default_str();
    }
    app->add_option("--tol", tol, "Newton tolerance factor (times stencil diameter)")->capture_default_str();
    app->add_option("--max-iter", max_iter, "Newton iteration cap")->capture_default_str();
    app->add_option("--stencil", stencil, "Stencil rule")
        ->check(CLI::IsMember({"shell", "nearest"}))
        ->capture_default_str();
    app->add_option("--spacing", spacing, "Node spacing for shell stencils (0 = measured)");
    app->add_option("--window", window, "Evaluation box x0,x1,y0,y1[,z0,z1]")->delimiter(',');
    app->add_option("--threads", threads, "Worker cap (0 = all cores)")->check(CLI::NonNegativeNumber);
  }

  PipelineConfig config() const {
    PipelineConfig cfg;
    cfg.beta_bar = beta_bar;
    cfg.m = m;
    cfg.tol_factor = tol;
    cfg.max_iter = max_iter;
    cfg.stencil = parse_stencil_rule(stencil);
    cfg.spacing = spacing;
    cfg.threads = threads;
    if (!window.empty()) {
      if (window.size() != 4 && window.size() != 6)
        throw Error(ErrorCode::kInvalidArgument, "--window takes 4 or 6 numbers");
      Window w;
      for (std::size_t i = 0; i < window.size() / 2; ++i) {
        w.lo(static_cast<Eigen::Index>(i)) = window[2 * i];
        w.hi(static_cast<Eigen::Index>(i)) = window[2 * i + 1];
      }
      cfg.window = w;
    }
    return cfg;
  }
};

json config_json(const PipelineConfig& cfg) {
  json j{{"beta_bar", cfg.beta_bar}, {"m", cfg.m},
         {"tol_factor", cfg.tol_factor}, {"max_iter", cfg.max_iter},
         {"stencil", std::string(to_string(cfg.stencil))}, {"spacing", cfg.spacing}};
  if (cfg.window) {
    json w = json::array();
    for (int i = 0; i < 3; ++i) {
      const double lo = cfg.window->lo(i), hi = cfg.window->hi(i);
      w.push_back(std::isfinite(lo) ? json(lo) : json(nullptr));
      w.push_back(std::isfinite(hi) ? json(hi) : json(nullptr));
    }
    j["window"] = w;
  }
  return j;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

// Collects what every run records next to its outputs.
struct Run {
  std::string subcommand;
  std::vector<std::string> argv;
  fs::path out_dir = ".";
  std::string unit_label = "length";
  std::uint64_t seed = 0;
  json inputs = json::array();
  json config = json::object();
  json outputs = json::array();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  fs::path output(const std::string& name) {
    outputs.push_back(name);
    return out_dir / name;
  }

  void write_manifest() const {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json m{{"tool", "memlme"},          {"version", MEMLME_VERSION},
           {"subcommand", subcommand},  {"argv", argv},
           {"inputs", inputs},          {"config", config},
           {"seed", seed},              {"unit_label", unit_label},
           {"outputs", outputs},        {"duration_seconds", seconds}};
    write_json(m, out_dir / "manifest.json");
  }
};

json summary_json(const FieldSummary& s, const std::string& unit) {
  json j{{"evaluated", s.evaluated}, {"succeeded", s.succeeded},
         {"failed", s.failed.size()}, {"failed_nodes", s.failed},
         {"mean_H", s.mean_H},       {"mean_K", s.mean_K},
         {"sd_H", s.sd_H},           {"sd_K", s.sd_K},
         {"unit_label", unit}};
  if (s.total_K) {
    j["area"] = *s.area;
    j["total_K"] = *s.total_K;
    j["total_K_over_4pi"] = *s.total_K / (4.0 * std::numbers::pi);
  }
  return j;
}

bool is_point_file(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ".xyz" || e == ".txt";
}

int cmd_estimate(Run& run, const fs::path& input, const PipelineConfig& cfg, std::ostream& out) {
  run.inputs.push_back(input.string());
  run.config = config_json(cfg);

  std::optional<TriMesh> mesh;
  std::optional<PointCloud> cloud;
  if (is_point_file(input)) {
    cloud = PointCloud{load_points(input)};
  } else {
    mesh = load_mesh(input);
  }
  const SurfaceNodes nodes = mesh ? SurfaceNodes(*mesh) : SurfaceNodes(*cloud);
  const CurvatureField field = run_field(nodes, cfg);

  {
    std::ofstream csv = open_out(run.output("curvature.csv"));
    write_curvature_csv(field, csv);
  }
  write_json(summary_json(field.summary, run.unit_label), run.output("summary.json"));
  run.write_manifest();

  const FieldSummary& s = field.summary;
  out << "nodes " << s.evaluated << ", failed " << s.failed.size() << "\n"
      << "mean H " << fmt17(s.mean_H) << " (sd " << fmt17(s.sd_H) << ") 1/" << run.unit_label << "\n"
      << "mean K " << fmt17(s.mean_K) << " (sd " << fmt17(s.sd_K) << ") 1/" << run.unit_label << "^2\n";
  if (s.total_K) out << "total K / 4pi " << fmt17(*s.total_K / (4.0 * std::numbers::pi)) << "\n";
  if (!s.failed.empty()) out << "warning: " << s.failed.size() << " node(s) failed, see curvature.csv\n";
  return kOk;
}

struct SweepFlags {
  std::vector<double> beta_bar{150.0};
  std::vector<int> m{5, 7, 9, 10, 12};
};

int cmd_benchmark_sinusoid(Run& run, const PipelineFlags& pf, const SweepFlags& sw, const std::vector<double>& hs,
                           std::ostream& out) {
  run.config = config_json(pf.config());
  run.config["beta_bar"] = sw.beta_bar;
  run.config["m"] = sw.m;
  run.config["h"] = hs;

  std::ofstream csv = open_out(run.output("benchmark_sinusoid.csv"));
  csv << "h,side,beta_bar,m,rmsd_H,rmsd_K,evaluated,failed\n";
  for (double h : hs)
    for (double bb : sw.beta_bar)
      for (int m : sw.m) {
        PipelineConfig cfg = pf.config();
        cfg.beta_bar = bb;
        cfg.m = m;
        const SinusoidResult r = run_sinusoid_benchmark(h, cfg);
        csv << fmt17(h) << ',' << r.side << ',' << fmt17(bb) << ',' << m << ',' << fmt17(r.rmsd.H) << ','
            << fmt17(r.rmsd.K) << ',' << r.evaluated << ',' << r.failed << '\n';
        out << "h=" << h << " beta_bar=" << bb << " m=" << m << "  RMSD_H=" << r.rmsd.H << "  RMSD_K=" << r.rmsd.K
            << (r.failed ? "  failed=" + std::to_string(r.failed) : std::string()) << '\n';
      }
  csv.close();
  run.write_manifest();
  return kOk;
}

int cmd_benchmark_sphere(Run& run, const PipelineFlags& pf, const SweepFlags& sw, int frequency, double radius,
                         double jitter, std::ostream& out) {
  run.config = config_json(pf.config());
  run.config["beta_bar"] = sw.beta_bar;
  run.config["m"] = sw.m;
  run.config["frequency"] = frequency;
  run.config["radius"] = radius;
  run.config["jitter"] = jitter;

  TriMesh mesh = generate_geodesic_sphere(frequency, radius);
  if (jitter > 0) {
    std::uint64_t state = run.seed;
    std::vector<Vec3> pos(mesh.vertices().begin(), mesh.vertices().end());
    for (Vec3& p : pos) p *= 1.0 + jitter * normal01(state);
    mesh = mesh.with_positions(std::move(pos));
  }
  const SurfaceNodes nodes(mesh);

  std::ofstream csv = open_out(run.output("benchmark_sphere.csv"));
  csv << "frequency,N,radius,beta_bar,m,mean_H,sd_H,mean_K,sd_K,total_K_over_4pi,failed\n";
  for (double bb : sw.beta_bar)
    for (int m : sw.m) {
      PipelineConfig cfg = pf.config();
      cfg.beta_bar = bb;
      cfg.m = m;
      const FieldSummary s = run_field(nodes, cfg).summary;
      const double gb = s.total_K ? *s.total_K / (4.0 * std::numbers::pi) : std::nan("");
      csv << frequency << ',' << mesh.num_vertices() << ',' << fmt17(radius) << ',' << fmt17(bb) << ',' << m << ','
          << fmt17(s.mean_H) << ',' << fmt17(s.sd_H) << ',' << fmt17(s.mean_K) << ',' << fmt17(s.sd_K) << ','
          << fmt17(gb) << ',' << s.failed.size() << '\n';
      out << "beta_bar=" << bb << " m=" << m << "  H=" << s.mean_H << " (sd " << s.sd_H << ")  K=" << s.mean_K
          << " (sd " << s.sd_K << ")  Ktot/4pi=" << gb << '\n';
    }
  csv.close();
  run.write_manifest();
  return kOk;
}

int cmd_rigidity(Run& run, const fs::path& manifest, const PipelineConfig& cfg, double D, BendingMode mode,
                 std::ostream& out) {
  run.inputs.push_back(manifest.string());
  run.config = config_json(cfg);
  run.config["D"] = D;
  run.config["mode"] = std::string(to_string(mode));

  const Trajectory traj = load_trajectory(manifest);
  const std::vector<RigidityRecord> rec = kappa0_estimate(traj, D, cfg, mode);
  {
    std::ofstream csv = open_out(run.output("rigidity.csv"));
    write_rigidity_csv(rec, csv);
  }
  run.write_manifest();

  const auto invalid = std::count_if(rec.begin(), rec.end(), [](const RigidityRecord& r) { return !r.valid; });
  out << "frames " << rec.size() << ", invalid " << invalid << "\n"
      << "kappa0 " << fmt17(rec.back().running_kappa0) << " (kappa0/D " << fmt17(rec.back().running_kappa0 / D)
      << ")\n";
  if (invalid) out << "warning: " << invalid << " frame(s) had non-positive bending energy\n";
  return kOk;
}

int cmd_fit(Run& run, const std::string& input, int random_nodes, double beta, const std::vector<int>& grid,
            const std::vector<double>& box, std::ostream& out) {
  std::vector<Vec3> points;
  if (!input.empty()) {
    run.inputs.push_back(input);
    points = load_points(input);
  } else if (random_nodes > 0) {
    points = generate_random_sinusoid(random_nodes, run.seed).points;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "give a point file or --random N");
  }
  if (grid.empty() || grid.size() > 2) throw Error(ErrorCode::kInvalidArgument, "--grid takes nx[,ny]");
  if (box.size() != 4) throw Error(ErrorCode::kInvalidArgument, "--box takes x0,x1,y0,y1");
  const GridSpec spec{box[0], box[1], box[2], box[3], grid[0], grid.size() == 2 ? grid[1] : grid[0]};
  run.config = {{"beta", beta}, {"grid", grid}, {"box", box}, {"random", random_nodes}};

  const std::vector<GridSample> samples = sample_surface(points, LmeParams{beta}, spec);
  int written = 0;
  {
    std::ofstream csv = open_out(run.output("fit.csv"));
    csv << "x,y,z\n";
    for (const GridSample& s : samples) {
      if (!s.ok) continue;
      csv << fmt17(s.x) << ',' << fmt17(s.y) << ',' << fmt17(s.z) << '\n';
      ++written;
    }
  }
  run.write_manifest();
  const int skipped = static_cast<int>(samples.size()) - written;
  out << "grid points " << written << " written";
  if (skipped) out << ", " << skipped << " outside the hull skipped";
  out << '\n';
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInsufficientNodes:
    case ErrorCode::kModeMismatch:
    case ErrorCode::kEmptyWindow:
      return kUsage;
    default:
      return kFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LME curvature and bending-rigidity toolkit", "memlme"};
  app.set_version_flag("--version", MEMLME_VERSION);
  app.require_subcommand(1);

  Run ctx;
  ctx.argv = args;
  std::string out_dir = ".";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--unit-label", ctx.unit_label, "Length unit used in reports")->capture_default_str();
    sub->add_option("--seed", ctx.seed, "Seed for generated data")->capture_default_str();
  };

  PipelineFlags pf;
  SweepFlags sweep;

  // estimate
  std::string est_input;
  CLI::App* est = app.add_subcommand("estimate", "Per-node curvature of a mesh (OFF/OBJ) or point set (XYZ)");
  est->add_option("input", est_input, "Mesh or point file")->required();
  pf.add_to(est);
  add_common(est);

  // benchmark
  CLI::App* bench = app.add_subcommand("benchmark", "Reference experiments");
  std::string bench_name;
  std::vector<double> hs{0.0303};
  int frequency = 24;
  double radius = 19920.0;
  double jitter = 0.0;
  bench->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  bench->add_option("name", bench_name, "sinusoid | sphere")->required()->check(CLI::IsMember({"sinusoid", "sphere"}));
  bench->add_option("--beta-bar", sweep.beta_bar, "Comma-separated beta_bar values")->delimiter(',');
  bench->add_option("--m", sweep.m, "Comma-separated neighbour orders")->delimiter(',');
  bench->add_option("--h", hs, "Grid spacings (sinusoid)")->delimiter(',');
  bench->add_option("--frequency", frequency, "Geodesic frequency (sphere)")->capture_default_str();
  bench->add_option("--radius", radius, "Sphere radius (sphere)")->capture_default_str();
  bench->add_option("--jitter", jitter, "Relative radial noise, seeded (sphere)")->capture_default_str();
  pf.add_to(bench, false);
  add_common(bench);

  // rigidity
  CLI::App* rig = app.add_subcommand("rigidity", "Bending rigidity history of a trajectory");
  std::string rig_manifest, mode_name = "closed-genus0";
  double D = 1.0;
  rig->add_option("manifest", rig_manifest, "Trajectory manifest (JSON)")->required();
  rig->add_option("--D", D, "Dihedral stiffness")->capture_default_str();
  rig->add_option("--mode", mode_name, "Bending energy form")
      ->check(CLI::IsMember({"closed-genus0", "general"}))
      ->capture_default_str();
  pf.add_to(rig);
  add_common(rig);

  // fit
  CLI::App* fit = app.add_subcommand("fit", "Sample the LME surface of a point set on a grid");
  std::string fit_input;
  int random_nodes = 0;
  double beta = 1.0;
  std::vector<int> grid{12};
  std::vector<double> box{0.0, std::numbers::pi, 0.0, std::numbers::pi};
  fit->add_option("input", fit_input, "Point file (x y z per line)");
  fit->add_option("--random", random_nodes, "Use N seeded random sinusoid nodes instead of a file");
  fit->add_option("--beta", beta, "Locality parameter (1/length^2)")->capture_default_str();
  fit->add_option("--grid", grid, "nx[,ny]")->delimiter(',');
  fit->add_option("--box", box, "x0,x1,y0,y1")->delimiter(',');
  add_common(fit);

  // replay
  CLI::App* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  std::string replay_manifest;
  replay->add_option("manifest", replay_manifest, "manifest.json of a previous run")->required();
  replay->add_option("--out", out_dir, "Output directory (default: the recorded one)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    ctx.out_dir = out_dir;
    if (*replay) {
      std::ifstream in(replay_manifest);
      if (!in) throw Error(ErrorCode::kIo, "cannot open " + replay_manifest);
      json m;
      try {
        m = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kParse, replay_manifest + ": " + e.what());
      }
      std::vector<std::string> again = m.at("argv").get<std::vector<std::string>>();
      if (replay->count("--out")) {
        for (auto it = again.begin(); it != again.end();) {
          if (*it == "--out" && it + 1 != again.end()) {
            it = again.erase(it, it + 2);
          } else if (it->starts_with("--out=")) {
            it = again.erase(it);
          } else {
            ++it;
          }
        }
        again.push_back("--out");
        again.push_back(out_dir);
      }
      return run(again, out, err);
    }

    fs::create_directories(ctx.out_dir);
    if (*est) {
      ctx.subcommand = "estimate";
      return cmd_estimate(ctx, est_input, pf.config(), out);
    }
    if (*bench) {
      ctx.subcommand = "benchmark " + bench_name;
      if (bench_name == "sinusoid") return cmd_benchmark_sinusoid(ctx, pf, sweep, hs, out);
      return cmd_benchmark_sphere(ctx, pf, sweep, frequency, radius, jitter, out);
    }
    if (*rig) {
      ctx.subcommand = "rigidity";
      return cmd_rigidity(ctx, rig_manifest, pf.config(), D, parse_bending_mode(mode_name), out);
    }
    ctx.subcommand = "fit";
    return cmd_fit(ctx, fit_input, random_nodes, beta, grid, box, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace memlme::cli
