#include "tvmesh/cli.hpp"

#include "tvmesh/energy.hpp"
#include "tvmesh/mesh_io.hpp"
#include "tvmesh/noise.hpp"
#include "tvmesh/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace tvmesh::cli {
namespace {

struct Preset {
  double beta;
  double lambda;
};

const std::map<std::string, Preset>& presets() {
  static const std::map<std::string, Preset> table{
      {"fandisk", {0.01, 0.1}},
      {"bunny-low", {0.003, 0.01}},
      {"bunny-high", {0.01, 0.01}},
  };
  return table;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// `key = value` lines; '#' starts a comment line.
std::vector<std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(lineNo) + ": expected key = value");
    }
    std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key.empty()) throw std::runtime_error("config line " + std::to_string(lineNo) + ": empty key");
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// Splices the config file's settings in front of the explicit flags so the
// latter win under the take-last policy.
std::vector<std::string> expand_config(std::vector<std::string> args,
                                       const std::vector<std::string>& subcommands) {
  std::string configPath;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      configPath = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      configPath = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (configPath.empty()) return args;
  const auto fromFile = read_config_file(configPath);
  const auto sub = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
    return std::find(subcommands.begin(), subcommands.end(), a) != subcommands.end();
  });
  if (sub == args.end()) throw std::runtime_error("--config needs a subcommand");
  args.insert(sub + 1, fromFile.begin(), fromFile.end());
  return args;
}

TriangleMesh load(const std::string& path, const SolverParams& params) {
  return load_mesh(path, params.areaFloor);
}

VertexMask resolve_mask(const RunConfig& config, const TriangleMesh& mesh) {
  if (!config.mask.empty() && config.maskBox) {
    throw std::runtime_error("give either --mask or --mask-from-box, not both");
  }
  if (!config.mask.empty()) {
    const auto indices = read_vertex_indices(config.mask);
    return VertexMask::from_indices(mesh.num_vertices(), indices);
  }
  if (config.maskBox) {
    const auto& b = *config.maskBox;
    return VertexMask::from_box(mesh, Vec3(b[0], b[1], b[2]), Vec3(b[3], b[4], b[5]));
  }
  throw std::runtime_error("this command needs --mask or --mask-from-box");
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw std::runtime_error(std::string("missing required ") + flag);
}

void write_output(const TriangleMesh& mesh, const std::string& path) {
  require(path, "--output");
  // Round-trip through the validating constructor before anything is written.
  const TriangleMesh checked(mesh.vertices(), mesh.triangles(), mesh.area_floor());
  save_mesh(checked, path);
}

void report_solver(std::ostream& out, const SplitBregmanResult& result, const RunConfig& config) {
  out << "iterations=" << result.reports.size() << '\n';
  out << "tv=" << format_double(tv_of_normal(result.mesh)) << '\n';
  if (!result.reports.empty()) {
    const IterationReport& last = result.reports.back();
    out << "lagrangian=" << format_double(last.lagrangian) << '\n';
    out << "max_residual=" << format_double(last.maxResidual) << '\n';
  }
  out << "min_area="
      << format_double(min_triangle_area(result.mesh.vertices(), result.mesh.triangles()).area)
      << '\n';
  if (!config.telemetry.empty()) {
    write_telemetry_csv(config.telemetry, result.reports, effective_config(config));
  }
}

int run_add_noise(const RunConfig& config, std::ostream& out) {
  require(config.input, "--input");
  const TriangleMesh mesh = load(config.input, config.params);
  const TriangleMesh noisy = add_normal_noise(mesh, config.noise);
  write_output(noisy, config.output);
  out << "mean_edge_length=" << format_double(mean_edge_length(mesh)) << '\n';
  out << "sigma=" << format_double(config.noise.sigmaFactor * mean_edge_length(mesh)) << '\n';
  out << "tv_input=" << format_double(tv_of_normal(mesh)) << '\n';
  out << "tv=" << format_double(tv_of_normal(noisy)) << '\n';
  out << "vertex_l2_error=" << format_double(vertex_l2_error(noisy, mesh)) << '\n';
  return 0;
}

int run_denoise(const RunConfig& config, std::ostream& out) {
  require(config.input, "--input");
  require(config.output, "--output");
  config.params.validate();
  const TriangleMesh mesh = load(config.input, config.params);
  std::vector<Vec3> data = mesh.vertices();
  if (!config.data.empty()) {
    const TriangleMesh dataMesh = load(config.data, config.params);
    if (dataMesh.triangles() != mesh.triangles()) {
      throw std::runtime_error("--data mesh must have the same connectivity as --input");
    }
    data = dataMesh.vertices();
  }
  const auto result = split_bregman(mesh, std::span<const Vec3>(data), config.params,
                                    VertexMask::all(mesh.num_vertices()));
  write_output(result.mesh, config.output);
  out << "tv_input=" << format_double(tv_of_normal(mesh)) << '\n';
  report_solver(out, result, config);
  if (!config.reference.empty()) {
    const TriangleMesh reference = load(config.reference, config.params);
    out << "mean_angular_error_input=" << format_double(mean_angular_error(mesh, reference))
        << '\n';
    out << "mean_angular_error=" << format_double(mean_angular_error(result.mesh, reference))
        << '\n';
    out << "vertex_l2_error=" << format_double(vertex_l2_error(result.mesh, reference)) << '\n';
  }
  return 0;
}

int run_inpaint(const RunConfig& config, std::ostream& out) {
  require(config.input, "--input");
  require(config.output, "--output");
  if (!config.data.empty()) {
    throw std::runtime_error("--data is not valid for inpaint: the inpainting functional has no "
                             "fidelity term");
  }
  config.params.validate();
  const TriangleMesh mesh = load(config.input, config.params);
  const VertexMask mask = resolve_mask(config, mesh);
  TriangleMesh start = config.harmonicFill ? harmonic_fill(mesh, mask) : mesh;
  if (!config.skipInit) {
    start = minimal_surface_init(start, mask, config.initStep, config.initIters,
                                 config.params.areaFloor);
  }
  const auto result = split_bregman(start, std::nullopt, config.params, mask);
  write_output(result.mesh, config.output);
  out << "free_vertices=" << mask.num_free() << '\n';
  out << "tv_input=" << format_double(tv_of_normal(mesh)) << '\n';
  out << "tv_start=" << format_double(tv_of_normal(start)) << '\n';
  report_solver(out, result, config);
  if (!config.reference.empty()) {
    const TriangleMesh reference = load(config.reference, config.params);
    out << "vertex_l2_error=" << format_double(vertex_l2_error(result.mesh, reference)) << '\n';
  }
  return 0;
}

int run_tv(const RunConfig& config, std::ostream& out) {
  require(config.input, "--input");
  const TriangleMesh mesh = load(config.input, config.params);
  out << "tv=" << format_double(tv_of_normal(mesh)) << '\n';
  out << "vertices=" << mesh.num_vertices() << '\n';
  out << "triangles=" << mesh.num_triangles() << '\n';
  out << "edges=" << mesh.topology().edges.size() << '\n';
  out << "interior_edges=" << mesh.topology().interior.size() << '\n';
  out << "mean_edge_length=" << format_double(mean_edge_length(mesh)) << '\n';
  return 0;
}

int run_min_surface(const RunConfig& config, std::ostream& out) {
  require(config.input, "--input");
  const TriangleMesh mesh = load(config.input, config.params);
  const VertexMask mask = resolve_mask(config, mesh);
  const TriangleMesh start = config.harmonicFill ? harmonic_fill(mesh, mask) : mesh;
  const TriangleMesh result =
      minimal_surface_init(start, mask, config.initStep, config.initIters, config.params.areaFloor);
  write_output(result, config.output);
  out << "free_vertices=" << mask.num_free() << '\n';
  out << "area_input=" << format_double(total_area(mesh)) << '\n';
  out << "area=" << format_double(total_area(result)) << '\n';
  out << "tv=" << format_double(tv_of_normal(result)) << '\n';
  return 0;
}

int run_metrics(const RunConfig& config, std::ostream& out) {
  require(config.input, "--input");
  require(config.reference, "--reference");
  const TriangleMesh mesh = load(config.input, config.params);
  const TriangleMesh reference = load(config.reference, config.params);
  out << "mean_angular_error=" << format_double(mean_angular_error(mesh, reference)) << '\n';
  out << "vertex_l2_error=" << format_double(vertex_l2_error(mesh, reference)) << '\n';
  out << "tv=" << format_double(tv_of_normal(mesh)) << '\n';
  out << "tv_reference=" << format_double(tv_of_normal(reference)) << '\n';
  return 0;
}

}  // namespace

std::string command_name(Command c) {
  switch (c) {
    case Command::AddNoise: return "add-noise";
    case Command::Denoise: return "denoise";
    case Command::Inpaint: return "inpaint";
    case Command::Tv: return "tv";
    case Command::MinSurface: return "min-surface";
    case Command::Metrics: return "metrics";
  }
  return "?";
}

std::vector<std::pair<std::string, std::string>> effective_config(const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("command", command_name(config.command));
  auto add_path = [&](const char* key, const std::string& v) {
    if (!v.empty()) kv.emplace_back(key, v);
  };
  add_path("input", config.input);
  add_path("output", config.output);
  add_path("reference", config.reference);
  add_path("data", config.data);
  add_path("mask", config.mask);
  add_path("telemetry", config.telemetry);
  add_path("preset", config.preset);
  if (config.maskBox) {
    std::string box;
    for (std::size_t i = 0; i < 6; ++i) box += (i ? "," : "") + format_double((*config.maskBox)[i]);
    kv.emplace_back("mask-from-box", box);
  }
  const SolverParams& p = config.params;
  switch (config.command) {
    case Command::Denoise:
    case Command::Inpaint:
      kv.emplace_back("beta", format_double(p.beta));
      kv.emplace_back("lambda", format_double(p.lambda));
      kv.emplace_back("step", format_double(p.stepLength));
      kv.emplace_back("grad-steps", std::to_string(p.gradStepsPerOuter));
      kv.emplace_back("outer", std::to_string(p.outerIters));
      kv.emplace_back("early-stop", p.earlyStop ? "true" : "false");
      kv.emplace_back("residual-tol", format_double(p.residualTol));
      kv.emplace_back("change-tol", format_double(p.changeTol));
      if (config.command == Command::Inpaint) {
        kv.emplace_back("skip-init", config.skipInit ? "true" : "false");
        kv.emplace_back("harmonic-fill", config.harmonicFill ? "true" : "false");
        kv.emplace_back("init-step", format_double(config.initStep));
        kv.emplace_back("init-iters", std::to_string(config.initIters));
      }
      break;
    case Command::MinSurface:
      kv.emplace_back("harmonic-fill", config.harmonicFill ? "true" : "false");
      kv.emplace_back("init-step", format_double(config.initStep));
      kv.emplace_back("init-iters", std::to_string(config.initIters));
      break;
    case Command::AddNoise:
      kv.emplace_back("sigma-factor", format_double(config.noise.sigmaFactor));
      kv.emplace_back("seed", std::to_string(config.noise.seed));
      break;
    case Command::Tv:
    case Command::Metrics:
      break;
  }
  kv.emplace_back("area-floor", format_double(p.areaFloor));
  return kv;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    out << std::setprecision(17);
    switch (config.command) {
      case Command::AddNoise: return run_add_noise(config, out);
      case Command::Denoise: return run_denoise(config, out);
      case Command::Inpaint: return run_inpaint(config, out);
      case Command::Tv: return run_tv(config, out);
      case Command::MinSurface: return run_min_surface(config, out);
      case Command::Metrics: return run_metrics(config, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Total-variation-of-the-normal mesh denoising and inpainting"};
  app.name("tvmesh");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<double> box;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", "key = value settings file; explicit flags take precedence");
    sub->add_option("--area-floor", config.params.areaFloor, "Degenerate-triangle area threshold")
        ->capture_default_str();
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--beta", config.params.beta, "TV weight")->capture_default_str();
    sub->add_option("--lambda", config.params.lambda, "Penalty weight")->capture_default_str();
    sub->add_option("--step", config.params.stepLength, "Gradient step length")
        ->capture_default_str();
    sub->add_option("--grad-steps", config.params.gradStepsPerOuter,
                    "Gradient steps per outer iteration")
        ->capture_default_str();
    sub->add_option("--outer", config.params.outerIters, "Outer iterations")->capture_default_str();
    sub->add_flag("--early-stop", config.params.earlyStop,
                  "Stop once the constraint residual and vertex motion settle");
    sub->add_option("--residual-tol", config.params.residualTol)->capture_default_str();
    sub->add_option("--change-tol", config.params.changeTol)->capture_default_str();
    sub->add_option("--telemetry", config.telemetry, "CSV file for per-iteration telemetry");
    sub->add_option("--preset", config.preset, "Parameter preset")
        ->check(CLI::IsMember({"fandisk", "bunny-low", "bunny-high"}));
  };
  auto add_mask = [&](CLI::App* sub) {
    sub->add_option("--mask", config.mask, "File of free vertex indices");
    sub->add_option("--mask-from-box", box, "Free vertices inside xmin,ymin,zmin,xmax,ymax,zmax")
        ->delimiter(',')
        ->expected(6);
    sub->add_flag("--harmonic-fill", config.harmonicFill,
                  "Discard the free vertex positions and start from a harmonic fill");
    sub->add_option("--init-step", config.initStep, "Minimal-surface step length")
        ->capture_default_str();
    sub->add_option("--init-iters", config.initIters, "Minimal-surface iterations")
        ->capture_default_str();
  };

  auto* addNoise = app.add_subcommand("add-noise", "Displace vertices along their normals");
  addNoise->add_option("--input,-i", config.input)->required();
  addNoise->add_option("--output,-o", config.output)->required();
  addNoise->add_option("--sigma-factor", config.noise.sigmaFactor,
                       "Standard deviation in mean edge lengths")
      ->capture_default_str();
  addNoise->add_option("--seed", config.noise.seed)->capture_default_str();
  add_common(addNoise);

  auto* denoise = app.add_subcommand("denoise", "Split Bregman denoising");
  denoise->add_option("--input,-i", config.input, "Initial mesh (also the data by default)")
      ->required();
  denoise->add_option("--output,-o", config.output)->required();
  denoise->add_option("--data", config.data, "Data mesh for the fidelity term");
  denoise->add_option("--reference", config.reference, "Ground truth for error metrics");
  add_solver(denoise);
  add_common(denoise);

  auto* inpaint = app.add_subcommand("inpaint", "Split Bregman inpainting of masked vertices");
  inpaint->add_option("--input,-i", config.input)->required();
  inpaint->add_option("--output,-o", config.output)->required();
  inpaint->add_option("--data", config.data, "Rejected: inpainting has no data term");
  inpaint->add_option("--reference", config.reference, "Ground truth for error metrics");
  inpaint->add_flag("--skip-init", config.skipInit, "Use the input patch as the initial guess");
  add_solver(inpaint);
  add_mask(inpaint);
  add_common(inpaint);

  auto* tv = app.add_subcommand("tv", "Print the total variation of the normal");
  tv->add_option("--input,-i", config.input)->required();
  add_common(tv);

  auto* minSurface = app.add_subcommand("min-surface", "Minimal-area fill of masked vertices");
  minSurface->add_option("--input,-i", config.input)->required();
  minSurface->add_option("--output,-o", config.output)->required();
  add_mask(minSurface);
  add_common(minSurface);

  auto* metrics = app.add_subcommand("metrics", "Compare a mesh against a reference");
  metrics->add_option("--input,-i", config.input)->required();
  metrics->add_option("--reference", config.reference)->required();
  add_common(metrics);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args), {"add-noise", "denoise", "inpaint", "tv", "min-surface",
                                           "metrics"});
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  const std::pair<CLI::App*, Command> commands[] = {
      {addNoise, Command::AddNoise}, {denoise, Command::Denoise},
      {inpaint, Command::Inpaint},   {tv, Command::Tv},
      {minSurface, Command::MinSurface}, {metrics, Command::Metrics},
  };
  for (const auto& [sub, cmd] : commands) {
    if (sub->parsed()) config.command = cmd;
  }
  if (!box.empty()) {
    std::array<double, 6> b{};
    std::copy(box.begin(), box.end(), b.begin());
    config.maskBox = b;
  }
  if (!config.preset.empty()) {
    const Preset& p = presets().at(config.preset);
    CLI::App* sub = config.command == Command::Denoise ? denoise : inpaint;
    if (sub->get_option("--beta")->count() == 0) config.params.beta = p.beta;
    if (sub->get_option("--lambda")->count() == 0) config.params.lambda = p.lambda;
  }
  return run(config, out, err);
}

}  // namespace tvmesh::cli
