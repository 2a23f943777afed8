// polclust: generate datasets, cluster them, scan cost landscapes, and serve a
// simulated optical bench over TCP.

#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "polclust/datasets.hpp"
#include "polclust/errors.hpp"
#include "polclust/hardware.hpp"
#include "polclust/landscape.hpp"
#include "polclust/optimizer.hpp"
#include "polclust/protocol.hpp"
#include "polclust/report.hpp"

using namespace polclust;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

// Bad input file or unreachable device: exit 1 rather than 2.
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flag given on the command line wins; then the config file; then the default
// already in `var`.
template <class T>
void layer(const CLI::Option* opt, const json& cfg, const char* key, T& var) {
  if (opt->count() > 0 || !cfg.contains(key)) return;
  try {
    var = cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config key '") + key + "': " + e.what());
  }
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open config " + path);
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config " + path + ": " + e.what());
  }
}

Dataset read_dataset(const std::string& path) {
  try {
    return load_dataset(path);
  } catch (const ParseError& e) {
    throw IoFailure(path + ": " + e.what());
  } catch (const UnsupportedDimension& e) {
    throw IoFailure(path + ": " + e.what());
  } catch (const InvalidArgument&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw IoFailure(e.what());
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create " + dir + ": " + ec.message());
}

void write_file(const fs::path& path, const std::string& text) {
  try {
    write_text(path.string(), text);
  } catch (const std::exception& e) {
    throw IoFailure(e.what());
  }
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("bad number in ") + what + ": '" + cell + "'");
    }
  }
  return out;
}

// Problem and optimizer flags shared by cluster and landscape.
struct ProblemFlags {
  std::string data;
  std::string config;
  int k = 2;
  double lambda = 1.0;
  std::size_t m = 2;
  double margin = 0.05;
  bool exclude_diagonal = false;
  std::string embed = "analytic";
  double lut_resolution = 0.005;
  OptimizerConfig opt;
  double mc_temperature = 0.0;
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app) {
    opts["data"] = app->add_option("--data", data, "Dataset CSV (x,y[,label])");
    opts["config"] = app->add_option("--config", config, "JSON config; flags override it");
    opts["k"] = app->add_option("--k", k, "Number of clusters (1-6)");
    opts["lambda"] = app->add_option("--lambda", lambda, "Centroid-distance weight");
    opts["m"] = app->add_option("--m", m, "Variational layers");
    opts["margin"] = app->add_option("--margin", margin, "Embedding margin fraction");
    opts["exclude_diagonal"] = app->add_flag("--exclude-diagonal", exclude_diagonal, "Drop i == j terms");
    opts["embed"] = app->add_option("--embed", embed, "analytic or lut")->check(CLI::IsMember({"analytic", "lut"}));
    opts["lut_resolution"] = app->add_option("--lut-resolution", lut_resolution, "LUT grid step, radians");
    opts["restarts"] = app->add_option("--restarts", opt.n_restarts, "Random restarts");
    opts["mc_samples"] = app->add_option("--mc-samples", opt.mc_samples, "Monte-Carlo proposals per restart");
    opts["mc_step"] = app->add_option("--mc-step", opt.mc_step, "Proposal std-dev, radians");
    opts["mc_temperature"] = app->add_option("--mc-temperature", mc_temperature, "Metropolis temperature (default adaptive)");
    opts["lr"] = app->add_option("--lr", opt.lr, "Descent step");
    opts["fd_eps"] = app->add_option("--fd-eps", opt.fd_eps, "Finite-difference step, radians");
    opts["max_iters"] = app->add_option("--max-iters", opt.max_iters, "Descent iteration cap");
    opts["rel_tol"] = app->add_option("--rel-tol", opt.rel_tol, "Relative improvement threshold");
    opts["patience"] = app->add_option("--patience", opt.patience, "Calm iterations before stopping");
    opts["seed"] = app->add_option("--seed", opt.seed, "RNG seed");
  }

  void apply(const json& cfg) {
    layer(opts["data"], cfg, "data", data);
    layer(opts["k"], cfg, "k", k);
    layer(opts["lambda"], cfg, "lambda", lambda);
    layer(opts["m"], cfg, "m", m);
    layer(opts["margin"], cfg, "margin", margin);
    layer(opts["exclude_diagonal"], cfg, "exclude_diagonal", exclude_diagonal);
    layer(opts["embed"], cfg, "embed", embed);
    layer(opts["lut_resolution"], cfg, "lut_resolution", lut_resolution);
    layer(opts["restarts"], cfg, "restarts", opt.n_restarts);
    layer(opts["mc_samples"], cfg, "mc_samples", opt.mc_samples);
    layer(opts["mc_step"], cfg, "mc_step", opt.mc_step);
    layer(opts["mc_temperature"], cfg, "mc_temperature", mc_temperature);
    layer(opts["lr"], cfg, "lr", opt.lr);
    layer(opts["fd_eps"], cfg, "fd_eps", opt.fd_eps);
    layer(opts["max_iters"], cfg, "max_iters", opt.max_iters);
    layer(opts["rel_tol"], cfg, "rel_tol", opt.rel_tol);
    layer(opts["patience"], cfg, "patience", opt.patience);
    layer(opts["seed"], cfg, "seed", opt.seed);
    if (opts["mc_temperature"]->count() > 0 || cfg.contains("mc_temperature")) opt.mc_temperature = mc_temperature;
    if (data.empty()) throw InvalidArgument("--data is required");
    opt.validate();
  }

  ProblemOptions problem_options() const {
    ProblemOptions o;
    o.k = k;
    o.lambda = lambda;
    o.layers = m;
    o.margin = margin;
    o.exclude_diagonal = exclude_diagonal;
    o.mode = embed == "lut" ? EmbedMode::lut : EmbedMode::analytic;
    return o;
  }
};

struct DeviceFlags {
  std::string device = "ideal";
  std::string remote;
  DeviceConfig cfg;
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app, bool with_choice) {
    if (with_choice) {
      opts["device"] = app->add_option("--device", device, "ideal, noisy or remote")
                           ->check(CLI::IsMember({"ideal", "noisy", "remote"}));
      opts["remote"] = app->add_option("--remote", remote, "host:port of a serve-device instance");
    }
    opts["stokes_sigma"] = app->add_option("--stokes-sigma", cfg.stokes_noise_sigma, "Polarimeter noise std-dev");
    opts["angle_quantum"] = app->add_option("--angle-quantum", cfg.angle_quantum, "Stage step, degrees");
    opts["max_speed"] = app->add_option("--max-speed", cfg.max_speed, "Stage speed, degrees per second");
    opts["hwp_error"] = app->add_option("--hwp-error", cfg.hwp_retardance_error, "HWP retardance error, radians");
    opts["qwp_error"] = app->add_option("--qwp-error", cfg.qwp_retardance_error, "QWP retardance error, radians");
    opts["device_seed"] = app->add_option("--device-seed", cfg.seed, "Noise RNG seed");
  }

  void apply(const json& cfg_json) {
    if (opts.count("device")) {
      layer(opts["device"], cfg_json, "device", device);
      layer(opts["remote"], cfg_json, "remote", remote);
    }
    layer(opts["stokes_sigma"], cfg_json, "stokes_sigma", cfg.stokes_noise_sigma);
    layer(opts["angle_quantum"], cfg_json, "angle_quantum", cfg.angle_quantum);
    layer(opts["max_speed"], cfg_json, "max_speed", cfg.max_speed);
    layer(opts["hwp_error"], cfg_json, "hwp_error", cfg.hwp_retardance_error);
    layer(opts["qwp_error"], cfg_json, "qwp_error", cfg.qwp_retardance_error);
    layer(opts["device_seed"], cfg_json, "device_seed", cfg.seed);
    cfg.validate();
    if (device == "remote" && remote.empty()) throw InvalidArgument("--device remote needs --remote host:port");
  }
};

// ---- gen ----

struct GenArgs {
  BlobSpec spec;
  std::string layout = "ring";
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  BlobSpec spec = a.spec;
  spec.layout = a.layout == "grid" ? BlobLayout::grid : BlobLayout::ring;
  const Dataset ds = gaussian_blobs(spec);
  try {
    save_dataset(ds, a.out);
  } catch (const std::exception& e) {
    throw IoFailure(e.what());
  }
  write_file(a.out + ".meta.json", blob_metadata_json(spec) + "\n");
  std::printf("wrote %zu points (%d blobs, d/sigma %g) to %s\n", ds.size(), spec.k, spec.d_over_sigma,
              a.out.c_str());
  return 0;
}

// ---- cluster ----

struct ClusterArgs {
  ProblemFlags problem;
  DeviceFlags device;
  bool normalize_cost = false;
  std::string out = "results";
  CLI::Option* normalize_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

int cmd_cluster(ClusterArgs& a) {
  const json cfg = read_config(a.problem.config);
  a.problem.apply(cfg);
  a.device.apply(cfg);
  layer(a.normalize_opt, cfg, "normalize_cost", a.normalize_cost);
  layer(a.out_opt, cfg, "out", a.out);

  Dataset ds = read_dataset(a.problem.data);
  const auto opts = a.problem.problem_options();
  std::optional<LookUpTable> lut;
  if (opts.mode == EmbedMode::lut) lut = build_lut(a.problem.lut_resolution);
  const ClusterProblem problem(std::move(ds), opts, lut ? &*lut : nullptr);
  if (problem.clamped_count() > 0)
    std::fprintf(stderr, "warning: %zu points fell outside the embedding window\n", problem.clamped_count());

  const std::size_t plates = 2 + 2 * problem.layers();
  RunResult result;
  if (a.device.device == "ideal") {
    result = optimize(problem, a.problem.opt);
  } else if (a.device.device == "noisy") {
    SimulatedDevice dev(plates, a.device.cfg);
    result = optimize(problem, a.problem.opt, device_backend(problem, dev, a.device.cfg.angle_quantum));
  } else {
    const auto [host, port] = parse_endpoint(a.device.remote);
    std::unique_ptr<RemoteDevice> dev;
    try {
      dev = std::make_unique<RemoteDevice>(host, port);
    } catch (const std::exception& e) {
      throw IoFailure(e.what());
    }
    if (dev->plate_count() != plates)
      throw InvalidArgument("remote device has " + std::to_string(dev->plate_count()) + " plates, need " +
                            std::to_string(plates));
    const double quantum = dev->info().angle_quantum;
    try {
      result = optimize(problem, a.problem.opt, device_backend(problem, *dev, quantum));
    } catch (const ConnectionError& e) {
      throw IoFailure(e.what());
    } catch (const TimeoutError& e) {
      throw IoFailure(e.what());
    }
  }

  ensure_dir(a.out);
  const fs::path dir(a.out);
  write_file(dir / "assignments.json", diagnostics_json(problem, result) + "\n");
  write_file(dir / "trace.csv", trace_csv(result));
  write_file(dir / "clusters.svg",
             clusters_svg(problem.dataset(), result.report.assignment, result.report.centroids));
  write_file(dir / "cost.svg", cost_evolution_svg(restart_cost_series(result), a.normalize_cost));
  write_file(dir / "params.json", result.best_params.to_json() + "\n");

  std::printf("cost %.6g (restart %zu of %zu)\n", result.report.value, result.best_restart,
              result.restarts.size());
  if (result.success) std::printf("success ratio %.4f\n", *result.success);
  std::printf("outputs in %s\n", a.out.c_str());
  return 0;
}

// ---- landscape ----

struct LandscapeArgs {
  ProblemFlags problem;
  std::string axes = "0,1";
  std::size_t resolution = 100;
  std::string u_range;
  std::string v_range;
  std::string base;
  std::size_t overlay = 0;
  std::string out = "landscape";
  std::map<std::string, CLI::Option*> opts;
};

int cmd_landscape(LandscapeArgs& a) {
  const json cfg = read_config(a.problem.config);
  a.problem.apply(cfg);
  layer(a.opts["axes"], cfg, "axes", a.axes);
  layer(a.opts["resolution"], cfg, "resolution", a.resolution);
  layer(a.opts["u_range"], cfg, "u_range", a.u_range);
  layer(a.opts["v_range"], cfg, "v_range", a.v_range);
  layer(a.opts["base"], cfg, "base", a.base);
  layer(a.opts["overlay"], cfg, "overlay", a.overlay);
  layer(a.opts["out"], cfg, "out", a.out);

  Dataset ds = read_dataset(a.problem.data);
  const auto popts = a.problem.problem_options();
  std::optional<LookUpTable> lut;
  if (popts.mode == EmbedMode::lut) lut = build_lut(a.problem.lut_resolution);
  const ClusterProblem problem(std::move(ds), popts, lut ? &*lut : nullptr);

  ScanSpec spec;
  const auto ax = parse_list(a.axes, "--axes");
  if (ax.size() != 2 || ax[0] < 0 || ax[1] < 0 || ax[0] != std::floor(ax[0]) || ax[1] != std::floor(ax[1]))
    throw InvalidArgument("--axes needs two non-negative integers");
  spec.axes = {static_cast<std::size_t>(ax[0]), static_cast<std::size_t>(ax[1])};
  if (spec.axes[0] >= 2 * problem.layers() || spec.axes[1] >= 2 * problem.layers())
    throw InvalidArgument("axis beyond the " + std::to_string(2 * problem.layers()) + " circuit angles");
  spec.resolution = a.resolution;
  for (int r = 0; r < 2; ++r) {
    const std::string& text = r == 0 ? a.u_range : a.v_range;
    if (text.empty()) continue;
    const auto lohi = parse_list(text, r == 0 ? "--u-range" : "--v-range");
    if (lohi.size() != 2) throw InvalidArgument("ranges look like lo,hi");
    spec.ranges[r] = {lohi[0], lohi[1]};
  }
  if (!a.base.empty()) {
    spec.base = CircuitParams::from_vector(parse_list(a.base, "--base"));
    if (spec.base.layer_count() != problem.layers())
      throw InvalidArgument("--base needs " + std::to_string(2 * problem.layers()) + " angles");
  } else {
    spec.base = optimize(problem, a.problem.opt).best_params;
  }

  ScanResult result = scan(spec, problem);

  // Overlay paths optimize the two scanned angles with the rest held at base.
  if (a.overlay > 0) {
    const auto base = spec.base.to_vector();
    Objective obj{[&](std::span<const double> t) {
                    auto full = base;
                    full[spec.axes[0]] = t[0];
                    full[spec.axes[1]] = t[1];
                    return cost_value(problem, CircuitParams::from_vector(full));
                  },
                  problem.cost_scale()};
    for (std::size_t i = 0; i < a.overlay; ++i) {
      const auto r = run_restart(obj, 2, a.problem.opt, i);
      result = overlay_trajectory(std::move(result), r.trace, {0, 1});
    }
  }

  ensure_dir(a.out);
  const fs::path dir(a.out);
  write_file(dir / "landscape.csv", scan_csv(result));
  write_file(dir / "landscape.json", scan_sidecar_json(spec, result) + "\n");
  write_file(dir / "landscape.svg", heatmap_svg(result));

  const auto minima = find_local_minima(result);
  std::printf("%zux%zu scan over angles %zu,%zu: cost %.6g .. %.6g, %zu local minima\n", result.rows(),
              result.cols(), spec.axes[0], spec.axes[1], *std::min_element(result.cost.begin(), result.cost.end()),
              *std::max_element(result.cost.begin(), result.cost.end()), minima.size());
  std::printf("outputs in %s\n", a.out.c_str());
  return 0;
}

// ---- serve-device ----

struct ServeArgs {
  std::string endpoint = "127.0.0.1:5555";
  std::size_t plates = 6;
  DeviceFlags device;
  bool quiet = false;
};

int cmd_serve(ServeArgs& a) {
  a.device.apply(json::object());
  const auto [host, port] = parse_endpoint(a.endpoint);
  if (a.plates == 0 || a.plates % 2 != 0) throw InvalidArgument("--plates must be even and positive");

  // Block the signals before any thread starts so sigwait sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  SimulatedDevice dev(a.plates, a.device.cfg);
  std::unique_ptr<DeviceServer> server;
  try {
    server = std::make_unique<DeviceServer>(dev, host, port);
  } catch (const ConnectionError& e) {
    throw IoFailure(e.what());
  }
  if (!a.quiet) server->set_logger([](const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); });
  server->start();
  std::printf("listening on %s:%u (%zu plates)\n", host.c_str(), server->port(), a.plates);
  std::fflush(stdout);

  int sig = 0;
  sigwait(&set, &sig);
  server->stop();
  std::printf("stopped on signal %d\n", sig);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization-based variational clustering"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate Gaussian blobs as CSV");
  gen_cmd->add_option("--k", gen.spec.k, "Number of blobs");
  gen_cmd->add_option("--n", gen.spec.n_per_blob, "Points per blob");
  gen_cmd->add_option("--d-over-sigma", gen.spec.d_over_sigma, "Neighbour center distance over sigma");
  gen_cmd->add_option("--sigma", gen.spec.sigma, "Blob standard deviation");
  gen_cmd->add_option("--layout", gen.layout, "ring or grid")->check(CLI::IsMember({"ring", "grid"}));
  gen_cmd->add_option("--seed", gen.spec.seed, "RNG seed");
  gen_cmd->add_option("-o,--out", gen.out, "Output CSV")->required();

  ClusterArgs cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "Optimize the circuit and label the dataset");
  cluster.problem.add(cluster_cmd);
  cluster.device.add(cluster_cmd, true);
  cluster.normalize_opt = cluster_cmd->add_flag("--normalize-cost", cluster.normalize_cost,
                                                "Scale the cost plot onto [0, 1]");
  cluster.out_opt = cluster_cmd->add_option("-o,--out", cluster.out, "Output directory");

  LandscapeArgs land;
  auto* land_cmd = app.add_subcommand("landscape", "Scan the cost over two circuit angles");
  land.problem.add(land_cmd);
  land.opts["axes"] = land_cmd->add_option("--axes", land.axes, "Two angle indices, e.g. 0,1");
  land.opts["resolution"] = land_cmd->add_option("--resolution", land.resolution, "Grid nodes per axis");
  land.opts["u_range"] = land_cmd->add_option("--u-range", land.u_range, "lo,hi for the first axis");
  land.opts["v_range"] = land_cmd->add_option("--v-range", land.v_range, "lo,hi for the second axis");
  land.opts["base"] = land_cmd->add_option("--base", land.base, "Comma-separated angles (default: optimize)");
  land.opts["overlay"] = land_cmd->add_option("--overlay", land.overlay, "Optimization paths to overlay");
  land.opts["out"] = land_cmd->add_option("-o,--out", land.out, "Output directory");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve-device", "Serve a simulated bench over TCP");
  serve_cmd->add_option("--endpoint", serve.endpoint, "host:port to bind");
  serve_cmd->add_option("--plates", serve.plates, "Plate count (2 + 2m)");
  serve_cmd->add_flag("--quiet", serve.quiet, "Do not log requests");
  serve.device.add(serve_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*cluster_cmd) return cmd_cluster(cluster);
    if (*land_cmd) return cmd_landscape(land);
    if (*serve_cmd) return cmd_serve(serve);
  } catch (const IoFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  return kExitUsage;
}
