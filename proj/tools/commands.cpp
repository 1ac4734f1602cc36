#include "commands.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fraclap/fraclap.hpp"

namespace fraclap::cli {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int maxval_for(int bits) {
  if (bits == 8) return 255;
  if (bits == 16) return 65535;
  throw ArgumentError("--bits must be 8 or 16");
}

Padded load(const std::string& path, bool pad) { return to_grid(read_pgm(path), pad, path); }

void save(const fs::path& path, const PixelGrid& g, const Padded& shape, int bits) {
  write_pgm(path.string(), crop(g, shape.width, shape.height, maxval_for(bits)));
}

PixelGrid shifted(PixelGrid g, double by) {
  for (double& v : g.values()) v += by;
  return g;
}

Box parse_box(const std::vector<double>& v, const Box& fallback) {
  if (v.empty()) return fallback;
  if (v.size() != static_cast<std::size_t>(2 * fallback.dim())) {
    throw ArgumentError("--box expects " + std::to_string(2 * fallback.dim()) + " comma-separated values (lo,hi per axis)");
  }
  Eigen::VectorXd lo(fallback.dim()), hi(fallback.dim());
  for (Eigen::Index i = 0; i < fallback.dim(); ++i) {
    lo[i] = v[static_cast<std::size_t>(2 * i)];
    hi[i] = v[static_cast<std::size_t>(2 * i + 1)];
  }
  return Box(lo, hi);
}

json box_json(const Box& b) {
  json out = json::array();
  for (Eigen::Index i = 0; i < b.dim(); ++i) out.push_back({b.lo[i], b.hi[i]});
  return out;
}

// JSON has no infinity; PSNR of identical images is reported as null.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << std::setprecision(17);
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError(dir.string() + ": cannot create output directory");
}

/// Record of one command run, written next to its outputs.
class Manifest {
 public:
  explicit Manifest(std::string command) : start_(Clock::now()) {
    doc_["command"] = std::move(command);
    doc_["version"] = FRACLAP_VERSION;
    doc_["inputs"] = json::object();
    doc_["parameters"] = json::object();
    doc_["seed"] = nullptr;
    doc_["outputs"] = json::array();
  }

  json& inputs() { return doc_["inputs"]; }
  json& parameters() { return doc_["parameters"]; }
  void seed(std::uint64_t s) { doc_["seed"] = s; }
  void output(const fs::path& p) { doc_["outputs"].push_back(p.filename().string()); }

  /// Manifest for a directory of outputs.
  void write_dir(const fs::path& dir) { finish(dir / "manifest.json"); }
  /// Manifest for a single output file: <stem>.manifest.json beside it.
  void write_beside(const fs::path& file) {
    finish(file.parent_path() / (file.stem().string() + ".manifest.json"));
  }

 private:
  void finish(const fs::path& where) {
    doc_["wall_time"] = seconds_since(start_);
    write_json(where, doc_);
  }

  Clock::time_point start_;
  json doc_;
};

void write_trace(const fs::path& path, const OptimReport& rep, const std::vector<std::string>& names) {
  auto out = open_csv(path);
  out << "iteration";
  for (const auto& n : names) out << ',' << n;
  out << ",value,grad_norm\n";
  for (std::size_t i = 0; i < rep.iterates.size(); ++i) {
    const auto& it = rep.iterates[i];
    out << i;
    for (Eigen::Index k = 0; k < it.params.size(); ++k) out << ',' << it.params[k];
    out << ',' << it.value << ',' << it.grad_norm << '\n';
  }
}

json report_json(const OptimReport& rep) {
  return {{"converged", rep.converged},
          {"iterations", rep.iterations},
          {"evaluations", rep.evaluations},
          {"objective", rep.final_value},
          {"kkt_residual", rep.kkt_residual},
          {"boundary_proximity", rep.boundary_proximity},
          {"message", rep.message}};
}

json quality_json(const PixelGrid& noisy, const PixelGrid& result, const PixelGrid& clean) {
  return {{"psnr_noisy", finite_or_null(psnr(noisy, clean))},
          {"psnr_result", finite_or_null(psnr(result, clean))},
          {"ssim_noisy", ssim(noisy, clean)},
          {"ssim_result", ssim(result, clean)}};
}

// ---------------------------------------------------------------------------
// options shared by the learning commands

struct PairOptions {
  std::string noisy;
  std::string clean;
  std::optional<double> sigma;
  std::uint64_t seed = 42;
  bool pad = false;
};

void add_pair_options(CLI::App* cmd, PairOptions& o) {
  cmd->add_option("--noisy", o.noisy, "noisy PGM image");
  cmd->add_option("--clean", o.clean, "clean reference PGM image")->required();
  cmd->add_option("--sigma", o.sigma, "synthesize the noisy image from --clean with this noise level");
  cmd->add_option("--seed", o.seed, "noise seed")->capture_default_str();
  cmd->add_flag("--pad", o.pad, "reflect-pad non-square or odd images");
}

struct Pair {
  Padded clean;
  PixelGrid noisy;
};

Pair load_pair(const PairOptions& o, Manifest& m) {
  Pair p{load(o.clean, o.pad), PixelGrid()};
  m.inputs()["clean"] = o.clean;
  if (o.sigma) {
    if (!o.noisy.empty()) throw ArgumentError("give either --noisy or --sigma, not both");
    p.noisy = add_gaussian_noise(p.clean.grid, {*o.sigma, o.seed});
    m.parameters()["sigma"] = *o.sigma;
    m.seed(o.seed);
  } else {
    if (o.noisy.empty()) throw ArgumentError("one of --noisy or --sigma is required");
    auto n = load(o.noisy, o.pad);
    if (n.width != p.clean.width || n.height != p.clean.height) {
      throw ArgumentError("noisy and clean images differ in size");
    }
    p.noisy = std::move(n.grid);
    m.inputs()["noisy"] = o.noisy;
  }
  return p;
}

// ---------------------------------------------------------------------------
// commands

struct DenoiseOptions {
  std::string in, out;
  double s = 0.0, alpha = 0.0;
  bool pad = false;
  int bits = 8;
};

void cmd_denoise(const DenoiseOptions& o) {
  Manifest m("denoise");
  m.inputs()["input"] = o.in;
  m.parameters() = {{"s", o.s}, {"alpha", o.alpha}, {"pad", o.pad}, {"bits", o.bits}};
  const auto img = load(o.in, o.pad);
  // fixed-parameter denoising is not limited to the learning box
  const double inf = std::numeric_limits<double>::infinity();
  const Box open(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(inf, inf));
  const auto u = inverse_transform(solve(forward_transform(img.grid, MeanHandling::Remove), {o.s, o.alpha, open}));
  const fs::path out(o.out);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  save(out, u, img, o.bits);
  m.output(out);
  m.write_beside(out);
  std::cout << "wrote " << out.string() << '\n';
}

struct LearnOptions {
  PairOptions pair;
  std::vector<double> box;
  double barrier_scale = 5e-5;
  int max_iter = 200;
  std::string out;
  int bits = 8;
};

void cmd_learn(const LearnOptions& o) {
  Manifest m("learn");
  const Box box = parse_box(o.box, denoise_box());
  m.parameters() = {{"box", box_json(box)}, {"barrier_scale", o.barrier_scale}, {"max_iter", o.max_iter},
                    {"pad", o.pair.pad}, {"bits", o.bits}};
  const auto pair = load_pair(o.pair, m);
  const auto g = forward_transform(pair.noisy, MeanHandling::Remove);
  const auto ud = forward_transform(pair.clean.grid, MeanHandling::Remove);
  SqpConfig cfg;
  cfg.max_iter = o.max_iter;
  const auto rep = learn_denoise(g, ud, BarrierFn::denoise(o.barrier_scale, box), cfg);
  const auto p = DenoiseParams::from(rep.final_params, box);
  const auto u = inverse_transform(solve(g, p));

  const fs::path dir(o.out);
  ensure_dir(dir);
  save(dir / "denoised.pgm", u, pair.clean, o.bits);
  m.output(dir / "denoised.pgm");
  if (o.pair.sigma) {
    save(dir / "noisy.pgm", pair.noisy, pair.clean, o.bits);
    m.output(dir / "noisy.pgm");
  }
  write_trace(dir / "trace.csv", rep, {"s", "alpha"});
  m.output(dir / "trace.csv");
  json params = {{"s", p.s}, {"alpha", p.alpha}};
  params.update(report_json(rep));
  params.update(quality_json(pair.noisy, u, pair.clean.grid));
  write_json(dir / "params.json", params);
  m.output(dir / "params.json");
  m.write_dir(dir);
  std::cout << std::setprecision(6) << "s " << p.s << "\nalpha " << p.alpha << "\nssim " << ssim(u, pair.clean.grid)
            << "\npsnr " << psnr(u, pair.clean.grid) << '\n';
}

struct DecomposeOptions {
  std::string in, out;
  double s1 = 0.25, alpha = 5000.005, s2 = -0.5, beta = 5e4;
  bool pad = false;
  int bits = 8;
};

void write_pair(const fs::path& dir, const PixelGrid& u, const PixelGrid& v, const Padded& shape, int bits,
                Manifest& m) {
  save(dir / "u.pgm", u, shape, bits);
  // v oscillates around zero; shown around mid-gray
  save(dir / "v.pgm", shifted(v, 0.5), shape, bits);
  m.output(dir / "u.pgm");
  m.output(dir / "v.pgm");
}

void cmd_decompose(const DecomposeOptions& o) {
  Manifest m("decompose");
  m.inputs()["input"] = o.in;
  m.parameters() = {{"s1", o.s1}, {"alpha", o.alpha}, {"s2", o.s2}, {"beta", o.beta}, {"pad", o.pad}, {"bits", o.bits}};
  const auto img = load(o.in, o.pad);
  const auto g = forward_transform(img.grid, MeanHandling::Remove);
  const DecompParams p{o.s1, o.alpha, o.s2, o.beta};
  const auto pr = solve_pair(g, p);
  const fs::path dir(o.out);
  ensure_dir(dir);
  write_pair(dir, inverse_transform(pr.u), inverse_transform(pr.v), img, o.bits, m);
  write_json(dir / "params.json", {{"s1", p.s1}, {"alpha", p.alpha}, {"s2", p.s2}, {"beta", p.beta},
                                   {"energy", decomposition_energy(g, pr.u, pr.v, p)}});
  m.output(dir / "params.json");
  m.write_dir(dir);
  std::cout << "wrote " << (dir / "u.pgm").string() << ", " << (dir / "v.pgm").string() << '\n';
}

struct LearnDecomposeOptions {
  PairOptions pair;
  std::vector<double> box;
  double barrier_scale = 3e-7;
  int max_iter = 200;
  std::string out;
  int bits = 8;
};

void cmd_learn_decompose(const LearnDecomposeOptions& o) {
  Manifest m("learn-decompose");
  const Box box = parse_box(o.box, decompose_box());
  m.parameters() = {{"box", box_json(box)}, {"barrier_scale", o.barrier_scale}, {"max_iter", o.max_iter},
                    {"pad", o.pair.pad}, {"bits", o.bits}};
  const auto pair = load_pair(o.pair, m);
  const auto g = forward_transform(pair.noisy, MeanHandling::Remove);
  const auto ud = forward_transform(pair.clean.grid, MeanHandling::Remove);
  SqpConfig cfg;
  cfg.max_iter = o.max_iter;
  const auto rep = bilevel_decompose(g, ud, BarrierFn::decompose(o.barrier_scale, box), cfg);
  const auto p = DecompParams::from(rep.final_params, box);
  const auto pr = solve_pair(g, p);
  const auto u = inverse_transform(pr.u);

  const fs::path dir(o.out);
  ensure_dir(dir);
  write_pair(dir, u, inverse_transform(pr.v), pair.clean, o.bits, m);
  write_trace(dir / "trace.csv", rep, {"s1", "alpha", "s2", "beta"});
  m.output(dir / "trace.csv");
  json params = {{"s1", p.s1}, {"alpha", p.alpha}, {"s2", p.s2}, {"beta", p.beta}};
  params.update(report_json(rep));
  params.update(quality_json(pair.noisy, u, pair.clean.grid));
  write_json(dir / "params.json", params);
  m.output(dir / "params.json");
  m.write_dir(dir);
  std::cout << std::setprecision(6) << "s1 " << p.s1 << "\nalpha " << p.alpha << "\ns2 " << p.s2 << "\nbeta "
            << p.beta << "\nssim " << ssim(u, pair.clean.grid) << '\n';
}

struct SigmaSweepOptions {
  std::string clean, out;
  std::vector<double> sigmas{0.0, 0.01, 0.03, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  std::uint64_t seed = 42;
  std::vector<double> box;
  double barrier_scale = 5e-5;
  bool pad = false;
};

void cmd_sigma_sweep(const SigmaSweepOptions& o) {
  Manifest m("sigma-sweep");
  m.inputs()["clean"] = o.clean;
  const Box box = parse_box(o.box, denoise_box());
  m.parameters() = {{"sigmas", o.sigmas}, {"box", box_json(box)}, {"barrier_scale", o.barrier_scale}, {"pad", o.pad}};
  m.seed(o.seed);
  const auto clean = load(o.clean, o.pad);
  const auto ud = forward_transform(clean.grid, MeanHandling::Remove);
  const fs::path out(o.out);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  auto csv = open_csv(out);
  csv << "sigma,s,alpha,objective,converged,iterations,psnr_noisy,psnr_denoised,ssim_noisy,ssim_denoised\n";
  for (double sigma : o.sigmas) {
    const auto noisy = add_gaussian_noise(clean.grid, {sigma, o.seed});
    const auto g = forward_transform(noisy, MeanHandling::Remove);
    const auto rep = learn_denoise(g, ud, BarrierFn::denoise(o.barrier_scale, box));
    const auto p = DenoiseParams::from(rep.final_params, box);
    const auto u = inverse_transform(solve(g, p));
    csv << sigma << ',' << p.s << ',' << p.alpha << ',' << rep.final_value << ',' << (rep.converged ? 1 : 0) << ','
        << rep.iterations << ',' << psnr(noisy, clean.grid) << ',' << psnr(u, clean.grid) << ','
        << ssim(noisy, clean.grid) << ',' << ssim(u, clean.grid) << '\n';
    std::cout << std::setprecision(6) << "sigma " << sigma << ": s " << p.s << ", alpha " << p.alpha << '\n';
  }
  m.output(out);
  m.write_beside(out);
}

struct BenchOptions {
  std::vector<int> sizes{128, 256, 512};
  std::string out;
  int repeats = 3;
  std::uint64_t seed = 42;
  double s = 0.471, alpha = 45.38;
  double rof_alpha = 0.1;
};

/// Piecewise-smooth test pattern with Gaussian noise, sized n × n.
PixelGrid bench_image(std::size_t n, std::uint64_t seed) {
  PixelGrid g(n);
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double x = h * static_cast<double>(c), y = h * static_cast<double>(r);
      const bool inside = r > n / 4 && r < 3 * n / 4 && c > n / 4 && c < 3 * n / 4;
      g(r, c) = 0.4 + 0.2 * std::sin(x) * std::cos(2.0 * y) + (inside ? 0.25 : 0.0);
    }
  }
  return add_gaussian_noise(g, {0.15, seed});
}

void cmd_bench(const BenchOptions& o) {
  Manifest m("bench");
  m.parameters() = {{"sizes", o.sizes}, {"repeats", o.repeats}, {"s", o.s}, {"alpha", o.alpha},
                    {"rof_alpha", o.rof_alpha}};
  m.seed(o.seed);
  if (o.repeats < 1) throw ArgumentError("--repeats must be >= 1");
  const fs::path out(o.out);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  auto csv = open_csv(out);
  csv << "n,fractional_seconds,rof_seconds,rof_steps,speedup\n";
  for (int n : o.sizes) {
    if (n < 2 || n % 2 != 0) throw ArgumentError("bench sizes must be even and >= 2");
    const auto g = bench_image(static_cast<std::size_t>(n), o.seed);
    double frac = std::numeric_limits<double>::infinity();
    for (int r = 0; r < o.repeats; ++r) {
      const auto t0 = Clock::now();
      const auto u = inverse_transform(solve(forward_transform(g, MeanHandling::Remove), {o.s, o.alpha}));
      frac = std::min(frac, seconds_since(t0));
      if (!u.all_finite()) throw NumericalError("bench: non-finite fractional result");
    }
    FlowConfig cfg;
    cfg.alpha = o.rof_alpha;
    const auto t0 = Clock::now();
    const auto rof = rof_denoise(g, cfg);
    const double rt = seconds_since(t0);
    csv << n << ',' << frac << ',' << rt << ',' << rof.steps << ',' << rt / frac << '\n';
    std::cout << std::setprecision(4) << "n " << n << ": fractional " << frac << " s, rof " << rt << " s ("
              << rof.steps << " steps), speedup " << rt / frac << '\n';
  }
  m.output(out);
  m.write_beside(out);
}

struct RofOptions {
  std::string in, clean, out;
  std::string sweep;
  std::optional<double> alpha;
  double eps = 0.004;
  int max_steps = 5000;
  bool pad = false;
  int bits = 8;
};

std::vector<double> parse_sweep(const std::string& text) {
  if (text == "default") return default_rof_sweep();
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ArgumentError("--sweep: '" + item + "' is not a number");
    }
  }
  return v;
}

void cmd_rof(const RofOptions& o) {
  Manifest m("rof");
  m.inputs()["input"] = o.in;
  m.parameters() = {{"eps", o.eps}, {"max_steps", o.max_steps}, {"pad", o.pad}, {"bits", o.bits}};
  const auto img = load(o.in, o.pad);
  std::optional<Padded> clean;
  if (!o.clean.empty()) {
    clean = load(o.clean, o.pad);
    m.inputs()["clean"] = o.clean;
  }
  FlowConfig cfg;
  cfg.eps = o.eps;
  cfg.max_steps = o.max_steps;
  const fs::path dir(o.out);
  ensure_dir(dir);
  json params;
  PixelGrid u;
  if (!o.sweep.empty()) {
    if (o.alpha) throw ArgumentError("give either --alpha or --sweep, not both");
    if (!clean) throw ArgumentError("--sweep needs --clean to rank the results");
    const auto alphas = parse_sweep(o.sweep);
    m.parameters()["sweep"] = alphas;
    auto res = rof_sweep(img.grid, clean->grid, alphas, cfg);
    auto csv = open_csv(dir / "sweep.csv");
    res.write_csv(csv);
    m.output(dir / "sweep.csv");
    params["alpha"] = res.best_alpha;
    u = std::move(res.best);
  } else {
    if (!o.alpha) throw ArgumentError("one of --alpha or --sweep is required");
    cfg.alpha = *o.alpha;
    m.parameters()["alpha"] = *o.alpha;
    auto res = rof_denoise(img.grid, cfg);
    params = {{"alpha", cfg.alpha}, {"steps", res.steps}, {"converged", res.converged},
              {"energy", res.energies.back()}};
    u = std::move(res.u);
  }
  if (clean) params.update(quality_json(img.grid, u, clean->grid));
  save(dir / "u.pgm", u, img, o.bits);
  m.output(dir / "u.pgm");
  write_json(dir / "params.json", params);
  m.output(dir / "params.json");
  m.write_dir(dir);
  std::cout << std::setprecision(6) << "alpha " << params["alpha"].get<double>() << '\n';
  if (clean) std::cout << "ssim " << ssim(u, clean->grid) << "\npsnr " << psnr(u, clean->grid) << '\n';
}

struct OsvOptions {
  std::string in, clean, out;
  double alpha = 0.0;
  double eps = 0.004;
  int max_steps = 5000;
  bool pad = false;
  int bits = 8;
};

void cmd_osv(const OsvOptions& o) {
  Manifest m("osv");
  m.inputs()["input"] = o.in;
  m.parameters() = {{"alpha", o.alpha}, {"eps", o.eps}, {"max_steps", o.max_steps}, {"pad", o.pad}, {"bits", o.bits}};
  const auto img = load(o.in, o.pad);
  FlowConfig cfg;
  cfg.alpha = o.alpha;
  cfg.eps = o.eps;
  cfg.max_steps = o.max_steps;
  const auto res = osv_decompose(img.grid, cfg);
  const fs::path dir(o.out);
  ensure_dir(dir);
  write_pair(dir, res.flow.u, res.v, img, o.bits, m);
  json params = {{"alpha", o.alpha}, {"steps", res.flow.steps}, {"converged", res.flow.converged},
                 {"energy", res.flow.energies.back()}};
  if (!o.clean.empty()) {
    const auto clean = load(o.clean, o.pad);
    m.inputs()["clean"] = o.clean;
    params.update(quality_json(img.grid, res.flow.u, clean.grid));
    std::cout << std::setprecision(6) << "ssim " << ssim(res.flow.u, clean.grid) << '\n';
  }
  write_json(dir / "params.json", params);
  m.output(dir / "params.json");
  m.write_dir(dir);
}

struct MetricsOptions {
  std::string a, b;
  bool pad = false;
};

void cmd_metrics(const MetricsOptions& o) {
  const auto a = load(o.a, o.pad);
  const auto b = load(o.b, o.pad);
  if (a.width != b.width || a.height != b.height) throw ArgumentError("images differ in size");
  std::cout << std::setprecision(10) << "psnr " << psnr(a.grid, b.grid) << "\nssim " << ssim(a.grid, b.grid) << '\n';
}

}  // namespace

void apply_thread_env() {
  const char* env = std::getenv("FRACLAP_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    std::cerr << "fraclap: ignoring FRACLAP_THREADS='" << env << "' (expected a positive integer)\n";
    return;
  }
  omp_set_num_threads(static_cast<int>(n));
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Fractional Laplacian image denoising and decomposition"};
  app.name("fraclap");
  app.require_subcommand(1);
  app.set_version_flag("--version", FRACLAP_VERSION);

  auto add_bits = [](CLI::App* c, int& bits) {
    c->add_option("--bits", bits, "output bit depth (8 or 16)")->check(CLI::IsMember({8, 16}))->capture_default_str();
  };

  DenoiseOptions dn;
  auto* c_dn = app.add_subcommand("denoise", "denoise with fixed (s, alpha)");
  c_dn->add_option("--in", dn.in, "input PGM")->required();
  c_dn->add_option("--out", dn.out, "output PGM")->required();
  c_dn->add_option("--s", dn.s, "regularisation order s >= 0")->required();
  c_dn->add_option("--alpha", dn.alpha, "fidelity weight alpha > 0")->required();
  c_dn->add_flag("--pad", dn.pad, "reflect-pad non-square or odd images");
  add_bits(c_dn, dn.bits);

  LearnOptions ln;
  auto* c_ln = app.add_subcommand("learn", "learn (s, alpha) from a noisy/clean pair");
  add_pair_options(c_ln, ln.pair);
  c_ln->add_option("--box", ln.box, "lo,hi per axis (default 0,0.5,0,250)")->delimiter(',');
  c_ln->add_option("--barrier-scale", ln.barrier_scale, "barrier weight")->capture_default_str();
  c_ln->add_option("--max-iter", ln.max_iter, "solver iteration cap")->capture_default_str();
  c_ln->add_option("--out", ln.out, "output directory")->required();
  add_bits(c_ln, ln.bits);

  DecomposeOptions dc;
  auto* c_dc = app.add_subcommand("decompose", "structure/texture split with fixed parameters");
  c_dc->add_option("--in", dc.in, "input PGM")->required();
  c_dc->add_option("--s1", dc.s1)->capture_default_str();
  c_dc->add_option("--alpha", dc.alpha)->capture_default_str();
  c_dc->add_option("--s2", dc.s2)->capture_default_str();
  c_dc->add_option("--beta", dc.beta)->capture_default_str();
  c_dc->add_option("--out", dc.out, "output directory")->required();
  c_dc->add_flag("--pad", dc.pad, "reflect-pad non-square or odd images");
  add_bits(c_dc, dc.bits);

  LearnDecomposeOptions ld;
  auto* c_ld = app.add_subcommand("learn-decompose", "learn (s1, alpha, s2, beta) from a noisy/clean pair");
  add_pair_options(c_ld, ld.pair);
  c_ld->add_option("--box", ld.box, "lo,hi per axis (default 0,0.5,0.01,1e4,-1,0,0,1e5)")->delimiter(',');
  c_ld->add_option("--barrier-scale", ld.barrier_scale, "barrier weight")->capture_default_str();
  c_ld->add_option("--max-iter", ld.max_iter, "solver iteration cap")->capture_default_str();
  c_ld->add_option("--out", ld.out, "output directory")->required();
  add_bits(c_ld, ld.bits);

  SigmaSweepOptions ss;
  auto* c_ss = app.add_subcommand("sigma-sweep", "learned (s, alpha) as a function of the noise level");
  c_ss->add_option("--clean", ss.clean, "clean PGM")->required();
  c_ss->add_option("--sigmas", ss.sigmas, "comma-separated noise levels")->delimiter(',');
  c_ss->add_option("--seed", ss.seed, "noise seed")->capture_default_str();
  c_ss->add_option("--box", ss.box, "lo,hi per axis (default 0,0.5,0,250)")->delimiter(',');
  c_ss->add_option("--barrier-scale", ss.barrier_scale, "barrier weight")->capture_default_str();
  c_ss->add_option("--out", ss.out, "output CSV")->required();
  c_ss->add_flag("--pad", ss.pad, "reflect-pad non-square or odd images");

  BenchOptions bn;
  auto* c_bn = app.add_subcommand("bench", "fractional solve vs ROF flow timings");
  c_bn->add_option("--sizes", bn.sizes, "comma-separated image sizes")->delimiter(',');
  c_bn->add_option("--repeats", bn.repeats, "fractional timing repeats (minimum is kept)")->capture_default_str();
  c_bn->add_option("--seed", bn.seed, "noise seed")->capture_default_str();
  c_bn->add_option("--s", bn.s)->capture_default_str();
  c_bn->add_option("--alpha", bn.alpha)->capture_default_str();
  c_bn->add_option("--rof-alpha", bn.rof_alpha)->capture_default_str();
  c_bn->add_option("--out", bn.out, "output CSV")->required();

  RofOptions rf;
  auto* c_rf = app.add_subcommand("rof", "ROF total-variation flow");
  c_rf->add_option("--in", rf.in, "noisy PGM")->required();
  c_rf->add_option("--clean", rf.clean, "clean PGM for ranking and metrics");
  c_rf->add_option("--sweep", rf.sweep, "'default' or a comma-separated alpha list");
  c_rf->add_option("--alpha", rf.alpha, "single TV weight");
  c_rf->add_option("--eps", rf.eps)->capture_default_str();
  c_rf->add_option("--max-steps", rf.max_steps)->capture_default_str();
  c_rf->add_option("--out", rf.out, "output directory")->required();
  c_rf->add_flag("--pad", rf.pad, "reflect-pad non-square or odd images");
  add_bits(c_rf, rf.bits);

  OsvOptions ov;
  auto* c_ov = app.add_subcommand("osv", "TV / H^-1 structure-texture flow");
  c_ov->add_option("--in", ov.in, "input PGM")->required();
  c_ov->add_option("--alpha", ov.alpha, "H^-1 weight")->required();
  c_ov->add_option("--clean", ov.clean, "clean PGM for metrics");
  c_ov->add_option("--eps", ov.eps)->capture_default_str();
  c_ov->add_option("--max-steps", ov.max_steps)->capture_default_str();
  c_ov->add_option("--out", ov.out, "output directory")->required();
  c_ov->add_flag("--pad", ov.pad, "reflect-pad non-square or odd images");
  add_bits(c_ov, ov.bits);

  MetricsOptions mt;
  auto* c_mt = app.add_subcommand("metrics", "PSNR and SSIM of two images");
  c_mt->add_option("a", mt.a, "first PGM")->required();
  c_mt->add_option("b", mt.b, "reference PGM")->required();
  c_mt->add_flag("--pad", mt.pad, "reflect-pad non-square or odd images");

  std::vector<std::string> argv{"fraclap"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<const char*> ptrs;
  for (const auto& a : argv) ptrs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*c_dn) cmd_denoise(dn);
    else if (*c_ln) cmd_learn(ln);
    else if (*c_dc) cmd_decompose(dc);
    else if (*c_ld) cmd_learn_decompose(ld);
    else if (*c_ss) cmd_sigma_sweep(ss);
    else if (*c_bn) cmd_bench(bn);
    else if (*c_rf) cmd_rof(rf);
    else if (*c_ov) cmd_osv(ov);
    else if (*c_mt) cmd_metrics(mt);
  } catch (const fraclap::ArgumentError& e) {
    std::cerr << "fraclap: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fraclap: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace fraclap::cli
