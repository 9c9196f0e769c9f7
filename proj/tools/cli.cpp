#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "svg.hpp"
#include "torus/certificates.hpp"
#include "torus/configuration.hpp"
#include "torus/spectral.hpp"
#include "torus/verify.hpp"
#include "torus/version.hpp"

namespace torus::cli {
namespace {

bool two_dimensional(const RunConfig& c) {
  if (c.command == "verify-2d") return true;
  if (c.lattice == "triangular") return true;
  return c.L.has_value() && !c.N.has_value();
}

int require(const std::optional<int>& v, const char* flag, const std::string& command) {
  if (!v) throw UsageError(command + " requires " + flag);
  return *v;
}

Configuration build_lattice(const RunConfig& c, const Cell& cell) {
  std::string kind = c.lattice;
  if (kind == "auto") {
    if (c.L) {
      kind = "triangular";
    } else if (c.K) {
      kind = "square";
    } else if (c.N) {
      kind = "equidistant";
    } else {
      throw UsageError(c.command + " requires --N, --L or --K");
    }
  }
  if (kind == "triangular") return triangular_lattice(require(c.L, "--L", c.command));
  if (kind == "square") return square_lattice(require(c.K, "--K", c.command), cell);
  if (kind == "equidistant") return equidistant_1d(require(c.N, "--N", c.command));
  if (kind == "random") {
    if (c.L) {
      const int L = *c.L;
      if (L < 3 || L % 3 != 0) throw std::invalid_argument("L must be divisible by 3");
      return random_configuration(static_cast<std::size_t>(2 * L * L), Cell::triangular(), c.minimize.seed, L);
    }
    return random_configuration(static_cast<std::size_t>(require(c.N, "--N", c.command)), cell, c.minimize.seed);
  }
  throw UsageError("unknown lattice '" + kind + "'");
}

std::optional<Configuration> reference_for(const RunConfig& c, int dim) {
  if (dim == 1 && c.N) return equidistant_1d(*c.N);
  if (dim == 2 && c.L && *c.L >= 3 && *c.L % 3 == 0) return triangular_lattice(*c.L);
  return std::nullopt;
}

// Accepts a bare configuration or any torus-energy document that carries one.
Configuration load_configuration(const std::string& path) {
  const Json j = Json::parse(read_text_file(path));
  if (j.is_object() && j.contains("result")) {
    const Json& r = j["result"];
    if (r.contains("configuration")) return configuration_from_json(r["configuration"]);
    if (r.contains("minimization")) return configuration_from_json(r["minimization"]["best"]);
    throw UsageError(path + " holds no configuration");
  }
  return configuration_from_json(j);
}

Json kernel_table_json(const FourierKernel& kernel) {
  Json rows = Json::array();
  for (const Mode& n : kernel.modes()) {
    Json row = Json::array({n[0]});
    if (kernel.dim() == 2) row.push_back(n[1]);
    row.push_back(kernel.coefficient(n));
    rows.push_back(row);
  }
  return rows;
}

struct Artifacts {
  Json result;
  std::string csv;
  std::string svg;
  bool failed = false;
};

Artifacts run_command(const RunConfig& c) {
  Artifacts a;
  const FourierKernel kernel = make_kernel(c.kernel);
  if (c.command == "kernel-table") {
    a.result["mode_cap"] = kernel.mode_cap();
    a.result["tail_bound"] = number(kernel.tail_bound());
    a.result["value_at_origin"] = kernel.value_at_origin();
    if (kernel.dim() == 1 && c.N) a.result["decay"] = to_json(check_decay_1d(kernel, *c.N));
    if (kernel.dim() == 2 && c.L) a.result["decay"] = to_json(check_decay_2d(kernel, *c.L, c.lambda));
    a.result["coefficients"] = kernel_table_json(kernel);
    std::ostringstream csv;
    write_kernel_csv(csv, kernel);
    a.csv = csv.str();
  } else if (c.command == "lattice") {
    const Configuration config = build_lattice(c, kernel.cell());
    a.result["configuration"] = to_json(config);
    std::ostringstream csv;
    write_configuration_csv(csv, config);
    a.csv = csv.str();
    a.svg = render_svg(config, nullptr, c.command);
  } else if (c.command == "energy") {
    const Configuration config = c.input.empty() ? build_lattice(c, kernel.cell()) : load_configuration(c.input);
    const EnergyReport report = energy_report(kernel, config);
    a.result["energy"] = to_json(report);
    a.result["configuration"] = to_json(config);
    std::ostringstream csv;
    write_structure_factor_csv(csv, structure_factor_grid(config, kernel.mode_cap()));
    a.csv = csv.str();
    a.svg = render_svg(config, nullptr, "energy gap " + format_double(report.gap));
  } else if (c.command == "minimize") {
    MinimizeOptions o = c.minimize;
    o.record_trace = c.formats.count("csv") > 0;
    const bool triplet = c.L.has_value() && !c.N.has_value();
    const int size = triplet ? *c.L : require(c.N, "--N or --L", c.command);
    MinimizationResult r = minimize(kernel, size, triplet ? Constraint::triplet : Constraint::none, o);
    const auto ref = reference_for(c, kernel.dim());
    if (ref && ref->cell() == r.best.cell()) r.defect = canonicalize_translation(r.best, *ref).second;
    a.result["minimization"] = to_json(r);
    std::ostringstream csv;
    write_trace_csv(csv, r.trace);
    a.csv = csv.str();
    a.svg = render_svg(r.best, ref ? &*ref : nullptr, "best gap 1e" + format_double(r.best_log10_gap));
  } else if (c.command == "verify-1d" || c.command == "verify-2d") {
    VerifyOptions o;
    o.minimize = c.minimize;
    o.tolerance = c.tolerance;
    o.lambda = c.lambda;
    const bool one = c.command == "verify-1d";
    const VerdictReport r = one ? verify_theorem_1d(kernel, require(c.N, "--N", c.command), o)
                                : verify_theorem_2d(kernel, require(c.L, "--L", c.command), o);
    a.result = to_json(r);
    a.failed = !r.recovered;
    std::ostringstream csv;
    write_configuration_csv(csv, r.minimization.best);
    a.csv = csv.str();
    const Configuration ref = one ? equidistant_1d(r.size) : triangular_lattice(r.size);
    a.svg = render_svg(r.minimization.best, &ref,
                       std::string(r.recovered ? "recovered" : "not recovered") + ", sup defect " +
                           format_double(r.sup_defect));
  } else if (c.command == "certify") {
    if (!c.L && !c.N) throw UsageError("certify requires --L or --N");
    std::vector<CertificateBlock> blocks;
    if (c.L) {
      const int L = *c.L;
      blocks.push_back(certify_orthonormality(L));
      blocks.push_back(certify_triplet_factor(L));
      blocks.push_back(certify_quadratic_form(L));
      blocks.push_back(certify_separation(triangular_lattice(L), L));
      if (kernel.dim() == 2 && kernel.cell() == Cell::triangular()) {
        const MinimizationResult r = minimize(kernel, L, Constraint::triplet, c.minimize);
        CertificateBlock sep = certify_separation(r.best, L);
        sep.name = "separation_minimizer";
        blocks.push_back(sep);
        blocks.push_back(certify_coefficient_bound(kernel, r.best));
      }
    }
    if (c.N && kernel.dim() == 1) {
      const int N = *c.N;
      const Configuration eq = equidistant_1d(N);
      if (N >= 2) blocks.push_back(certify_newton(eq, N / 2, kernel));
      blocks.push_back(certify_square_lattice_bound(kernel, c.K.value_or(N)));
      blocks.push_back(certify_coefficient_bound(kernel, eq));
    }
    Json list = Json::array();
    bool passed = true;
    for (const auto& b : blocks) {
      list.push_back(to_json(b));
      passed = passed && b.passed;
    }
    a.result["certificates"] = list;
    a.result["passed"] = passed;
    a.failed = !passed;
    std::ostringstream csv;
    csv << "name,threshold,passed\n";
    for (const auto& b : blocks) csv << b.name << ',' << format_double(b.threshold) << ',' << b.passed << '\n';
    a.csv = csv.str();
  } else {
    throw UsageError("unknown command '" + c.command + "'");
  }
  return a;
}

std::string with_extension(const std::string& path, const std::string& ext) {
  std::filesystem::path p(path);
  p.replace_extension(ext);
  return p.string();
}

// Fills `c` from a --config document.
void apply_config_file(const Json& j, RunConfig& c, bool& cell_set, bool& cap_set) {
  if (!j.is_object()) throw UsageError("--config must hold a JSON object");
  if (j.contains("command")) c.command = j["command"].get<std::string>();
  if (j.contains("kernel")) {
    c.kernel = kernel_spec_from_json(j["kernel"]);
    cell_set = j["kernel"].contains("cell");
    cap_set = j["kernel"].contains("mode_cap");
  }
  auto opt_int = [&](const char* key, std::optional<int>& dst) {
    if (j.contains(key) && !j[key].is_null()) dst = j[key].get<int>();
  };
  opt_int("N", c.N);
  opt_int("L", c.L);
  opt_int("K", c.K);
  const Json& m = j.contains("minimize") ? j["minimize"] : j;
  if (m.contains("starts")) c.minimize.starts = m["starts"].get<int>();
  if (m.contains("seed")) c.minimize.seed = m["seed"].get<std::uint64_t>();
  if (m.contains("grad_tol")) c.minimize.grad_tol = m["grad_tol"].get<double>();
  if (m.contains("max_iters")) c.minimize.max_iters = m["max_iters"].get<int>();
  if (m.contains("threads")) c.minimize.threads = m["threads"].get<int>();
  if (m.contains("polish")) c.minimize.polish = polish_from_string(m["polish"].get<std::string>());
  if (m.contains("newton_iters")) c.minimize.newton_iters = m["newton_iters"].get<int>();
  if (m.contains("precision_digits")) c.minimize.precision_digits = m["precision_digits"].get<unsigned>();
  if (m.contains("step_init")) c.minimize.step_init = m["step_init"].get<double>();
  if (m.contains("backtrack_factor")) c.minimize.backtrack_factor = m["backtrack_factor"].get<double>();
  if (m.contains("armijo_c")) c.minimize.armijo_c = m["armijo_c"].get<double>();
  if (m.contains("step_tol")) c.minimize.step_tol = m["step_tol"].get<double>();
  if (m.contains("mode_cap")) c.minimize.mode_cap = m["mode_cap"].get<int>();
  if (j.contains("tolerance") && !j["tolerance"].is_null()) c.tolerance = j["tolerance"].get<double>();
  if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
  if (j.contains("lattice")) c.lattice = j["lattice"].get<std::string>();
  if (j.contains("input")) c.input = j["input"].get<std::string>();
  if (j.contains("out")) c.out = j["out"].get<std::string>();
  if (j.contains("format")) c.formats = j["format"].get<std::set<std::string>>();
}

}  // namespace

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["kernel"] = to_json(c.kernel);
  j["N"] = c.N ? Json(*c.N) : Json(nullptr);
  j["L"] = c.L ? Json(*c.L) : Json(nullptr);
  j["K"] = c.K ? Json(*c.K) : Json(nullptr);
  Json m;
  m["starts"] = c.minimize.starts;
  m["max_iters"] = c.minimize.max_iters;
  m["grad_tol"] = c.minimize.grad_tol;
  m["step_init"] = c.minimize.step_init;
  m["backtrack_factor"] = c.minimize.backtrack_factor;
  m["armijo_c"] = c.minimize.armijo_c;
  m["seed"] = c.minimize.seed;
  m["mode_cap"] = c.minimize.mode_cap;
  m["threads"] = c.minimize.threads;
  m["polish"] = to_string(c.minimize.polish);
  m["newton_iters"] = c.minimize.newton_iters;
  m["precision_digits"] = c.minimize.precision_digits;
  m["step_tol"] = c.minimize.step_tol;
  j["minimize"] = m;
  j["tolerance"] = c.tolerance ? Json(*c.tolerance) : Json(nullptr);
  j["lambda"] = c.lambda;
  j["lattice"] = c.lattice;
  j["input"] = c.input;
  j["out"] = c.out;
  j["format"] = c.formats;
  return j;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Pair-interaction energies of point configurations on flat tori", "torus-energy"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(0, 1);

  std::string config_path, kernel_type, polish, lattice, input, outp;
  std::vector<std::string> cell, formats;
  double t = 0, grad_tol = 0, tolerance = 0, lambda = 0;
  int mode_cap = 0, N = 0, L = 0, K = 0, starts = 0, max_iters = 0, threads = 0, newton_iters = 0;
  unsigned digits = 0;
  std::uint64_t seed = 0;
  bool triangular = false, square = false, equidistant = false, random = false;

  auto* o_config = app.add_option("--config", config_path, "JSON file with a run configuration");
  auto* o_kernel = app.add_option("--kernel", kernel_type, "gaussian | heat | inv_laplacian | table");
  auto* o_t = app.add_option("--t", t, "Kernel width parameter");
  auto* o_cell = app.add_option("--cell", cell, "Cell periods, e.g. --cell sqrt3 1");
  auto* o_cap = app.add_option("--mode-cap", mode_cap, "Radius of the stored mode box");
  auto* o_N = app.add_option("--N", N, "Number of points (1D)");
  auto* o_L = app.add_option("--L", L, "Triangular lattice parameter (N = 2L^2)");
  auto* o_K = app.add_option("--K", K, "Square lattice side");
  auto* o_starts = app.add_option("--starts", starts, "Random starts");
  auto* o_seed = app.add_option("--seed", seed, "Base seed");
  auto* o_gtol = app.add_option("--grad-tol", grad_tol, "Gradient sup-norm tolerance");
  auto* o_iters = app.add_option("--max-iters", max_iters, "Gradient descent iterations per start");
  auto* o_threads = app.add_option("--threads", threads, "Worker threads (default: TORUS_ENERGY_THREADS or all)");
  auto* o_polish = app.add_option("--polish", polish, "Extended-precision Newton stage: auto | on | off");
  auto* o_newton = app.add_option("--newton-iters", newton_iters, "Newton iterations per stage");
  auto* o_digits = app.add_option("--digits", digits, "Working digits of the Newton stage");
  auto* o_tol = app.add_option("--tolerance", tolerance, "Sup-defect tolerance of the verdict");
  auto* o_lambda = app.add_option("--lambda", lambda, "Exponent of the 2D decay ratio");
  app.add_flag("--triangular", triangular, "lattice/energy: triangular lattice (needs --L)");
  app.add_flag("--square", square, "lattice/energy: square lattice (needs --K)");
  app.add_flag("--equidistant", equidistant, "lattice/energy: equidistant points (needs --N)");
  app.add_flag("--random", random, "lattice/energy: random points (needs --N or --L)");
  auto* o_input = app.add_option("--input", input, "energy: configuration JSON");
  auto* o_out = app.add_option("--out", outp, "Output path; csv and svg reuse it with their extension");
  auto* o_format = app.add_option("--format", formats, "Subset of json,csv,svg")->delimiter(',');
  (void)o_format;

  const std::map<std::string, std::string> about{
      {"kernel-table", "Fourier coefficients, tail bound and decay checks of a kernel"},
      {"lattice", "Write a reference or random configuration"},
      {"energy", "Direct and spectral energy of a configuration"},
      {"minimize", "Multi-start minimization of the spectral gap"},
      {"verify-1d", "Recover the equidistant configuration on the circle"},
      {"verify-2d", "Recover the triangular lattice under the triplet constraint"},
      {"certify", "Run the numerical certificates"},
  };
  for (const auto& name : kCommands) app.add_subcommand(name, about.at(name))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig c;
  bool cell_set = false, cap_set = false;
  if (*o_config) apply_config_file(Json::parse(read_text_file(config_path)), c, cell_set, cap_set);
  for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
  if (c.command.empty()) throw UsageError("a command is required: kernel-table, lattice, energy, minimize, "
                                          "verify-1d, verify-2d, certify");
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    throw UsageError("unknown command '" + c.command + "'");
  }

  if (*o_kernel) {
    try {
      c.kernel.family = kernel_family_from_string(kernel_type);
    } catch (const std::exception& e) {
      throw UsageError(std::string("malformed kernel spec: ") + e.what());
    }
  }
  if (*o_t) c.kernel.t = t;
  if (*o_cell) {
    Json j = Json::array();
    for (const auto& p : cell) {
      if (p == "sqrt3" || p == "sqrt(3)") {
        j.push_back(p);
      } else {
        try {
          j.push_back(std::stod(p));
        } catch (const std::exception&) {
          throw UsageError("bad cell period '" + p + "'");
        }
      }
    }
    c.kernel.cell = cell_from_json(j).periods();
    cell_set = true;
  }
  if (*o_cap) {
    c.kernel.mode_cap = mode_cap;
    cap_set = true;
  }
  if (*o_N) c.N = N;
  if (*o_L) c.L = L;
  if (*o_K) c.K = K;
  if (*o_starts) c.minimize.starts = starts;
  if (*o_seed) c.minimize.seed = seed;
  if (*o_gtol) c.minimize.grad_tol = grad_tol;
  if (*o_iters) c.minimize.max_iters = max_iters;
  if (*o_threads) {
    c.minimize.threads = threads;
  } else if (const char* env = std::getenv("TORUS_ENERGY_THREADS"); env && c.minimize.threads == 0) {
    try {
      c.minimize.threads = std::stoi(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad TORUS_ENERGY_THREADS '") + env + "'");
    }
  }
  if (*o_polish) {
    try {
      c.minimize.polish = polish_from_string(polish);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  if (*o_newton) c.minimize.newton_iters = newton_iters;
  if (*o_digits) c.minimize.precision_digits = digits;
  if (*o_tol) c.tolerance = tolerance;
  if (*o_lambda) c.lambda = lambda;
  if (triangular + square + equidistant + random > 1) throw UsageError("choose one lattice kind");
  if (triangular) c.lattice = "triangular";
  if (square) c.lattice = "square";
  if (equidistant) c.lattice = "equidistant";
  if (random) c.lattice = "random";
  if (*o_input) c.input = input;
  if (*o_out) c.out = outp;
  if (!formats.empty()) {
    c.formats.clear();
    for (const auto& f : formats) {
      if (f != "json" && f != "csv" && f != "svg") throw UsageError("unknown format '" + f + "'");
      c.formats.insert(f);
    }
  }

  // Defaults that depend on the command.
  const bool two_d = two_dimensional(c);
  if (!cell_set) {
    if (two_d) {
      c.kernel.cell = Cell::triangular().periods();
    } else if (!c.input.empty()) {
      c.kernel.cell = load_configuration(c.input).cell().periods();
    } else {
      c.kernel.cell = {1.0};
    }
  }
  if (!cap_set && c.kernel.family != KernelFamily::table) {
    c.kernel.mode_cap = c.kernel.cell.size() == 2 ? std::max(8, 4 * c.L.value_or(0) + 2)
                                                  : std::max(32, 2 * c.N.value_or(0));
  }
  return c;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Artifacts a;
  try {
    a = run_command(config);
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  Json doc;
  doc["tool"] = "torus-energy";
  doc["version"] = kVersion;
  doc["config"] = to_json(config);
  doc["result"] = a.result;
  const std::string json = doc.dump(2) + "\n";
  if (config.out.empty()) {
    if (config.formats.count("json")) out << json;
    if (config.formats.count("csv")) out << a.csv;
    if (config.formats.count("svg") && !a.svg.empty()) out << a.svg;
  } else {
    if (config.formats.count("json")) write_text_file(config.out, json);
    if (config.formats.count("csv")) write_text_file(with_extension(config.out, ".csv"), a.csv);
    if (config.formats.count("svg") && !a.svg.empty()) write_text_file(with_extension(config.out, ".svg"), a.svg);
  }
  if (a.failed) {
    err << config.command << ": verification failed\n";
    return kVerificationFailed;
  }
  return kOk;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const auto config = parse_args(argc, argv, out);
    if (!config) return kOk;
    return run(*config, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace torus::cli
