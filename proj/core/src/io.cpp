#include "torus/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace torus {
namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw std::invalid_argument("malformed kernel spec: " + what);
}

}  // namespace

Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument("expected a number, got " + j.dump());
}

std::string format_double(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Cell cell_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || j.size() > 2) throw std::invalid_argument("cell must list 1 or 2 periods");
  std::vector<double> periods;
  for (const auto& p : j) {
    if (p.is_string() && (p.get<std::string>() == "sqrt3" || p.get<std::string>() == "sqrt(3)")) {
      periods.push_back(std::sqrt(3.0));
    } else if (p.is_number()) {
      periods.push_back(p.get<double>());
    } else {
      throw std::invalid_argument("cell period must be a number");
    }
  }
  return Cell(periods);
}

Json to_json(const Cell& cell) {
  Json j = Json::array();
  for (double p : cell.periods()) j.push_back(p);
  return j;
}

KernelSpec kernel_spec_from_json(const Json& j) {
  if (!j.is_object()) malformed("expected an object");
  KernelSpec s;
  if (!j.contains("type") || !j["type"].is_string()) malformed("missing \"type\"");
  try {
    s.family = kernel_family_from_string(j["type"].get<std::string>());
  } catch (const std::exception&) {
    malformed("unknown type \"" + j["type"].get<std::string>() + "\"");
  }
  try {
    if (j.contains("cell")) s.cell = cell_from_json(j["cell"]).periods();
  } catch (const std::exception& e) {
    malformed(e.what());
  }
  if (j.contains("t")) {
    if (!j["t"].is_number()) malformed("\"t\" must be a number");
    s.t = j["t"].get<double>();
  }
  if (j.contains("mode_cap")) {
    if (!j["mode_cap"].is_number_integer()) malformed("\"mode_cap\" must be an integer");
    s.mode_cap = j["mode_cap"].get<int>();
  } else if (s.family == KernelFamily::table) {
    s.mode_cap = 0;
  }
  if (s.family == KernelFamily::table) {
    if (!j.contains("table") || !j["table"].is_array()) malformed("table kernel needs \"table\"");
    const std::size_t dim = s.cell.size();
    for (const auto& row : j["table"]) {
      if (!row.is_array() || row.size() != dim + 1) malformed("table rows must be [n..., a]");
      TableEntry e;
      for (std::size_t i = 0; i < dim; ++i) {
        if (!row[i].is_number_integer()) malformed("table modes must be integers");
        e.mode[i] = row[i].get<int>();
      }
      if (!row[dim].is_number()) malformed("table values must be numbers");
      e.value = row[dim].get<double>();
      s.table.push_back(e);
    }
  }
  return s;
}

Json to_json(const KernelSpec& spec) {
  Json j;
  j["type"] = to_string(spec.family);
  if (spec.family == KernelFamily::gaussian || spec.family == KernelFamily::heat) j["t"] = spec.t;
  Json cell = Json::array();
  for (double p : spec.cell) cell.push_back(p);
  j["cell"] = cell;
  j["mode_cap"] = spec.mode_cap;
  if (spec.family == KernelFamily::table) {
    Json rows = Json::array();
    for (const auto& e : spec.table) {
      Json row = Json::array({e.mode[0]});
      if (spec.cell.size() == 2) row.push_back(e.mode[1]);
      row.push_back(e.value);
      rows.push_back(row);
    }
    j["table"] = rows;
  }
  return j;
}

FourierKernel make_kernel(const KernelSpec& spec) {
  const Cell cell(spec.cell);
  switch (spec.family) {
    case KernelFamily::gaussian:
      return gaussian_kernel(spec.t, cell, spec.mode_cap);
    case KernelFamily::heat:
      return heat_kernel(spec.t, cell, spec.mode_cap);
    case KernelFamily::inverse_laplacian:
      return inverse_laplacian_kernel(cell, spec.mode_cap);
    case KernelFamily::table:
      return table_kernel(cell, spec.table,
                          spec.mode_cap > 0 ? std::optional<int>(spec.mode_cap) : std::nullopt);
  }
  throw std::invalid_argument("unknown kernel family");
}

Json to_json(const Configuration& config) {
  Json j;
  j["dim"] = config.dim();
  j["cell"] = to_json(config.cell());
  j["N"] = config.size();
  j["constraint"] = config.triplet() ? Json{{"triplet", *config.triplet()}} : Json(nullptr);
  Json points = Json::array();
  for (std::size_t k = 0; k < config.size(); ++k) {
    Json p = Json::array();
    for (int i = 0; i < config.dim(); ++i) p.push_back(config.coord(k, i));
    points.push_back(p);
  }
  j["points"] = points;
  return j;
}

Configuration configuration_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("cell") || !j.contains("points")) {
    throw std::invalid_argument("configuration needs \"cell\" and \"points\"");
  }
  const Cell cell = cell_from_json(j["cell"]);
  std::vector<double> coords;
  for (const auto& p : j["points"]) {
    if (!p.is_array() || static_cast<int>(p.size()) != cell.dim()) {
      throw std::invalid_argument("point dimension does not match the cell");
    }
    for (const auto& x : p) coords.push_back(number_from_json(x));
  }
  std::optional<int> triplet;
  if (j.contains("constraint") && !j["constraint"].is_null()) {
    const Json& c = j["constraint"];
    if (!c.is_object() || !c.contains("triplet")) throw std::invalid_argument("constraint must be {\"triplet\": L}");
    triplet = c["triplet"].get<int>();
  } else if (j.contains("triplet") && !j["triplet"].is_null()) {
    triplet = j["triplet"].get<int>();
  }
  return Configuration(cell, std::move(coords), triplet);
}

Json to_json(const EnergyReport& r) {
  Json j;
  j["direct_energy"] = number(r.direct_energy);
  j["uniform_energy"] = number(r.uniform_energy);
  j["gap"] = number(r.gap);
  j["pair_energy"] = number(r.pair_energy);
  j["tail_bound"] = number(r.tail_bound);
  j["mode_cap"] = r.mode_cap_used;
  return j;
}

Json to_json(const DecayReport& r) {
  Json j;
  j["dim"] = r.dim;
  j[r.dim == 1 ? "N" : "L"] = r.size;
  j["C0"] = number(r.C0);
  if (r.dim == 2) j["box_min_ratio"] = number(r.box_min_ratio);
  j["epsilon"] = number(r.epsilon);
  if (r.dim == 2) j["epsilon_tilde"] = number(r.epsilon_tilde);
  j["tail_bound"] = number(r.tail_bound);
  j["ratio"] = number(r.ratio);
  j["log10_ratio"] = number(r.log10_ratio);
  if (r.dim == 2) j["lambda"] = r.lambda;
  j["passed_decay"] = r.passed_decay;
  j["passed_ratio"] = r.passed_ratio;
  j["passed"] = r.passed();
  return j;
}

Json to_json(const DefectReport& r) {
  Json j;
  Json shift = Json::array({r.shift[0]});
  if (r.dim == 2) shift.push_back(r.shift[1]);
  j["shift"] = shift;
  j["sup_norm"] = number(r.sup_norm);
  j["l2_norm"] = number(r.l2_norm);
  j["mean_gauge_sup"] = number(r.mean_gauge_sup);
  j["method"] = r.method;
  j["permutation"] = r.permutation;
  Json delta = Json::array();
  const auto d = static_cast<std::size_t>(r.dim);
  for (std::size_t k = 0; k + d <= r.delta.size(); k += d) {
    Json v = Json::array();
    for (std::size_t i = 0; i < d; ++i) v.push_back(r.delta[k + i]);
    delta.push_back(v);
  }
  j["delta"] = delta;
  return j;
}

Json to_json(const MinimizationResult& r) {
  Json j;
  j["best_gap"] = number(r.best_gap);
  j["best_log10_gap"] = number(r.best_log10_gap);
  j["best_start"] = r.best_start;
  j["grad_tol"] = r.grad_tol;
  j["polished"] = r.polished;
  j["precision_digits"] = r.precision_digits;
  Json starts = Json::array();
  for (const auto& s : r.per_start) {
    Json o;
    o["seed"] = s.seed;
    o["gap"] = number(s.gap);
    o["log10_gap"] = number(s.log10_gap);
    o["iterations"] = s.iterations;
    o["newton_iterations"] = s.newton_iterations;
    o["grad_norm"] = number(s.grad_norm);
    o["converged"] = s.converged;
    starts.push_back(o);
  }
  j["per_start"] = starts;
  j["best"] = to_json(r.best);
  if (r.defect) j["defect"] = to_json(*r.defect);
  return j;
}

Json to_json(const VerdictReport& r) {
  Json j;
  j["verdict"] = r.recovered ? "recovered" : "not_recovered";
  j["dim"] = r.dim;
  j[r.dim == 1 ? "N" : "L"] = r.size;
  j["points"] = r.points;
  j["tolerance"] = r.tolerance;
  j["sup_defect"] = number(r.sup_defect);
  j["best_log10_gap"] = number(r.best_log10_gap);
  j["target_log10_gap"] = number(r.target_log10_gap);
  j["hypothesis_warning"] = r.hypothesis_warning;
  if (!r.warning.empty()) j["warning"] = r.warning;
  j["decay"] = r.decay ? to_json(*r.decay) : Json(nullptr);
  if (r.dim == 1) {
    j["defect_ratio"] = number(r.defect_ratio);
    j["log10_defect_ratio"] = number(r.log10_defect_ratio);
  } else {
    j["min_separation"] = number(r.min_separation);
    j["s1_modes"] = r.s1_modes;
    j["exceptional_modes"] = r.exceptional_modes;
    j["log10_max_b_s1"] = number(r.log10_max_b_s1);
    j["log10_b_bound_s1"] = number(r.log10_b_bound_s1);
    j["b_bound_holds"] = r.b_bound_holds;
  }
  j["seconds"] = r.seconds;
  j["minimization"] = to_json(r.minimization);
  return j;
}

void write_kernel_csv(std::ostream& out, const FourierKernel& kernel) {
  out << "n1,n2,a\n";
  for (const Mode& n : kernel.modes()) {
    out << n[0] << ',' << n[1] << ',' << format_double(kernel.coefficient(n)) << '\n';
  }
}

void write_configuration_csv(std::ostream& out, const Configuration& config) {
  out << (config.dim() == 1 ? "x\n" : "x,y\n");
  for (std::size_t k = 0; k < config.size(); ++k) {
    out << format_double(config.coord(k, 0));
    if (config.dim() == 2) out << ',' << format_double(config.coord(k, 1));
    out << '\n';
  }
}

void write_structure_factor_csv(std::ostream& out, const StructureFactor& sf) {
  out << (sf.dim == 1 ? "n1,re,im,abs\n" : "n1,n2,re,im,abs\n");
  for (const Mode& n : sf.modes()) {
    const auto& b = sf.at(n);
    out << n[0];
    if (sf.dim == 2) out << ',' << n[1];
    out << ',' << format_double(b.re) << ',' << format_double(b.im) << ',' << format_double(std::sqrt(b.norm2()))
        << '\n';
  }
}

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace) {
  out << "start,iter,gap,grad_norm,phase,log10_gap\n";
  for (const auto& t : trace) {
    out << t.start << ',' << t.iter << ',' << format_double(t.gap) << ',' << format_double(t.grad_norm) << ','
        << t.phase << ',' << format_double(t.log10_gap) << '\n';
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace torus
