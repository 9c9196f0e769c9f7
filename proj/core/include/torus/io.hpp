#pragma once

// JSON and CSV persistence. Doubles are written with 17 significant digits
// so every value survives a round trip bit for bit; non-finite values are
// written as the strings "inf", "-inf" and "nan".

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "torus/alignment.hpp"
#include "torus/kernel.hpp"
#include "torus/minimizer.hpp"
#include "torus/spectral.hpp"
#include "torus/verify.hpp"

namespace torus {

using Json = nlohmann::ordered_json;

/// Kernel description as read from
///   {"type": "gaussian"|"heat"|"inv_laplacian"|"table", "t": real,
///    "cell": [..], "mode_cap": int, "table": [[n..., a], ...]}.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double t = 1.0;
  std::vector<double> cell{1.0};
  int mode_cap = 32;
  std::vector<TableEntry> table;
};

/// Throws std::invalid_argument("malformed kernel spec: ...").
KernelSpec kernel_spec_from_json(const Json& j);
Json to_json(const KernelSpec& spec);
FourierKernel make_kernel(const KernelSpec& spec);

/// Cell from a list of periods; "sqrt3" and "sqrt(3)" are accepted as
/// strings for the exact triangular period.
Cell cell_from_json(const Json& j);
Json to_json(const Cell& cell);

Json number(double x);
/// Inverse of number(): accepts numbers and the non-finite strings.
double number_from_json(const Json& j);

/// Fixed 17-significant-digit rendering used by every CSV writer.
std::string format_double(double x);

Json to_json(const Configuration& config);
/// Throws std::invalid_argument on a malformed document.
Configuration configuration_from_json(const Json& j);

Json to_json(const EnergyReport& report);
Json to_json(const DecayReport& report);
Json to_json(const DefectReport& report);
Json to_json(const MinimizationResult& result);
Json to_json(const VerdictReport& report);

/// Rows "n1,n2,a" over the stored box (n2 = 0 in 1D).
void write_kernel_csv(std::ostream& out, const FourierKernel& kernel);
/// Rows "x[,y]".
void write_configuration_csv(std::ostream& out, const Configuration& config);
/// Rows "n1[,n2],re,im,abs".
void write_structure_factor_csv(std::ostream& out, const StructureFactor& sf);
/// Rows "start,iter,gap,grad_norm,phase,log10_gap".
void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace);

std::string read_text_file(const std::string& path);
/// Throws std::runtime_error when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace torus
