#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "doctest.h"
#include "torus/io.hpp"
#include "torus/verify.hpp"

using namespace torus;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("kernel spec parsing") {
  const KernelSpec s = kernel_spec_from_json(Json::parse(R"({"type": "heat", "t": 0.25, "cell": ["sqrt3", 1], "mode_cap": 12})"));
  CHECK(s.family == KernelFamily::heat);
  CHECK(s.t == 0.25);
  CHECK(s.cell == std::vector<double>{std::sqrt(3.0), 1.0});
  CHECK(s.mode_cap == 12);
  const KernelSpec again = kernel_spec_from_json(to_json(s));
  CHECK(again.family == s.family);
  CHECK(again.cell == s.cell);
  CHECK(make_kernel(again).coefficient({1, 1}) == make_kernel(s).coefficient({1, 1}));

  const KernelSpec t = kernel_spec_from_json(Json::parse(R"({"type": "table", "cell": [1], "table": [[0, 1.0], [3, 0.25]]})"));
  const FourierKernel tk = make_kernel(t);
  CHECK(tk.mode_cap() == 3);
  CHECK(tk.coefficient({-3, 0}) == 0.25);

  for (const char* bad : {R"([1, 2])", R"({"t": 1})", R"({"type": "lorentzian"})", R"({"type": "gaussian", "t": "x"})",
                          R"({"type": "gaussian", "cell": [1, 2, 3]})", R"({"type": "table", "cell": [1]})",
                          R"({"type": "table", "cell": [1], "table": [[0.5, 1]]})"}) {
    CHECK_THROWS_WITH(kernel_spec_from_json(Json::parse(bad)), doctest::Contains("malformed kernel spec"));
  }
}

TEST_CASE("configuration JSON round trip is bitwise") {
  std::mt19937_64 rng(1);
  for (const Configuration& c : {random_configuration(17, Cell{1.0}, rng()), random_configuration(18, Cell::triangular(), rng(), 3),
                                 triangular_lattice(6), equidistant_1d(7)}) {
    const std::string text = to_json(c).dump();
    const Configuration back = configuration_from_json(Json::parse(text));
    CHECK(back.cell() == c.cell());
    CHECK(back.triplet() == c.triplet());
    REQUIRE(back.size() == c.size());
    for (std::size_t k = 0; k < c.coords().size(); ++k) CHECK(same_bits(back.coords()[k], c.coords()[k]));
  }
  const Json j = to_json(triangular_lattice(3));
  CHECK(j["constraint"]["triplet"] == 3);
  CHECK(to_json(equidistant_1d(3))["constraint"].is_null());
  CHECK_THROWS(configuration_from_json(Json::parse(R"({"cell": [1, 1], "points": [[0.5]]})")));
  CHECK_THROWS(configuration_from_json(Json::parse(R"({"points": [[0.5]]})")));
}

TEST_CASE("non-finite numbers") {
  CHECK(number(INFINITY) == "inf");
  CHECK(std::isnan(number_from_json(number(NAN))));
  CHECK(number_from_json(number(-INFINITY)) == -INFINITY);
  CHECK(number_from_json(Json(1.5)) == 1.5);
  CHECK_THROWS(number_from_json(Json("many")));
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("CSV writers") {
  std::ostringstream k;
  write_kernel_csv(k, gaussian_kernel(1.0, Cell{1.0}, 2));
  const auto kl = lines(k.str());
  CHECK(kl.front() == "n1,n2,a");
  CHECK(kl.size() == 6);

  std::ostringstream c;
  write_configuration_csv(c, triangular_lattice(3));
  const auto cl = lines(c.str());
  CHECK(cl.front() == "x,y");
  CHECK(cl.size() == 19);

  std::ostringstream s;
  write_structure_factor_csv(s, structure_factor_grid(equidistant_1d(4), 3));
  const auto sl = lines(s.str());
  CHECK(sl.front() == "n1,re,im,abs");
  CHECK(sl.size() == 8);

  std::ostringstream t;
  write_trace_csv(t, {TracePoint{0, 1, 1, 0.5, std::log10(0.5), 1e-3}});
  const auto tl = lines(t.str());
  CHECK(tl.front().rfind("start,iter,gap,grad_norm", 0) == 0);
  CHECK(tl.size() == 2);
}

TEST_CASE("report JSON") {
  const FourierKernel k = gaussian_kernel(1.0, Cell{1.0}, 32);
  const Json e = to_json(energy_report(k, equidistant_1d(3)));
  CHECK(e.contains("direct_energy"));
  CHECK(e.contains("gap"));

  VerifyOptions o;
  o.minimize.starts = 2;
  const Json v = to_json(verify_theorem_1d(k, 3, o));
  CHECK(v["verdict"] == "recovered");
  CHECK(v.contains("sup_defect"));
  CHECK(v["minimization"].contains("per_start"));
  CHECK(v["minimization"]["per_start"].size() == 2);
}

TEST_CASE("file helpers") {
  CHECK_THROWS(read_text_file("/nonexistent/dir/file.json"));
  CHECK_THROWS(write_text_file("/nonexistent/dir/file.json", "x"));
}
