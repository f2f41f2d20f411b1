#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "pcvx3/error.hpp"
#include "pcvx3/io.hpp"
#include "support.hpp"

using namespace pcvx3;
using io::json;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InternalInvariant;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("fmt keeps full precision") {
  CHECK(io::fmt(1.0) == "1.00000000000000000e+00");
  CHECK(std::stod(io::fmt(0.1)) == 0.1);
  CHECK(std::stod(io::fmt(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(io::fmt(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(io::fmt(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("jet JSON round trip is exact") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const Jet j = testsupport::random_jet(9, 15, 9, rng, i % 2 == 0);
    const json doc = io::jet_to_json(j);
    const Jet back = io::jet_from_json(json::parse(doc.dump()));
    CHECK(back.trunc_degree() == j.trunc_degree());
    CHECK(back.real_flag() == j.real_flag());
    CHECK(approx_equal(back, j, 0.0));
  }
}

TEST_CASE("jet JSON accepts plain numbers and defaults") {
  const Jet j = io::load_jet(R"({"trunc_degree": 4, "real": true, "coeffs": {"0,0,2,2,0": 1, "0,0,2,0,0": [0.5, 0]}})");
  CHECK(j.real_flag());
  CHECK(j.coeff({0, 0, 2, 2, 0}) == cplx(1.0));
  CHECK(j.coeff({0, 0, 2, 0, 0}) == cplx(0.5));
  const Jet empty = io::load_jet(R"({"trunc_degree": 3})");
  CHECK(empty.is_zero());
  CHECK_FALSE(empty.real_flag());
}

TEST_CASE("malformed jets are ParseErrors") {
  for (const char* bad : {
           R"({"coeffs": {}})",
           R"({"trunc_degree": 2.5})",
           R"({"trunc_degree": -1})",
           R"({"trunc_degree": 2, "real": 1})",
           R"({"trunc_degree": 2, "coeffs": []})",
           R"({"trunc_degree": 2, "coeffs": {"1,0,0": [1, 0]}})",
           R"({"trunc_degree": 2, "coeffs": {"1,0,0,0,0": "x"}})",
           R"({"trunc_degree": 2, "coeffs": {"1,0,0,0,0": [1, 2, 3]}})",
           R"({"trunc_degree": 2, "coeffs": {"1,1,1,0,0": [1, 0]}})",
           R"({"trunc_degree": 2, )",
       })
    CHECK_MESSAGE(kind_of([&] { io::load_jet(bad); }) == ErrorKind::ParseError, bad);
  CHECK(kind_of([&] { io::jet_from_json(json::array()); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { io::load_json("/nonexistent/path.json"); }) == ErrorKind::IoError);
}

TEST_CASE("normalization JSON fields") {
  NormalizationResult r;
  r.tau = 4;
  r.j0 = r.k0 = 2;
  r.witness = 4.0;
  r.halted = true;
  r.final_state.stage = 3;
  r.final_state.phi = Jet(6, true);
  r.final_state.shears.push_back({1, Jet::constant(4, 1.0), {}});
  const json j = io::normalization_to_json(r);
  CHECK(j["tau"] == 4);
  CHECK(j["halted"] == true);
  CHECK(j["final_stage"] == 3);
  CHECK(j["witness"][0] == 4.0);
  REQUIRE(j["shears"].size() == 1);
  CHECK(j["shears"][0]["stage"] == 1);
  CHECK(io::jet_from_json(j["shears"][0]["c"]).coeff({}) == cplx(1.0));
}

TEST_CASE("CSV headers") {
  KernelEstimate e;
  e.rows.push_back({0.1, 2.0, 3.0, std::numeric_limits<double>::quiet_NaN()});
  const std::string k = io::kernel_csv(e);
  CHECK(first_line(k) == "delta,K_hat,upper_bound,slope_so_far");
  CHECK(k.find(",nan\n") != std::string::npos);

  WitnessReport w;
  w.rows.push_back({});
  CHECK(first_line(io::witness_csv(w)) == "n,delta_n,K1,K2,ratio,mass,f_at_z0");

  LeviReport lr;
  CHECK(first_line(io::levi_csv(lr)) == "re_z1,im_z1,re_z2,im_z2,t,lambda_min");

  ScalingProbeReport sp;
  sp.deltas = {0.1};
  sp.max_deviation = {0.01};
  const std::string s = io::scale_probe_csv(sp, json{{"fitted_rate", nullptr}});
  CHECK(first_line(s) == "delta,max_deviation");
  CHECK(s.find("# {\"fitted_rate\":null}") != std::string::npos);
}

TEST_CASE("kernel summary grades the fit") {
  KernelEstimate e;
  e.model.tau = 2.0;
  e.fit = CatlinFit{-3.05, 0.01, -3.0, -0.05};
  CHECK(io::kernel_summary(e, 0.1)["fit"]["quality"] == "good");
  CHECK(io::kernel_summary(e, 0.01)["fit"]["quality"] == "poor");
  e.fit.reset();
  CHECK(io::kernel_summary(e, 0.1)["fit"].is_null());
}

TEST_CASE("atomic write replaces the target and leaves no temporary") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pcvx3_io_test";
  fs::remove_all(dir);
  const fs::path p = dir / "sub" / "out.txt";
  io::write_atomic(p, "first");
  io::write_atomic(p, "second");
  std::ifstream in(p);
  std::string s;
  std::getline(in, s);
  CHECK(s == "second");
  CHECK_FALSE(fs::exists(fs::path(p.string() + ".tmp")));
  fs::remove_all(dir);
}
