#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "modefisher/io.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "modefisher");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = modefisher::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("modefisher_cli_" + name);
}

}  // namespace

TEST_CASE("qfi prints six significant digits") {
  CHECK(invoke({"qfi", "--psf", "sinc"}).out == "0.333333\n");
  CHECK(invoke({"qfi", "--psf", "gaussian"}).out == "0.25\n");
  CHECK(invoke({"qfi", "--psf", "gaussian", "--sigma", "2"}).out == "0.0625\n");
  const auto json = invoke({"qfi", "--format", "json"});
  CHECK(json.code == 0);
  CHECK(json.out.find("\"quantum_fisher\"") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  const auto neg = invoke({"qfi", "--psf", "gaussian", "--sigma", "-1"});
  CHECK(neg.code == 2);
  CHECK(neg.out.empty());
  CHECK_FALSE(neg.err.empty());
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"qfi", "--bogus"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"qfi", "--psf", "airy"}).code == 2);
  CHECK(invoke({"qfi", "--n-points", "1000"}).code == 2);
  CHECK(invoke({"fisher", "scan", "--s-min", "2", "--s-max", "1"}).code == 2);
  CHECK(invoke({"modes", "export", "--basis", "sinc_closed", "--psf", "gaussian"}).code == 2);
  CHECK(invoke({"simulate"}).code == 2);
}

TEST_CASE("numeric failures exit with 1 and surface the module error") {
  const auto r = invoke({"planewave", "--psf", "gaussian", "--s-steps", "2"});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("non-sinc PSF:", 0) == 0);
  const auto narrow = invoke({"qfi", "--psf", "sinc", "--x-max", "20"});
  CHECK(narrow.code == 1);
  CHECK(narrow.err.rfind("grid too narrow:", 0) == 0);
  const auto missing = invoke({"qfi", "--psf", "file:/nonexistent/psf.csv"});
  CHECK(missing.code == 1);
}

TEST_CASE("help lists subcommands and defaults") {
  const auto top = invoke({"--help"});
  CHECK(top.code == 0);
  for (const char* sub : {"qfi", "modes", "fisher", "cumulative", "planewave", "simulate", "figure1", "figure2", "figure3"}) {
    CHECK(top.out.find(sub) != std::string::npos);
  }
  const auto scan = invoke({"fisher", "scan", "--help"});
  CHECK(scan.code == 0);
  CHECK(scan.out.find("151") != std::string::npos);
}

TEST_CASE("outputs are deterministic and written atomically") {
  const auto path = scratch("scan.csv");
  std::filesystem::remove(path);
  const std::vector<std::string> args{"fisher", "scan", "--psf", "gaussian", "--n-points", "1024", "--n-modes", "3",
                                      "--s-steps", "4", "--s-max", "3", "--out", path.string()};
  REQUIRE(invoke(args).code == 0);
  const std::string first = modefisher::read_file(path.string());
  REQUIRE(invoke(args).code == 0);
  CHECK(modefisher::read_file(path.string()) == first);
  CHECK(first.rfind("s,F_direct,F_quantum,F_mode_0,F_mode_1,F_mode_2,cumulative_3,tail\n", 0) == 0);
  for (const auto& entry : std::filesystem::directory_iterator(path.parent_path())) {
    CHECK(entry.path().filename().string().find("modefisher_cli_scan.csv.") == std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("simulate writes a report and estimates") {
  const auto config = scratch("config.json");
  const auto report = scratch("report.json");
  const auto estimates = scratch("estimates.csv");
  {
    std::ofstream out(config);
    out << R"({"psf": {"kind": "gaussian"}, "measurement": {"kind": "direct_imaging", "bins": 16, "window": 5},
               "true_separation": 2.0, "photons_per_trial": 5000, "trials": 8, "seed": 3})";
  }
  const auto r = invoke({"simulate", "--config", config.string(), "--out", report.string(), "--estimates",
                         estimates.string(), "--seed", "11"});
  REQUIRE(r.code == 0);
  const std::string json = modefisher::read_file(report.string());
  CHECK(json.find("\"seed\": 11") != std::string::npos);
  CHECK(json.find("\"insufficient_trials\": true") != std::string::npos);
  const std::string csv = modefisher::read_file(estimates.string());
  CHECK(csv.rfind("trial,estimate,boundary_flag\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);

  {
    std::ofstream out(config);
    out << R"({"unknown": 1})";
  }
  CHECK(invoke({"simulate", "--config", config.string()}).code == 1);
  for (const auto& p : {config, report, estimates}) std::filesystem::remove(p);
}

TEST_CASE("figure2 emits both bases in long format") {
  const auto r = invoke({"figure2", "--s", "1", "--adapted-modes", "12", "--hg-modes", "20"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("basis,s,D,cumulative,fraction\n", 0) == 0);
  CHECK(r.out.find("adapted,1.00000000000e+00,10,") != std::string::npos);
  CHECK(r.out.find("hermite_gauss,1.00000000000e+00,20,") != std::string::npos);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1 + 13 + 21);
}
