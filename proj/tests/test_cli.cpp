#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "dtea/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result invoke(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"dtea"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = dtea::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path fresh(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dtea_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

nlohmann::json report(const fs::path& dir) {
  std::ifstream in(dir / "report.json");
  return nlohmann::json::parse(in);
}

std::vector<std::string> lines(const fs::path& file) {
  std::ifstream in(file);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("stiffness subcommand writes the artifacts") {
  const auto dir = fresh("stiffness");
  const auto r = invoke({"stiffness", "--mode", "sea", "--preset", "paper-full-range", "--out", dir.string(),
                         "--frictionless", "--plot"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("stiffness") != std::string::npos);
  const auto j = report(dir);
  CHECK(j["schema_version"] == 1);
  CHECK(j["stiffness"].get<double>() == doctest::Approx(5.57).epsilon(0.01));
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "plot.svg"));
  CHECK(lines(dir / "trace.csv").front() == dtea::kTraceHeader);
}

TEST_CASE("missing or forbidden flags are usage errors") {
  auto r = invoke({"stiffness"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--mode") != std::string::npos);
  CHECK(invoke({"disturb", "--preset", "calibrated"}).code == 1);
  CHECK(invoke({"track", "--mode", "sea"}).code == 1);
  CHECK(invoke({"cycle", "--mode", "pea"}).code == 1);
  CHECK(invoke({"stiffness", "--mode", "both"}).code == 1);
  CHECK(invoke({"stiffness", "--mode", "sea", "--bogus"}).code == 1);
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("bad presets are validation errors") {
  const auto r = invoke({"stiffness", "--mode", "sea", "--preset", "missing-preset", "--out",
                         fresh("badpreset").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("missing-preset") != std::string::npos);

  const auto dir = fresh("invalid");
  fs::create_directories(dir);
  auto preset = dtea::paper_full_range();
  preset.params.hub_stiffness = -1.0;
  dtea::save_preset(preset, dir / "p.json");
  const auto bad = invoke({"stiffness", "--mode", "sea", "--preset", (dir / "p.json").string(), "--out",
                           (dir / "o").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("hub_stiffness") != std::string::npos);
}

TEST_CASE("simulation failures exit with 2") {
  const auto dir = fresh("blowup");
  fs::create_directories(dir);
  auto preset = dtea::frictionless(dtea::paper_full_range());
  dtea::save_preset(preset, dir / "p.json");
  // Undamped: the arm never comes to rest after an impact.
  const auto r = invoke({"disturb", "--mode", "sea", "--impacts", "1", "--preset", (dir / "p.json").string(),
                         "--out", (dir / "o").string()});
  CHECK(r.code == 2);
}

TEST_CASE("hub curve sweep") {
  const auto dir = fresh("hub");
  auto r = invoke({"hub-curve", "--range", "-0.5", "0.5", "--steps", "3", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = lines(dir / "trace.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "beta,tau_hub,l_eff");
  CHECK(rows[1].rfind("-0.5,", 0) == 0);
  CHECK(rows[2].rfind("0,0,", 0) == 0);
  CHECK(rows[3].rfind("0.5,", 0) == 0);

  const auto fine = fresh("hubfine");
  r = invoke({"hub-curve", "--range", "-0.3", "0.3", "--steps", "601", "--out", fine.string()});
  REQUIRE(r.code == 0);
  const auto sweep = lines(fine / "trace.csv");
  REQUIRE(sweep.size() == 602);
  auto tau_at = [&](std::size_t i) {
    const auto& l = sweep[i];
    const auto a = l.find(',');
    const auto b = l.find(',', a + 1);
    return std::stod(l.substr(a + 1, b - a - 1));
  };
  for (std::size_t i = 1; i <= 300; ++i) CHECK(tau_at(i) == -tau_at(602 - i));
  const auto j = report(fine);
  CHECK(j["finite_difference_slope"].get<double>() == doctest::Approx(5.86).epsilon(0.002));
  CHECK(j["finite_difference_slope"].get<double>() ==
        doctest::Approx(j["linearized_stiffness"].get<double>()).epsilon(1e-4));

  CHECK(invoke({"hub-curve", "--steps", "1", "--out", dir.string()}).code == 1);
  CHECK(invoke({"hub-curve", "--range", "0.5", "-0.5", "--out", dir.string()}).code == 1);
  CHECK(invoke({"hub-curve", "--noise", "--out", dir.string()}).code == 1);
}

TEST_CASE("cycle subcommand summary") {
  const auto dir = fresh("cycle");
  const auto r = invoke({"cycle", "--n", "4", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("4 completed, 0 rejected, 0 violations") != std::string::npos);
  CHECK(report(dir)["completed"] == 4);
}

TEST_CASE("noise flag touches only the output angle column") {
  const auto clean = fresh("clean");
  const auto noisy = fresh("noisy");
  REQUIRE(invoke({"disturb", "--mode", "pea", "--impacts", "1", "--out", clean.string()}).code == 0);
  REQUIRE(invoke({"disturb", "--mode", "pea", "--impacts", "1", "--noise", "--seed", "5", "--out",
                  noisy.string()})
              .code == 0);
  const auto a = dtea::read_trace_csv(clean / "trace.csv");
  const auto b = dtea::read_trace_csv(noisy / "trace.csv");
  REQUIRE(a.rows.size() == b.rows.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    REQUIRE(a.rows[i].motor_angle == b.rows[i].motor_angle);
    differs = differs || a.rows[i].output_angle != b.rows[i].output_angle;
  }
  CHECK(differs);
  // Metrics come from the noiseless simulation.
  CHECK(report(clean)["mean_peak_deg"] == report(noisy)["mean_peak_deg"]);
}
