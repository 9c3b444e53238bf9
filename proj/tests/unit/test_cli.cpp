#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "teichlab/cli.hpp"

using Json = nlohmann::json;
using doctest::Approx;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = teichlab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Json run_json(std::vector<std::string> args, int expected = 0) {
  const Result r = run(std::move(args));
  REQUIRE(r.code == expected);
  return Json::parse(r.out);
}

}  // namespace

TEST_CASE("envelope") {
  const Json j = run_json({"spectral"});
  CHECK(j["toolVersion"] == teichlab::cli::kToolVersion);
  CHECK(j["status"] == "ok");
  CHECK(j["config"]["matrix"] == "2,1,1,1");
  CHECK(j["diagnostics"].is_array());
  CHECK(j["payload"]["perCurve"][0]["limit"].get<double>() == Approx(2.61803399).epsilon(1e-3));
}

TEST_CASE("spectral") {
  const Json t = run_json({"spectral", "--matrix", "1,1,0,1", "--alpha", "0,1;1,1;2,1", "--n", "4800"});
  CHECK(t["payload"]["classification"] == "Reducible");
  REQUIRE(t["payload"]["spectrum"].size() == 1);
  CHECK(t["payload"]["spectrum"][0].get<double>() == Approx(1.0).epsilon(1e-3));
  CHECK(run({"spectral", "--matrix", "1,1,1,1"}).code == 2);
  CHECK(run({"spectral", "--matrix", "1,1"}).code == 2);
  CHECK(run({"spectral", "--n", "abc"}).code == 2);
  CHECK(run({"--model", "klein", "spectral"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("csv output") {
  const Result r = run({"--format", "csv", "spectral", "--n", "5"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  CHECK(lines[0] == std::string("# toolVersion=") + teichlab::cli::kToolVersion);
  const auto header = std::find(lines.begin(), lines.end(), "n,alpha_p,alpha_q,length,nth_root,ratio");
  REQUIRE(header != lines.end());
  CHECK(lines.end() - header == 7);
  CHECK(r.out.find('\r') == std::string::npos);
  CHECK(teichlab::cli::format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(teichlab::cli::format_double(M_PI)) == M_PI);
  const std::string huge = teichlab::cli::format_from_log(1000.0 * std::log(10.0) + std::log(3.0));
  CHECK(std::stod(huge.substr(0, huge.find('e'))) == Approx(3.0).epsilon(1e-9));
  CHECK(huge.find("e+1000") != std::string::npos);
  CHECK(teichlab::cli::format_from_log(std::log(2.5)) == teichlab::cli::format_double(2.5));
}

TEST_CASE("config files and flag precedence") {
  const auto path = std::filesystem::temp_directory_path() / "teichlab_test.cfg";
  {
    std::ofstream f(path);
    f << "# comment\nmatrix = 3,2,1,1\nn=30\n";
  }
  const Json j = run_json({"--config", path.string(), "spectral", "--n", "20"});
  CHECK(j["config"]["matrix"] == "3,2,1,1");
  CHECK(j["config"]["n"] == "20");
  {
    std::ofstream f(path);
    f << "bogus=1\n";
  }
  CHECK(run({"--config", path.string(), "spectral"}).code == 2);
  {
    std::ofstream f(path);
    f << "no equals sign\n";
  }
  CHECK(run({"--config", path.string(), "spectral"}).code == 2);
  std::filesystem::remove(path);
  CHECK(run({"--config", "/nonexistent/cfg", "spectral"}).code == 2);
}

TEST_CASE("walk") {
  const Json j = run_json({"walk", "--n", "200", "--trials", "50"}, 3);
  CHECK(j["payload"]["lambda"]["value"].get<double>() > 1.0);
  CHECK(j["payload"]["lambda"]["stderr"].get<double>() > 0.0);
  const Json id = run_json({"walk", "--generators", "1,0,0,1", "--n", "50", "--trials", "10"});
  CHECK(id["payload"]["drift"]["value"].get<double>() == 0.0);
  CHECK(id["payload"]["sandwich"]["status"] == "degenerate");
  const Result a = run({"--seed", "42", "--threads", "1", "walk", "--n", "100", "--trials", "40"});
  const Result b = run({"--seed", "42", "--threads", "3", "walk", "--n", "100", "--trials", "40"});
  CHECK(a.out == b.out);
  CHECK(run({"walk", "--source", "teleport"}).code == 2);
  CHECK(run({"walk", "--weights", "0.9,0.9"}).code == 2);
}

TEST_CASE("dist and horo") {
  const Json t = run_json({"dist", "--x", "0,1", "--y", "0,2"});
  CHECK(t["payload"]["forward"]["value"].get<double>() == Approx(0.5 * std::log(2.0)));
  CHECK(t["payload"]["backward"]["value"].get<double>() == Approx(0.5 * std::log(2.0)));
  CHECK(t["payload"]["symmetric"] == true);
  const Json f = run_json({"--model", "fricke", "dist", "--x", "507,6,2955", "--y", "3,3,3", "--height", "100"});
  CHECK(f["payload"]["symmetric"] == false);
  const Json h = run_json({"horo", "--mu", "0.3,0.8", "--x", "0.2,1.5", "--x0", "0.2,1.5"});
  CHECK(h["payload"]["value"].get<double>() == 0.0);
  const Json hf = run_json({"--model", "fricke", "horo", "--mu", "1,2", "--x", "3,3,3", "--x0", "3,3,3", "--height", "50"});
  CHECK(hf["payload"]["value"].get<double>() == 0.0);
}

TEST_CASE("holo") {
  const Json e = run_json({"holo", "--map", "mobius(2,0,0,1)"});
  CHECK(e["payload"]["classification"] == "Escaping");
  CHECK(std::abs(e["payload"]["drift"].get<double>() - 0.5 * std::log(2.0)) <= 1e-9);
  CHECK(e["payload"]["lambdaExt"].get<double>() == Approx(2.0));
  const Json b = run_json({"holo", "--map", "shrink(0.5;0,2)"});
  CHECK(b["payload"]["classification"] == "Bounded");
  CHECK(b["payload"]["lastPoint"]["im"].get<double>() == Approx(2.0).epsilon(1e-6));
  const Result bad = run({"holo", "--map", "mobius(2,0,0"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("offset") != std::string::npos);
}

TEST_CASE("binary: exit codes and --out") {
  const std::string bin = TEICHLAB_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status(bin + " selftest > /dev/null") == 0);
  CHECK(status(bin + " spectral --matrix 1,1,1,1 2> /dev/null") == 2);
  CHECK(status(bin + " --help > /dev/null") == 0);
  const auto path = std::filesystem::temp_directory_path() / "teichlab_out.json";
  CHECK(status(bin + " --out " + path.string() + " dist") == 0);
  std::ifstream in(path);
  const Json j = Json::parse(in);
  CHECK(j["status"] == "ok");
  std::filesystem::remove(path);
}
