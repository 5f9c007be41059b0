#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"

using namespace liouville::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "liouville_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("help documents every exit code") {
  const Run r = run({"--help"});
  CHECK(r.code == kOk);
  for (const char* line : {"0  success", "1  usage", "2  quadrature", "3  Newton", "4  restricted", "5  mismatch", "6  file"}) {
    CHECK(contains(r.out, line));
  }
  CHECK(run({}).code == kUsage);
  CHECK(run({"frobnicate"}).code == kUsage);
}

TEST_CASE("mu2-table") {
  const Run toda = run({"mu2-table", "--n-min", "2", "--n-max", "2"});
  CHECK(toda.code == kOk);
  CHECK(contains(toda.out, "2,1,"));
  CHECK(contains(toda.err, "compared 3, matched 3, mismatched 0"));
  for (const std::string row : {"2,0,", "2,1,", "2,2,"}) {
    const auto pos = toda.out.find(row);
    REQUIRE(pos != std::string::npos);
    CHECK(toda.out.substr(pos, toda.out.find('\n', pos) - pos).ends_with(",0*"));
  }

  const fs::path a = scratch() / "t1.csv", b = scratch() / "t2.csv";
  const Run r1 = run({"mu2-table", "--n-min", "3", "--n-max", "5", "--out", a.string(), "--jobs", "1"});
  CHECK(r1.code == kOk);
  CHECK(contains(r1.out, "rows 15, compared 15, matched 15"));
  CHECK(run({"mu2-table", "--n-min", "3", "--n-max", "5", "--out", b.string(), "--jobs", "3"}).code == kOk);
  CHECK(slurp(a) == slurp(b));

  const fs::path j = scratch() / "t.json";
  CHECK(run({"mu2-table", "--n-min", "3", "--n-max", "3", "--format", "json", "--out", j.string()}).code == kOk);
  CHECK(nlohmann::json::parse(slurp(j)).size() == 4);

  CHECK(run({"mu2-table", "--n-min", "0"}).code == kUsage);
  CHECK(run({"mu2-table", "--n-max", "61"}).code == kUsage);
  CHECK(run({"mu2-table", "--n-min", "5", "--n-max", "4"}).code == kUsage);
  CHECK(run({"mu2-table", "--format", "xml"}).code == kUsage);
  CHECK(run({"mu2-table", "--n-min", "3", "--n-max", "3", "--out", "/nonexistent/dir/t.csv"}).code == kIo);

  const Run coarse = run({"mu2-table", "--n-min", "3", "--n-max", "3", "--panels", "1", "--points-per-panel", "4"});
  CHECK(coarse.code == kPrecision);
  CHECK(contains(coarse.err, "row n=3 m=0 failed"));
}

TEST_CASE("jobs from the environment") {
  ::setenv("LIOUVILLE_JOBS", "2", 1);
  CHECK(run({"mu2-table", "--n-min", "2", "--n-max", "2"}).code == kOk);
  ::setenv("LIOUVILLE_JOBS", "many", 1);
  CHECK(run({"mu2-table", "--n-min", "2", "--n-max", "2"}).code == kUsage);
  ::unsetenv("LIOUVILLE_JOBS");
}

TEST_CASE("branch X(3,2) and plane validation") {
  const fs::path out = scratch() / "b32.json", again = scratch() / "b32b.json";
  const Run r = run({"branch", "--n", "3", "--m", "2", "--steps", "40", "--ds", "0.01", "--out", out.string()});
  CHECK(r.code == kOk);
  CHECK(contains(r.out, "signs agree"));
  CHECK(contains(r.out, "mass: max |sphere - 4 pi|"));
  CHECK(run({"branch", "--n", "3", "--m", "2", "--steps", "40", "--ds", "0.01", "--out", again.string()}).code == kOk);
  CHECK(slurp(out) == slurp(again));

  const Run plane = run({"validate-plane", "--branch", out.string()});
  CHECK(plane.code == kOk);
  const auto report = nlohmann::json::parse(plane.out);
  CHECK(report.at("swapped") == true);
  CHECK(report.at("rotation").get<double>() < 1e-7);

  const fs::path csv = scratch() / "plane.csv";
  CHECK(run({"validate-plane", "--branch", out.string(), "--index", "3", "--half-count", "30", "--csv", csv.string()})
            .code == kOk);
  CHECK(slurp(csv).starts_with("r,theta,u1,u2\n"));
  CHECK(run({"validate-plane", "--branch", out.string(), "--index", "999"}).code == kUsage);
  CHECK(run({"validate-plane"}).code == kUsage);
  CHECK(run({"validate-plane", "--branch", (scratch() / "missing.json").string()}).code == kIo);

  const fs::path junk = scratch() / "junk.json";
  std::ofstream(junk) << "{\"n\": 3}";
  CHECK(run({"validate-plane", "--branch", junk.string()}).code == kIo);

  // a field scaled off the branch no longer carries the plane mass
  auto j = nlohmann::json::parse(slurp(out));
  for (auto& p : j.at("points")) {
    for (auto& c : p.at("c1")) c = c.get<double>() * 1.5 + 0.1;
  }
  const fs::path bad = scratch() / "bad.json";
  std::ofstream(bad) << j.dump();
  CHECK(run({"validate-plane", "--branch", bad.string()}).code == kMismatch);
}

TEST_CASE("branch refusals and failures") {
  const Run r31 = run({"branch", "--n", "3", "--m", "1"});
  CHECK(r31.code == kPrecondition);
  CHECK(contains(r31.err, "dimension 2"));
  CHECK(contains(r31.err, "P_3^1"));
  CHECK(contains(r31.err, "P_3^3"));
  CHECK(run({"branch", "--n", "3", "--m", "4"}).code == kUsage);
  CHECK(run({"branch", "--ds", "-1"}).code == kUsage);

  const fs::path partial = scratch() / "partial.json";
  const Run nf = run({"branch", "--n", "3", "--m", "2", "--newton-iters", "1", "--newton-tol", "1e-300", "--out",
                      partial.string()});
  CHECK(nf.code == kNewton);
  REQUIRE(fs::exists(partial));
  CHECK(nlohmann::json::parse(slurp(partial)).at("complete") == false);
}

TEST_CASE("radial branch counts zeros") {
  const fs::path out = scratch() / "b30.json";
  const Run r = run({"branch", "--n", "3", "--m", "0", "--steps", "40", "--out", out.string()});
  CHECK(r.code == kOk);
  CHECK(contains(r.out, "14 of 14 points have 3 simple zeros"));
}

TEST_CASE("config file") {
  const fs::path cfg = scratch() / "branch.cfg", out = scratch() / "cfg.json";
  std::ofstream(cfg) << "# short branch\nds = 0.02\neps-max = 0.05\nsteps = 10\n";
  const Run r = run({"branch", "--config", cfg.string(), "--out", out.string()});
  CHECK(r.code == kOk);
  auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("ds") == 0.02);
  CHECK(j.at("eps_max") == 0.05);
  // flags win over the file
  CHECK(run({"branch", "--config", cfg.string(), "--ds", "0.01", "--out", out.string()}).code == kOk);
  CHECK(nlohmann::json::parse(slurp(out)).at("ds") == 0.01);

  const fs::path bogus = scratch() / "bogus.cfg";
  std::ofstream(bogus) << "bogus = 1\n";
  CHECK(run({"branch", "--config", bogus.string()}).code == kUsage);
  CHECK(run({"branch", "--config", (scratch() / "none.cfg").string()}).code == kIo);
}

TEST_CASE("kernel and legendre") {
  const Run k = run({"kernel", "--n", "3", "--m", "2"});
  CHECK(k.code == kOk);
  CHECK(contains(k.out, "kernel dimension 10"));
  CHECK(contains(k.out, "restricted to X(3,2): dimension 1\n  phi2: P_3^2(z) cos(2 theta)\n"));
  CHECK(contains(run({"kernel", "--mu", "0.5"}).out, "kernel dimension 3"));
  CHECK(run({"kernel", "--mu", "0.5", "--n", "2"}).code == kUsage);
  CHECK(run({"kernel", "--mu", "0.5", "--m", "1"}).code == kUsage);
  CHECK(run({"kernel", "--mu", "3"}).code == kUsage);

  const Run l = run({"legendre", "--l", "3", "--m", "2", "--z", "0.5"});
  CHECK(l.code == kOk);
  CHECK(l.out == "0.5 5.625\n");
  CHECK(run({"legendre", "--l", "3", "--m", "2", "--z", "1.5"}).code == kUsage);
  CHECK(run({"legendre", "--l", "3", "--z", "0.5", "--kind", "tilde"}).code == kOk);
}
