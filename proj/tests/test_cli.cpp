#include <unistd.h>

#include <filesystem>

#include "cli_runner.hpp"
#include "doctest.h"
#include "featgts/dsl.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using cli::model_path;
using cli::run;

namespace {

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("featgts_cli_" + std::to_string(getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::string kSim = " --features SIR,network --init 40,3,0.1 --horizon 50 --runs 2 --seed 7";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate and configs") {
  auto v = run("validate " + model_path());
  CHECK(v.code == 0);
  auto c = run("configs " + model_path());
  CHECK(c.code == 0);
  CHECK(c.out ==
        "SIR\nSIR,location\nSIR,network\nSIR,location,network\nSIR,dynamics,network\n"
        "SIR,dynamics,location,network\n");
  CHECK(run("validate /nonexistent/model.fgts").code == 70);
  CHECK(run("").code == 64);
  CHECK(run("frobnicate").code == 64);
  CHECK(run("derive " + model_path()).code == 64);
}

TEST_CASE("derive and merge write plain documents") {
  TempDir tmp;
  auto d = run("derive " + model_path() + " --features SIR,network");
  REQUIRE(d.code == 0);
  auto parsed = featgts::parse_model(d.out);
  REQUIRE(parsed.ok());
  CHECK(parsed.document->model.model == fixtures::network());

  CHECK(run("derive " + model_path() + " --features SIR,network --out " + tmp / "v.fgts").code == 0);
  CHECK(fixtures::read(tmp / "v.fgts") == d.out);
  CHECK(run("derive " + model_path() + " --features SIR,network --out -").out == d.out);

  CHECK(run("derive " + model_path() + " --features SIR,dynamics").code == 66);
  CHECK(run("derive " + model_path() + " --features SIR,bogus").code == 66);

  auto m = run("merge " + model_path() + " --left location --right network");
  REQUIRE(m.code == 0);
  auto merged = featgts::parse_model(m.out);
  REQUIRE(merged.ok());
  CHECK(featgts::isomorphic(merged.document->model.model, fixtures::variant({"SIR", "location", "network"})));
  CHECK(run("merge " + model_path() + " --left location --right network --out " + tmp / "m.fgts").code == 0);
  CHECK(fixtures::read(tmp / "m.fgts") == m.out);
}

TEST_CASE("check-conservative") {
  auto bad = run("check-conservative " + model_path() + " --base SIR,network --ext SIR,network,dynamics");
  CHECK(bad.code == 1);
  CHECK(bad.out == "NOT conservative: desert (deletes link, creates link)\n");
  auto good = run("check-conservative " + model_path() + " --base SIR --ext SIR,network,dynamics");
  CHECK(good.code == 0);
  CHECK(good.out == "conservative\n");
  CHECK(run("check-conservative " + model_path() + " --base SIR,network --ext SIR,location").code == 65);
}

TEST_CASE("simulate is reproducible and --out - matches the files") {
  TempDir tmp;
  auto a = run("simulate " + model_path() + kSim + " --out -");
  auto b = run("simulate " + model_path() + kSim + " --out -");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("run,time,rule,nodes\r\n", 0) == 0);
  CHECK(a.out.find("run,time,S,I,R\r\n") != std::string::npos);

  REQUIRE(run("simulate " + model_path() + kSim + " --out " + tmp / "out").code == 0);
  CHECK(fixtures::read(tmp / "out/events.csv") + fixtures::read(tmp / "out/observables.csv") == a.out);

  auto env = run("simulate " + model_path() + kSim + " --out -", "FEATGTS_SEED=7");
  CHECK(env.out == a.out);
  auto other = run("simulate " + model_path() + kSim + " --out -", "FEATGTS_SEED=8");
  CHECK(other.code == 0);
  CHECK(other.out != a.out);

  CHECK(run("simulate " + model_path() + " --features SIR --init 10,20").code == 70);
  CHECK(run("simulate " + model_path() + " --features SIR --init 10,1 --observe Agent.q").code == 70);
  CHECK(run("simulate " + model_path() + " --features SIR --init 10,1 --rates north=1").code == 65);
}

TEST_CASE("compare reports relevance through the exit code") {
  auto rel = run("compare " + model_path() +
                 " --features-a SIR --features-b SIR,network --base SIR --init 60,3,0 --runs 10 --seed 1");
  CHECK(rel.code == 2);
  CHECK(rel.out.find("observable=Agent.s:R D=1.000000 ") != std::string::npos);
  CHECK(rel.out.find("decision=relevant") != std::string::npos);

  auto same = run("compare " + model_path() +
                  " --features-a SIR,network --features-b SIR,network --base SIR --init 60,3,0 --runs 10 --seed 1");
  CHECK(same.code == 0);
  CHECK(same.out.find("D=0.000000") != std::string::npos);
  CHECK(same.out.find("decision=not-relevant") != std::string::npos);

  CHECK(run("compare " + model_path() +
            " --features-a SIR,network --features-b SIR,network,dynamics --base SIR,network --init 60,3,0 --runs 4")
            .code == 65);
}

TEST_CASE("malformed inputs exit with the documented codes") {
  for (const auto& e : fs::directory_iterator(fixtures::source_path("tests/fixtures/malformed"))) {
    const auto name = e.path().filename().string();
    INFO(name);
    const int expected = name.rfind("parse_", 0) == 0 ? 64 : 65;
    CHECK(run("validate '" + e.path().string() + "'").code == expected);
  }
}

}  // TEST_SUITE
