#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dicelab/cli.hpp"
#include "dicelab/errors.hpp"

using namespace dicelab;
using namespace dicelab::cli;
using nlohmann::json;

namespace {

CommandReport run_cli(const std::vector<std::string>& args) { return execute(parse(args)); }

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    path = std::string("dicelab_test_") + std::to_string(std::rand()) + ".json";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("parse recognizes the documented requests") {
  auto check = parse({"check", "ABCCABBCA"});
  CHECK(check.subcommand == "check");
  CHECK(check.positional.at(0) == "ABCCABBCA");

  auto enumerate = parse({"enumerate", "--letters", "3", "--faces", "6"});
  CHECK(enumerate.subcommand == "enumerate");
  CHECK(enumerate.flags.at("letters") == "3");
  CHECK(enumerate.flags.at("faces") == "6");

  auto simulate = parse({"simulate", "--laws", "uniform,uniform,uniform", "--faces",
                         "50,50,50", "--trials", "10000000", "--seed", "7"});
  CHECK(simulate.subcommand == "simulate");
  CHECK(simulate.flags.at("laws") == "uniform,uniform,uniform");
  CHECK(simulate.flags.at("trials") == "10000000");
  CHECK(simulate.flags.at("seed") == "7");
}

TEST_CASE("parse rejects unknown input") {
  CHECK_THROWS_AS((void)parse({"frobnicate"}), UsageError);
  CHECK_THROWS_AS((void)parse({"enumerate", "--letters", "3"}), UsageError);
  CHECK_THROWS_AS((void)parse({"enumerate", "--letters", "3", "--faces", "3",
                               "--frequency", "9"}),
                  UsageError);
  CHECK_THROWS_AS((void)parse({"check", "ABC", "--format", "yaml"}), UsageError);
  CHECK_THROWS_AS((void)parse({}), UsageError);
}

TEST_CASE("check reports the victory matrix") {
  auto report = run_cli({"check", "ABCCABBCA"});
  const auto& payload = report.payload;
  CHECK(payload.at("intransitive") == true);
  CHECK(payload.at("victories")[0][1] == 5);
  CHECK(payload.at("victories")[1][2] == 5);
  CHECK(payload.at("victories")[2][0] == 5);
  CHECK(payload.at("victories")[0][0] == 0);
  CHECK(payload.at("q_member") == true);
  CHECK(payload.at("neutral") == false);
  CHECK(report.version == std::string(kVersion));
}

TEST_CASE("enumerate reproduces the exact table entry") {
  auto report = run_cli({"enumerate", "--letters", "3", "--faces", "3"});
  CHECK(report.payload.at("intransitive_count") == 15);
  CHECK(report.payload.at("total_count") == 1680);
}

TEST_CASE("sigma on equal fractions") {
  auto report = run_cli({"sigma", "--f", "1,1,1"});
  const auto& payload = report.payload;
  for (double g : payload.at("gamma")) CHECK(g == doctest::Approx(-0.5));
  CHECK(std::abs(payload.at("det_expansion").get<double>()) < 1e-12);
  CHECK(std::abs(payload.at("det_lu").get<double>()) < 1e-12);
  for (double x : payload.at("null_vector"))
    CHECK(x == doctest::Approx(0.5773502691896258).epsilon(1e-9));
  CHECK(payload.at("strictly_positive") == true);
}

TEST_CASE("construct dual twice returns the input") {
  auto once = run_cli({"construct", "--op", "dual", "--word", "ABCCABBCAABC"});
  auto twice = run_cli({"construct", "--op", "dual", "--word",
                        once.payload.at("word").get<std::string>(), "--dense"});
  CHECK(twice.payload.at("dense") == "ABCCABBCAABC");
}

TEST_CASE("construct special emits run-length form") {
  auto report = run_cli({"construct", "--op", "special", "--letters", "3", "--index", "1"});
  const std::string word = report.payload.at("word");
  CHECK(word.find('^') != std::string::npos);
  CHECK(report.payload.at("intransitive") == true);
  CHECK(report.payload.at("multiplicities")[0] == 68719476736);
}

TEST_CASE("construct to-dice and from-dice invert each other") {
  auto dice = run_cli({"construct", "--op", "to-dice", "--word", "ABCCABBCAABC"});
  CHECK(dice.payload.at("canonical") == true);
  TempFile file(dice.payload.at("dice").dump());
  auto back = run_cli({"construct", "--op", "from-dice", "--dice", file.path, "--dense"});
  CHECK(back.payload.at("dense") == "ABCCABBCAABC");
}

TEST_CASE("coeffs over blow-up laws includes the balance check") {
  TempFile file("[[18,13,11,7,6,2],[17,15,10,8,4,3],[16,14,12,9,5,1]]");
  auto report = run_cli({"coeffs", "--dice", file.path, "--faces", "6,6,6"});
  const auto& payload = report.payload;
  CHECK(payload.at("coefficients")[0].at("p_exact") == "1/2");
  CHECK(payload.at("coefficients")[0].at("q_exact") == "35/108");
  CHECK(payload.at("coefficients")[0].at("r_exact") == "19/54");
  CHECK(payload.at("coefficients")[0].at("s_exact") == "1/6");
  CHECK(payload.at("blowup_check").at("all_exceed_two_thirds") == true);
  for (const auto& entry : payload.at("moments"))
    CHECK(entry.at("gamma").get<double>() == doctest::Approx(-9.0 / 19.0).epsilon(1e-12));
}

TEST_CASE("simulate word-ratio mode") {
  auto report = run_cli({"simulate", "--word-ratio", "--letters", "3", "--faces", "2",
                         "--trials", "20000", "--seed", "3"});
  CHECK(report.payload.at("hits") == 0);
  CHECK(report.payload.at("rng") == "splitmix64");
}

TEST_CASE("simulate with laws is reproducible") {
  const std::vector<std::string> args{"simulate", "--laws",  "uniform,uniform,uniform",
                                      "--faces",  "4,4,4",   "--trials",
                                      "20000",    "--seed",  "9",
                                      "--workers", "2"};
  auto first = run_cli(args);
  auto second = run_cli(args);
  CHECK(first.payload.at("hits") == second.payload.at("hits"));
  CHECK(first.payload.at("workers") == 2);
}

TEST_CASE("clt subcommand reports matrices") {
  auto report = run_cli({"clt", "--laws", "uniform,uniform,uniform", "--faces", "30,30,30",
                         "--trials", "2000", "--seed", "5"});
  CHECK(report.payload.at("empirical_corr").size() == 3);
  CHECK(report.payload.at("theoretical")[0][1].get<double>() == doctest::Approx(-0.5));
  CHECK(report.payload.at("max_abs_deviation").get<double>() < 0.2);
}

TEST_CASE("orthant subcommand honors the seed") {
  auto first = run_cli({"orthant", "--gamma", "0,0,0", "--samples", "200000", "--seed", "4"});
  auto second = run_cli({"orthant", "--gamma", "0,0,0", "--samples", "200000", "--seed", "4"});
  CHECK(first.payload.at("hits") == second.payload.at("hits"));
  CHECK(first.payload.at("estimate").get<double>() == doctest::Approx(0.125).epsilon(0.02));
}

TEST_CASE("the environment variable overrides the node budget") {
  setenv("DICELAB_BUDGET", "100", 1);
  auto request = parse({"enumerate", "--letters", "3", "--faces", "4"});
  CHECK(request.flags.at("budget") == "100");
  CHECK_THROWS_AS((void)execute(request), Error);
  unsetenv("DICELAB_BUDGET");
  CHECK_NOTHROW((void)run_cli({"enumerate", "--letters", "3", "--faces", "4"}));
}

TEST_CASE("domain errors surface as library errors, not usage errors") {
  CHECK_THROWS_AS((void)run_cli({"orthant", "--gamma", "-1,-1,-1", "--samples", "10"}),
                  Error);
  CHECK_THROWS_AS((void)run_cli({"enumerate", "--letters", "3", "--faces", "9"}), Error);
  CHECK_THROWS_AS((void)run_cli({"check", "A^x"}), Error);
}

TEST_CASE("csv and json carry the same numbers") {
  auto request = parse({"enumerate", "--letters", "3", "--faces", "4", "--format", "csv"});
  auto report = execute(request);
  const std::string csv = render(report);
  const auto newline = csv.find('\n');
  const std::string header = csv.substr(0, newline);
  const std::string row = csv.substr(newline + 1);

  std::vector<std::string> names, cells;
  for (std::stringstream in(header); in.good();) {
    std::string cell;
    std::getline(in, cell, ',');
    names.push_back(cell);
  }
  for (std::stringstream in(row); in.good();) {
    std::string cell;
    std::getline(in, cell, ',');
    cells.push_back(cell);
  }
  REQUIRE(names.size() == cells.size());
  auto cell_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return cells[i];
    return std::string();
  };
  CHECK(cell_of("intransitive_count") == report.payload.at("intransitive_count").dump());
  CHECK(cell_of("total_count") == report.payload.at("total_count").dump());
  CHECK(cell_of("ratio") == report.payload.at("ratio").dump());

  report.request.output_format = "json";
  const auto envelope = json::parse(render(report));
  CHECK(envelope.at("payload").at("intransitive_count") == 39);
  CHECK(envelope.at("version").get<std::string>() == kVersion);
}
