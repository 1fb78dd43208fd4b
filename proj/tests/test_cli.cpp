#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

using nlohmann::json;

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(SCHURCUT_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

class TempGraph {
 public:
  explicit TempGraph(const std::string& contents) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("schurcut_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".txt");
    std::ofstream(path_) << contents;
  }
  ~TempGraph() { std::filesystem::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

json parse(const Run& r) { return json::parse(r.out); }

TEST(CliGen, CycleFour) {
  const auto r = run("gen cycle 4");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "0 1 1\n1 2 1\n2 3 1\n3 0 1\n");
}

TEST(CliGen, PathThree) {
  const auto r = run("gen path 3");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "0 1 1\n1 2 1\n");
}

TEST(CliGen, DumbbellHasTwoCliquesAndABridge) {
  const auto r = run("gen dumbbell 3");
  EXPECT_EQ(r.status, 0);
  std::istringstream in(r.out);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 7);
}

TEST(CliGen, GridSpecWithTimesSeparator) {
  const auto a = run("gen grid 3x4");
  const auto b = run("gen grid 3 4");
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliGen, RandomIsDeterministicPerSeed) {
  const auto a = run("gen random 30 0.2 4 --seed 7");
  const auto b = run("gen random 30 0.2 4 --seed 7");
  const auto c = run("gen random 30 0.2 4 --seed 8");
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(CliGen, UnknownFamilyFails) {
  const auto r = run("gen hypercube 3");
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(parse(r)["error"], "BadParams");
}

TEST(CliGen, OutputReadsBackAsTheSameGraph) {
  const auto edges = run("gen grid 3x3");
  TempGraph file(edges.out);
  const auto from_file = parse(run("lambda " + file.path()));
  const auto from_gen = parse(run("lambda --gen \"grid 3x3\""));
  EXPECT_EQ(from_file["n"], 9);
  EXPECT_EQ(from_file["m"], 12);
  EXPECT_NEAR(from_file["lambda"]["value"].get<double>(), from_gen["lambda"]["value"].get<double>(), 1e-12);
}

TEST(CliSweepcut, CycleTwoThousandIsSatisfied) {
  const auto r = run("sweepcut --gen \"cycle 2000\"");
  ASSERT_EQ(r.status, 0);
  const auto j = parse(r);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_TRUE(j["satisfied"].get<bool>());
  EXPECT_EQ(j["lambda"]["method"], "closed-form");
  const double lambda = j["lambda"]["value"].get<double>();
  EXPECT_LE(j["sigma"].get<double>(), 640 * lambda * (1 + 1e-6));
  EXPECT_LE(j["rho"].get<double>(), 1280 * lambda * (1 + 1e-6));
  EXPECT_LE(std::max(j["phi_A"].get<double>(), j["phi_B"].get<double>()), 0.25 + 1e-9);
  EXPECT_FALSE(j["A"].empty());
  EXPECT_FALSE(j["B"].empty());
  EXPECT_LE(j["curve"].size(), 200u);
}

TEST(CliSweepcut, TriangleIsOutOfRange) {
  TempGraph file("0 1 1\n1 2 1\n2 0 1\n");
  const auto r = run("sweepcut " + file.path());
  EXPECT_EQ(r.status, 2);
  const auto j = parse(r);
  EXPECT_EQ(j["error"], "NoQualifyingThreshold");
  EXPECT_EQ(j["regime"], "trivial (lambda > 1/25600)");
}

TEST(CliSweepcut, OutputIsDeterministic) {
  const auto a = run("sweepcut --gen \"path 300\" --seed 3");
  const auto b = run("sweepcut --gen \"path 300\" --seed 3");
  EXPECT_EQ(a.out, b.out);
}

TEST(CliErrors, DisconnectedInput) {
  TempGraph file("0 1 1\n2 3 1\n");
  const auto r = run("lambda " + file.path());
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(parse(r)["error"], "Disconnected");
}

TEST(CliErrors, MissingFile) {
  const auto r = run("lambda /nonexistent/graph.txt");
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(parse(r).contains("error"));
}

TEST(CliErrors, NoInput) {
  EXPECT_EQ(run("lambda").status, 1);
}

TEST(CliVerify, PathThree) {
  TempGraph file("0 1 1\n1 2 1\n");
  const auto r = run("verify " + file.path());
  ASSERT_EQ(r.status, 0);
  const auto j = parse(r);
  EXPECT_NEAR(j["sigma_G"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(j["lambda"]["value"].get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(j["all_hold"].get<bool>());
  EXPECT_TRUE(j["violated"].empty());
}

TEST(CliVerify, FourCycle) {
  const auto r = run("verify --gen \"cycle 4\"");
  ASSERT_EQ(r.status, 0);
  const auto j = parse(r);
  EXPECT_NEAR(j["lambda"]["value"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(j["lambda"]["method"], "dense");
}

TEST(CliVerify, TooLarge) {
  const auto r = run("verify --gen \"cycle 15\"");
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(parse(r)["error"], "TooLarge");
}

TEST(CliVerify, TextFormat) {
  const auto r = run("verify --gen \"path 4\" --format text");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("all_hold: true"), std::string::npos);
}

TEST(CliReff, PathEnds) {
  TempGraph file("0 1 1\n1 2 1\n");
  const auto r = run("reff " + file.path() + " --s1 0 --s2 2");
  ASSERT_EQ(r.status, 0);
  const auto j = parse(r);
  EXPECT_NEAR(j["reff"].get<double>(), 2.0, 1e-9);
  EXPECT_NEAR(j["sigma"].get<double>(), 0.5, 1e-9);
}

TEST(CliReff, TriangleVertexAgainstEdge) {
  TempGraph file("0 1 1\n1 2 1\n2 0 1\n");
  const auto r = run("reff " + file.path() + " --s1 0 --s2 1,2");
  ASSERT_EQ(r.status, 0);
  EXPECT_NEAR(parse(r)["reff"].get<double>(), 0.5, 1e-9);
}

TEST(CliReff, FourCycleOppositeVertices) {
  const auto r = run("reff --gen \"cycle 4\" --s1 0 --s2 2");
  ASSERT_EQ(r.status, 0);
  EXPECT_NEAR(parse(r)["reff"].get<double>(), 1.0, 1e-9);
}

TEST(CliReff, UnknownVertex) {
  TempGraph file("0 1 1\n1 2 1\n");
  const auto r = run("reff " + file.path() + " --s1 0 --s2 7");
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(parse(r)["error"], "InvalidVertex");
}

TEST(CliReff, StringLabels) {
  TempGraph file("a b 1\nb c 1\n");
  const auto r = run("reff " + file.path() + " --s1 a --s2 c");
  ASSERT_EQ(r.status, 0);
  EXPECT_NEAR(parse(r)["reff"].get<double>(), 2.0, 1e-9);
}

TEST(CliLambda, CycleMatchesClosedForm) {
  for (const char* extra : {"", " --dense-threshold 0"}) {
    const auto r = run(std::string("lambda --gen \"cycle 100\"") + extra);
    ASSERT_EQ(r.status, 0);
    const auto j = parse(r);
    EXPECT_LE(j["closed_form_error"].get<double>(), 1e-8);
  }
}

TEST(CliLambda, MethodTags) {
  EXPECT_EQ(parse(run("lambda --gen \"cycle 50\""))["lambda"]["method"], "dense");
  EXPECT_EQ(parse(run("lambda --gen \"cycle 50\" --dense-threshold 0"))["lambda"]["method"], "iterative");
}

TEST(CliPhi, ExactOnSmallGraphs) {
  const auto j = parse(run("phi --gen \"dumbbell 4\""));
  EXPECT_EQ(j["phi_method"], "exact");
  // Cutting the bridge leaves volume 13 on each side.
  EXPECT_NEAR(j["phi_G"].get<double>(), 1.0 / 13.0, 1e-12);
  EXPECT_LE(j["cheeger_lower"].get<double>(), j["phi_G"].get<double>() + 1e-9);
  EXPECT_LE(j["phi_G"].get<double>(), j["cheeger_upper"].get<double>() + 1e-9);
}

TEST(CliPhi, SweepBoundOnLargeGraphs) {
  const auto j = parse(run("phi --gen \"cycle 64\""));
  EXPECT_EQ(j["phi_method"], "sweep-upper-bound");
  EXPECT_NEAR(j["phi_G"].get<double>(), 2.0 / 64.0, 1e-12);
}

TEST(CliRhoExact, DumbbellSeparatesTheCliques) {
  const auto r = run("rho-exact --gen \"dumbbell 3\"");
  ASSERT_EQ(r.status, 0);
  const auto j = parse(r);
  EXPECT_LE(j["sigma_G"]["value"].get<double>(), j["rho_G"]["value"].get<double>() + 1e-12);
  EXPECT_GT(j["pairs"].get<int>(), 0);
}

TEST(CliRhoExact, ThreadCountDoesNotChangeTheAnswer) {
  const auto a = run("rho-exact --gen \"random 8 0.5 3\" --seed 5");
  const auto b = run("rho-exact --gen \"random 8 0.5 3\" --seed 5", "SCHUR_CHEEGER_THREADS=1");
  const auto c = run("rho-exact --gen \"random 8 0.5 3\" --seed 5", "SCHUR_CHEEGER_THREADS=3");
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(parse(a)["rho_G"], parse(b)["rho_G"]);
  EXPECT_EQ(parse(a)["sigma_G"], parse(c)["sigma_G"]);
}

TEST(CliProxyCheck, RandomGraph) {
  const auto r = run("proxy-check --gen \"random 40 0.2 4\" --seed 11");
  EXPECT_EQ(r.status, 0);
  const auto j = parse(r);
  EXPECT_EQ(j["violations"], 0);
  EXPECT_GT(j["checked"].get<int>(), 0);
}

TEST(CliArgs, BadFormatRejected) {
  EXPECT_NE(run("lambda --gen \"cycle 4\" --format yaml").status, 0);
}

}  // namespace
