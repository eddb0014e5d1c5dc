#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "toda/cli.hpp"

using namespace toda;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "toda-forge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

/// Fresh scratch directory per test.
class Scratch {
 public:
  Scratch() {
    dir_ = fs::temp_directory_path() / ("toda_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  fs::path operator/(const std::string& name) const { return dir_ / name; }
  const fs::path& path() const { return dir_; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path dir_;
};

/// Signed terms of "a - b + c" as a set, so ordering does not matter.
std::multiset<std::string> signed_terms(std::string poly) {
  std::multiset<std::string> out;
  std::string cur;
  char sign = '+';
  for (std::size_t i = 0; i < poly.size(); ++i) {
    char c = poly[i];
    if (c == ' ') continue;
    if ((c == '+' || c == '-') && (i == 0 || poly[i - 1] == ' ')) {
      if (!cur.empty()) out.insert(sign + cur);
      cur.clear();
      sign = c;
      continue;
    }
    cur += c;
  }
  if (!cur.empty()) out.insert(sign + cur);
  return out;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST(Format, SeventeenSignificantDigits) {
  EXPECT_EQ(cli::fmt_double(0.1), "0.10000000000000001");
  EXPECT_EQ(cli::fmt_double(1.0), "1");
  EXPECT_EQ(std::stod(cli::fmt_double(M_PI)), M_PI);
}

TEST(Format, Sha256KnownVectors) {
  EXPECT_EQ(cli::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Integrals, A2TextMatchesReference) {
  auto r = run({"integrals", "--type", "A", "--rank", "2", "--text"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  ASSERT_EQ(ls[0].rfind("I1 = ", 0), 0u);
  ASSERT_EQ(ls[1].rfind("I2 = ", 0), 0u);
  EXPECT_EQ(signed_terms(ls[0].substr(5)),
            signed_terms("-u1_xx - u2_xx + u1_x^2 - u1_x*u2_x + u2_x^2"));
  EXPECT_EQ(signed_terms(ls[1].substr(5)),
            signed_terms("-u2_xxx + 2*u2_xx*u2_x - u1_xx*u2_x + u1_x^2*u2_x - u1_x*u2_x^2"));
}

TEST(Integrals, A1) {
  auto r = run({"integrals", "--type", "A", "--rank", "1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "I1 = -u1_xx + u1_x^2\n");
}

TEST(Integrals, JsonSchema) {
  auto r = run({"integrals", "--type", "A", "--rank", "2", "--json"});
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["schema"], "toda-forge/1");
  EXPECT_EQ(j["type"], "A");
  EXPECT_EQ(j["rank"], 2);
  EXPECT_EQ(j["exponents"], Json::array({1, 2}));
  ASSERT_EQ(j["integrals"].size(), 2u);
  EXPECT_EQ(j["integrals"][0]["j"], 1);
  EXPECT_EQ(j["integrals"][1]["degree"], 3);
  EXPECT_EQ(j["integrals"][0]["terms"].size(), 5u);
  // -u2_xxx
  bool found = false;
  for (const auto& t : j["integrals"][1]["terms"])
    if (t["vars"] == Json::parse(R"([{"i":2,"order":3,"power":1}])")) found = t["coeff"] == "-1";
  EXPECT_TRUE(found);
  for (const auto& row : j["cji"])
    for (const auto& c : row) EXPECT_TRUE(c.is_string());
}

TEST(Integrals, BadRankExitsTwoWithoutOutput) {
  Scratch s;
  auto out = (s / "bad.txt").string();
  EXPECT_EQ(run({"integrals", "--type", "D", "--rank", "2", "--out", out}).code, 2);
  EXPECT_EQ(run({"integrals", "--type", "Q", "--rank", "2", "--out", out}).code, 2);
  EXPECT_EQ(run({"integrals", "--type", "A", "--rank", "0", "--out", out}).code, 2);
  EXPECT_EQ(run({"integrals", "--type", "A", "--rank", "10", "--out", out}).code, 2);  // dim 120 > 100
  EXPECT_EQ(run({"integrals", "--type", "E", "--rank", "7", "--out", out}).code, 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_TRUE(fs::is_empty(s.path()));
}

TEST(Usage, MissingSubcommandAndHelp) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"verify", "--suite", "nonsense", "--type", "A", "--rank", "2"}).code, 2);
}

TEST(Verify, AllA2Passes) {
  auto r = run({"verify", "--suite", "all", "--type", "A", "--rank", "2"});
  EXPECT_EQ(r.code, 0) << r.out;
  auto j = Json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  std::set<std::string> suites;
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c["pass"].get<bool>()) << c["name"];
    EXPECT_EQ(c["residual"], 0.0);
    suites.insert(c["suite"]);
  }
  EXPECT_EQ(suites, (std::set<std::string>{"integrals", "bigcell", "brackets", "character"}));
}

TEST(Verify, CharacterSeriesA2) {
  auto r = run({"verify", "--suite", "character", "--type", "A", "--rank", "2"});
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  ASSERT_EQ(j["checks"].size(), 2u);
  for (const auto& c : j["checks"]) EXPECT_EQ(c["detail"], "series 1,2,4,6,9,12,16");
}

TEST(Verify, CorruptedConstantFails) {
  auto r = run({"verify", "--suite", "integrals", "--type", "A", "--rank", "2", "--inject-fault", "structure-constant"});
  EXPECT_EQ(r.code, 1);
  auto j = Json::parse(r.out);
  EXPECT_FALSE(j["pass"].get<bool>());
  EXPECT_EQ(j["fault"], "structure-constant");
  auto b = run({"verify", "--suite", "brackets", "--type", "A", "--rank", "2", "--inject-fault", "structure-constant"});
  EXPECT_EQ(b.code, 1);
  EXPECT_EQ(run({"verify", "--suite", "all", "--type", "A", "--rank", "1", "--inject-fault", "structure-constant"}).code, 1);
}

TEST(Verify, BigcellSkippedOutsideTypeA) {
  auto r = run({"verify", "--suite", "bigcell", "--type", "B", "--rank", "2"});
  EXPECT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  ASSERT_EQ(j["checks"].size(), 1u);
  EXPECT_TRUE(j["checks"][0]["skipped"].get<bool>());
}

TEST(Verify, OtherTypesPass) {
  for (auto [t, l] : std::vector<std::pair<std::string, std::string>>{{"B", "2"}, {"G", "2"}, {"A", "3"}})
    EXPECT_EQ(run({"verify", "--suite", "all", "--type", t, "--rank", l}).code, 0) << t << l;
}

TEST(VectorFields, A2Text) {
  auto r = run({"vector-fields", "--type", "A", "--rank", "2"});
  ASSERT_EQ(r.code, 0);
  auto ls = lines(r.out);
  EXPECT_EQ(ls[0], "Le = (v1^2 - v3)*d/dv1 + (-v1*v2 + v2^2 + v3)*d/dv2 + (v1*v3)*d/dv3");
  bool found = false;
  for (const auto& l : ls)
    if (l.rfind("v2^(1) = ", 0) == 0) {
      found = true;
      EXPECT_EQ(signed_terms(l.substr(9)), signed_terms("v2^2 + v3 - v1*v2"));
    }
  EXPECT_TRUE(found);
}

TEST(VectorFields, JsonAndTypeRestriction) {
  auto r = run({"vector-fields", "--type", "A", "--rank", "2", "--json", "--order", "2"});
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["coordinates"].size(), 3u);
  EXPECT_EQ(j["eR"].size(), 2u);
  EXPECT_EQ(j["v"].size(), 6u);
  EXPECT_EQ(j["Le"]["v3"], "v1*v3");
  EXPECT_EQ(run({"vector-fields", "--type", "B", "--rank", "2"}).code, 2);
}

TEST(Algebra, DumpA2) {
  Scratch s;
  auto out = (s / "ints.json").string(), alg = (s / "alg.json").string();
  ASSERT_EQ(run({"integrals", "--type", "A", "--rank", "2", "--json", "--out", out, "--dump-algebra", alg}).code, 0);
  auto j = Json::parse(slurp(alg));
  EXPECT_EQ(j["algebra"]["dim"], 8);
  EXPECT_EQ(j["algebra"]["basis"][0], "e[1,0]");
  EXPECT_EQ(j["algebra"]["basis"][6], "h[1]");
  bool found = false;
  for (const auto& t : j["algebra"]["brackets"])
    if (t[0] == "e[1,0]" && t[1] == "e[0,1]") {
      found = true;
      EXPECT_EQ(t[2], "e[1,1]");
      EXPECT_EQ(std::abs(t[3].get<int>()), 1);
    }
  EXPECT_TRUE(found);
  EXPECT_EQ(j["slice"]["exponents"], Json::array({1, 2}));
  // One manifest per output, both naming both files.
  auto m = Json::parse(slurp(out + ".manifest.json"));
  EXPECT_EQ(m["outputs"].size(), 2u);
  EXPECT_EQ(slurp(out + ".manifest.json"), slurp(alg + ".manifest.json"));
}

TEST(Solve, A1ClosedForm) {
  Scratch s;
  auto out = (s / "grid.csv").string();
  auto r = run({"solve", "--type", "A", "--rank", "1", "--phi", "1", "--psi", "1", "--grid", "21", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("residual max"), std::string::npos);
  auto ls = lines(slurp(out));
  EXPECT_EQ(ls[0], "x,y,xi_1,u_1,res_1");
  ASSERT_EQ(ls.size(), 1u + 21 * 21);
  int interior = 0;
  for (std::size_t k = 1; k < ls.size(); ++k) {
    auto f = split_csv(ls[k]);
    ASSERT_EQ(f.size(), 5u);
    double x = std::stod(f[0]), y = std::stod(f[1]);
    EXPECT_NEAR(std::stod(f[3]), -std::log(1 + x * y), 1e-10);
    EXPECT_NEAR(std::stod(f[2]), 1 + x * y, 1e-10);
    if (!f[4].empty()) ++interior;
  }
  EXPECT_EQ(interior, 19 * 19);
}

TEST(Solve, RefineReportsRatio) {
  auto r = run({"solve", "--rank", "1", "--phi", "1", "--psi", "1", "--h", "0.001", "--grid", "101", "--refine"});
  ASSERT_EQ(r.code, 0);
  auto pos = r.err.find("convergence ratio ");
  ASSERT_NE(pos, std::string::npos);
  double ratio = std::stod(r.err.substr(pos + 18));
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
}

TEST(Solve, UsageAndDomainErrors) {
  Scratch s;
  auto out = (s / "g.csv").string();
  EXPECT_EQ(run({"solve", "--rank", "1", "--psi", "1", "--out", out}).code, 2);
  EXPECT_EQ(run({"solve", "--rank", "2", "--phi", "1", "--psi", "1,1", "--out", out}).code, 2);
  EXPECT_EQ(run({"solve", "--rank", "1", "--phi", "sin(y)", "--psi", "1", "--out", out}).code, 2);
  EXPECT_EQ(run({"solve", "--rank", "1", "--phi", "x", "--psi", "1", "--out", out}).code, 2);
  EXPECT_EQ(run({"solve", "--type", "C", "--rank", "3", "--phi", "1,1,1", "--psi", "1,1,1", "--out", out}).code, 2);
  EXPECT_EQ(run({"solve", "--rank", "1", "--phi", "-1", "--psi", "1", "--out", out}).code, 3);
  EXPECT_EQ(run({"solve", "--rank", "1", "--phi", "y - 1/2", "--psi", "1", "--out", out}).code, 3);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Manifest, DigestsAndDeterminism) {
  Scratch s;
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  auto a = (s / "a.json").string(), b = (s / "b.json").string();
  ASSERT_EQ(run({"integrals", "--type", "B", "--rank", "2", "--json", "--out", a}).code, 0);
  ASSERT_EQ(run({"integrals", "--type", "B", "--rank", "2", "--json", "--out", b}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  auto ma = Json::parse(slurp(a + ".manifest.json"));
  auto mb = Json::parse(slurp(b + ".manifest.json"));
  EXPECT_EQ(ma["outputs"][0]["sha256"], cli::sha256_hex(slurp(a)));
  EXPECT_EQ(ma["outputs"][0]["sha256"], mb["outputs"][0]["sha256"]);
  EXPECT_EQ(ma["timestamp"], "2023-11-14T22:13:20Z");
  EXPECT_EQ(ma["command"], "integrals");
  EXPECT_EQ(ma["parameters"]["type"], "B");
  for (const char* k : {"sign_variant", "slice_rule", "truncation"}) EXPECT_TRUE(ma["versions"].contains(k)) << k;
  unsetenv("SOURCE_DATE_EPOCH");
  // No temporaries left behind.
  for (const auto& e : fs::directory_iterator(s.path()))
    EXPECT_EQ(e.path().string().find(".tmp."), std::string::npos) << e.path();
}

TEST(Manifest, SolveOutputsRepeatBitExactly) {
  Scratch s;
  auto a = (s / "a.csv").string(), b = (s / "b.csv").string();
  std::vector<std::string> base{"solve", "--rank", "2", "--phi", "1,1+y", "--psi", "1,1", "--grid", "11"};
  auto ra = base, rb = base;
  ra.insert(ra.end(), {"--out", a});
  rb.insert(rb.end(), {"--out", b});
  ASSERT_EQ(run(ra).code, 0);
  ASSERT_EQ(run(rb).code, 0);
  EXPECT_EQ(cli::sha256_hex(slurp(a)), cli::sha256_hex(slurp(b)));
  EXPECT_TRUE(fs::exists(a + ".manifest.json"));
}

TEST(Manifest, OutputDirectoryFromEnvironment) {
  Scratch s;
  setenv(cli::kOutDirEnv, s.path().c_str(), 1);
  auto r = run({"integrals", "--type", "A", "--rank", "1", "--out", "sub/i.txt"});
  unsetenv(cli::kOutDirEnv);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(slurp(s / "sub/i.txt"), "I1 = -u1_xx + u1_x^2\n");
  EXPECT_TRUE(fs::exists(s / "sub/i.txt.manifest.json"));
}

TEST(Invariance, JsonReport) {
  auto r = run({"invariance", "--rank", "2", "--samples", "24", "--t", "0.1"});
  ASSERT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["group_elements_sampled"], 24);
  EXPECT_EQ(j["per_element"].size(), 24u);
  EXPECT_LE(j["max_deviation"].get<double>(), 1e-8);
  EXPECT_EQ(j["method"], "analytic");
  auto c = run({"invariance", "--rank", "1", "--method", "curve-differentiation"});
  ASSERT_EQ(c.code, 0);
  EXPECT_LE(Json::parse(c.out)["max_deviation"].get<double>(), 1e-8);
  EXPECT_EQ(run({"invariance", "--method", "guess"}).code, 2);
}
