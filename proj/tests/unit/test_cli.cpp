#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path(RADIAL_BV_TEST_WORKDIR) / "cli";

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" RADIAL_BV_CLI "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

fs::path fresh(const std::string& name) {
  const fs::path d = kWork / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("solve on the non-attained benchmark") {
  const fs::path out = fresh("na");
  REQUIRE(run("solve --density phi-mu --mu 3 --m1 0 --m2 2 --format csv,json,svg --out " + out.string()) == 0);
  const auto csv = lines(slurp(out / "solution.csv"));
  REQUIRE(csv.size() > 2);
  CHECK(csv[0] == "r,u,du,flux");
  const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(j["attained_inner"] == false);
  CHECK(j["lambda"].get<double>() == 1.0);
  CHECK(j["delta_m_infinite"] == false);
  CHECK(j.contains("energy"));
  CHECK(j.contains("tolerances"));
  CHECK(j.contains("grid"));
  CHECK(fs::exists(out / "profile.svg"));
  CHECK(slurp(out / "profile.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("infinite height gain is written as a sentinel") {
  const fs::path out = fresh("inf");
  REQUIRE(run("solve --mu 2 --m2 1 --format json --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(j["delta_m_inf"] == "inf");
  CHECK(j["delta_m_infinite"] == true);
  CHECK(j["attained_inner"] == true);
  CHECK_FALSE(fs::exists(out / "solution.csv"));
}

TEST_CASE("equal data give a constant column and zero energy") {
  const fs::path out = fresh("flat");
  REQUIRE(run("solve --m1 0.75 --m2 0.75 --out " + out.string()) == 0);
  const auto csv = lines(slurp(out / "solution.csv"));
  REQUIRE(csv.size() > 2);
  for (std::size_t i = 1; i < csv.size(); ++i) {
    const auto c1 = csv[i].find(',');
    const auto c2 = csv[i].find(',', c1 + 1);
    CHECK(csv[i].substr(c1 + 1, c2 - c1 - 1) == "0.75");
  }
  const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(j["energy"]["total"].get<double>() == 0.0);
}

TEST_CASE("CSV carries 17 significant digits") {
  const fs::path out = fresh("digits");
  REQUIRE(run("solve --mu 2.5 --m2 0.3 --cells 32 --out " + out.string()) == 0);
  const auto csv = lines(slurp(out / "solution.csv"));
  REQUIRE(csv.size() == 34);
  const std::string u = csv[10].substr(csv[10].find(',') + 1);
  const std::string first = u.substr(0, u.find(','));
  std::size_t digits = 0;
  for (char ch : first.substr(0, first.find('e')))
    if (ch >= '0' && ch <= '9') ++digits;
  CHECK(digits >= 17);
}

TEST_CASE("malformed configuration exits 64") {
  const fs::path out = fresh("bad");
  CHECK(run("solve --rho1 2 --rho2 1 --out " + out.string()) == 64);
  CHECK(run("solve --density nonsense --out " + out.string()) == 64);
  CHECK(run("solve --mu 0.5 --out " + out.string()) == 64);
  CHECK(run("solve --no-such-flag") == 64);
  CHECK(run("") == 64);
  std::ofstream(out / "bad.json") << "{ \"rho1\": 1, \"unknown_key\": 3 }";
  CHECK(run("solve --config " + (out / "bad.json").string() + " --out " + out.string()) == 64);
  std::ofstream(out / "broken.json") << "{ \"rho1\": ";
  CHECK(run("solve --config " + (out / "broken.json").string() + " --out " + out.string()) == 64);
  CHECK(run("solve --config " + (out / "missing.json").string() + " --out " + out.string()) == 64);
}

TEST_CASE("numeric failure exits 1 with diagnostics") {
  const fs::path out = fresh("numeric");
  CHECK(run("solve --mu 1.5 --m2 1e300 --out " + out.string()) == 1);
  REQUIRE(fs::exists(out / "diagnostics.json"));
  const auto j = nlohmann::json::parse(slurp(out / "diagnostics.json"));
  CHECK(j["status"] == "error");
  CHECK(j.contains("message"));
}

TEST_CASE("config file with flag overrides") {
  const fs::path out = fresh("cfg");
  std::ofstream(out / "run.json") << R"({"density": {"family": "custom", "mu": 3, "psi": [[2, 3]]},
    "rho1": 1, "rho2": 2, "m1": 0, "m2": 5, "format": ["json"]})";
  REQUIRE(run("solve --config " + (out / "run.json").string() + " --m2 0.5 --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(j["problem"]["m2"].get<double>() == 0.5);
  CHECK(j["attained_inner"] == true);
}

TEST_CASE("sweep output does not depend on the worker count") {
  const fs::path a = fresh("sweep1"), b = fresh("sweep4");
  REQUIRE(run("sweep --count 12 --seed 5 --out " + a.string(), "RADIAL_BV_THREADS=1") == 0);
  REQUIRE(run("sweep --count 12 --seed 5 --out " + b.string(), "RADIAL_BV_THREADS=4") == 0);
  CHECK(slurp(a / "sweep.csv") == slurp(b / "sweep.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("oracle-compare and reg-study") {
  const fs::path oc = fresh("oc");
  CHECK(run("oracle-compare --mu 3 --m2 2 --cells 256 --out " + oc.string()) == 0);
  CHECK(fs::exists(oc / "comparison.csv"));
  CHECK(lines(slurp(oc / "comparison.csv"))[0] == "r,u_solver,u_oracle,difference");
  const fs::path rs = fresh("rs");
  CHECK(run("reg-study --mu 2 --m2 0.5 --cells 256 --out " + rs.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(rs / "summary.json"));
  CHECK(j.contains("pass"));
}
