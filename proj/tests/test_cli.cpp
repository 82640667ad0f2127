#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "assistfair/io.hpp"
#include "cli.hpp"

using namespace assistfair;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = ASSISTFAIR_CONFIG_DIR;

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

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("assistfair_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

fs::path write_config(const std::string& name, const Json& doc) {
  const fs::path p = fs::temp_directory_path() / ("assistfair_cli_test_" + name + ".json");
  std::ofstream(p) << doc.dump();
  return p;
}

Json load(const std::string& name) { return Json::parse(slurp(kConfigs / name)); }

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"simulate"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"verify", "lemma2", "--config", (kConfigs / "thm1.json").string()}).code == kExitUsage);
  CHECK(run({"simulate", "--config", "/nonexistent/config.json"}).code == kExitUsage);
}

TEST_CASE("simulate writes metrics with oracle rows") {
  const fs::path out = scratch("sim");
  const Run r = run({"simulate", "--config", (kConfigs / "example.json").string(), "--reps", "2000", "--out", out.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("D_PLUS") != std::string::npos);
  const auto rows = csv(slurp(out / "metrics.csv"));
  CHECK(rows[0] == std::vector<std::string>{"rule", "x", "quantity", "value", "se", "reps", "seed"});
  bool oracle = false;
  for (const auto& row : rows) {
    if (row[0] == "D_PLUS" && row[2] == "oracle_risk") {
      oracle = true;
      CHECK(std::stod(row[3]) == doctest::Approx(1.17));
    }
    if (row.size() == 7 && row[5] != "reps") CHECK(row[5] == "2000");
  }
  CHECK(oracle);
  const Json j = Json::parse(slurp(out / "metrics.json"));
  CHECK(j.contains("oracle"));
}

TEST_CASE("simulate with one replication reports NA standard errors") {
  const fs::path out = scratch("sim1");
  REQUIRE(run({"simulate", "--config", (kConfigs / "example.json").string(), "--reps", "1", "--out", out.string()}).code ==
          kExitOk);
  const auto rows = csv(slurp(out / "metrics.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][4] == "NA");
}

TEST_CASE("a missing prior is a config error naming the field") {
  Json doc = load("example.json");
  doc.erase("prior");
  const Run r = run({"simulate", "--config", write_config("noprior", doc).string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("prior") != std::string::npos);
}

TEST_CASE("closed-form table") {
  const fs::path out = scratch("cf");
  const Run r = run({"closed-form", "--out", out.string()});
  REQUIRE(r.code == kExitOk);
  const Json j = Json::parse(slurp(out / "closed_form.json"));
  CHECK(j["rows"][4]["rule"] == "D_PLUS");
  CHECK(j["rows"][4]["expected_risk"].get<double>() == doctest::Approx(1.17));
  CHECK(slurp(out / "closed_form.txt") == r.out);
  const Run odd = run({"closed-form", "--n", "7", "--out", out.string()});
  CHECK(odd.code == kExitUsage);
  CHECK(odd.err.find("balanced example requires even n") != std::string::npos);
  const Run fromcfg = run({"closed-form", "--config", (kConfigs / "example.json").string(), "--out", out.string()});
  CHECK(fromcfg.code == kExitOk);
  CHECK(fromcfg.out == r.out);
  const Run sym = run({"closed-form", "--delta", "0", "--out", out.string()});
  const Json z = Json::parse(slurp(out / "closed_form.json"));
  for (const auto& row : z["rows"]) CHECK(row["expected_disparity"].get<double>() == 0.0);
  CHECK(sym.code == kExitOk);
}

TEST_CASE("verify exit codes") {
  const fs::path out = scratch("verify");
  const Run thm1 = run({"verify", "thm1", "--config", (kConfigs / "thm1.json").string(), "--out", out.string()});
  CHECK(thm1.code == kExitOk);
  CHECK(thm1.out.rfind("THM1 PASS", 0) == 0);
  const Json j = Json::parse(slurp(out / "verify_thm1.json"));
  CHECK(j["success_fraction"].get<double>() >= 0.95);
  CHECK(run({"verify", "cor1", "--config", (kConfigs / "thm1.json").string(), "--out", out.string()}).code == kExitOk);

  Json zero = load("thm2.json");
  zero["true_means"] = {{0.0, 0.0}};
  CHECK(run({"verify", "thm2", "--config", write_config("thm2zero", zero).string(), "--out", out.string()}).code ==
        kExitUsage);
  // Unattainable level.
  Json tiny = load("thm2.json");
  tiny["counts"] = {{2, 2}};
  CHECK(run({"verify", "thm2", "--config", write_config("thm2tiny", tiny).string(), "--out", out.string(),
             "--level", "0.99"})
            .code == kExitFailure);
}

TEST_CASE("flags override config scalars") {
  const fs::path out = scratch("override");
  REQUIRE(run({"simulate", "--config", (kConfigs / "example.json").string(), "--reps", "20", "--seed", "123",
               "--out", out.string()})
              .code == kExitOk);
  const auto rows = csv(slurp(out / "metrics.csv"));
  CHECK(rows[1][5] == "20");
  CHECK(rows[1][6] == "123");
  CHECK(run({"verify", "thm1", "--config", (kConfigs / "thm1.json").string(), "--level", "1.5", "--out", out.string()})
            .code == kExitUsage);
}

TEST_CASE("sweep over n drives the aware disparity toward Delta_mu") {
  const fs::path out = scratch("sweep_n");
  REQUIRE(run({"sweep", "--config", (kConfigs / "sweep_n.json").string(), "--out", out.string(), "--reps", "4000"})
              .code == kExitOk);
  std::vector<double> disp;
  for (const auto& row : csv(slurp(out / "sweep.csv"))) {
    if (row[1] == "D_PLUS" && row[3] == "disparity") disp.push_back(std::stod(row[4]));
  }
  REQUIRE(disp.size() == 4);
  for (std::size_t i = 1; i < disp.size(); ++i) CHECK(disp[i] < disp[i - 1]);
  CHECK(disp.back() < 0.05);
}

TEST_CASE("sweep across Delta_mu changes the machine risk gap sign at xi") {
  const fs::path out = scratch("sweep_dmu");
  REQUIRE(run({"sweep", "--config", (kConfigs / "sweep_delta_mu.json").string(), "--out", out.string()}).code == kExitOk);
  std::vector<std::pair<double, double>> gap;
  for (const auto& row : csv(slurp(out / "sweep.csv"))) {
    if (row[1] == "F_PLUS-F_MINUS" && row[3] == "risk_gap") gap.emplace_back(std::stod(row[0]), std::stod(row[4]));
  }
  REQUIRE(gap.size() == 21);
  double crossing = -1.0;
  for (std::size_t i = 1; i < gap.size(); ++i) {
    if (gap[i - 1].second > 0.0 && gap[i].second <= 0.0) crossing = gap[i].first;
  }
  CHECK(std::abs(crossing - 0.5) <= 0.05 + 1e-12);

  for (const std::string stem : {"fig_disparity", "fig_risk", "fig_risk_gap"}) {
    const std::string svg = slurp(out / (stem + ".svg"));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("ξ") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);
    REQUIRE(fs::exists(out / (stem + ".csv")));
  }
  // The sibling CSV holds exactly the plotted points.
  const auto pts = csv(slurp(out / "fig_risk_gap.csv"));
  CHECK(pts[0] == std::vector<std::string>{"series", "x", "y"});
  std::size_t matched = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i][0] != "F_PLUS - F_MINUS") continue;
    const double x = std::stod(pts[i][1]);
    for (const auto& [gx, gy] : gap) {
      if (gx == x) {
        CHECK(std::stod(pts[i][2]) == gy);
        ++matched;
      }
    }
  }
  CHECK(matched == gap.size());
}

TEST_CASE("a sweep without axes behaves as simulate") {
  const fs::path a = scratch("noaxes"), b = scratch("noaxes_sim");
  CHECK(run({"sweep", "--config", (kConfigs / "example.json").string(), "--reps", "500", "--out", a.string()}).code == 0);
  CHECK(run({"simulate", "--config", (kConfigs / "example.json").string(), "--reps", "500", "--out", b.string()}).code == 0);
  CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));
}

TEST_CASE("outputs are byte-identical across runs and worker counts") {
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "3", "8"}) {
    setenv("ASSISTFAIR_THREADS", threads, 1);
    const fs::path out = scratch(std::string("det") + threads);
    REQUIRE(run({"sweep", "--config", (kConfigs / "sweep_n.json").string(), "--reps", "600", "--out", out.string()})
                .code == kExitOk);
    REQUIRE(run({"verify", "thm2", "--config", (kConfigs / "thm2.json").string(), "--out", out.string()}).code ==
            kExitOk);
    outputs.push_back(slurp(out / "sweep.csv") + slurp(out / "fig_risk.csv") + slurp(out / "verify_thm2.json"));
  }
  unsetenv("ASSISTFAIR_THREADS");
  CHECK(outputs[0] == outputs[1]);
  CHECK(outputs[0] == outputs[2]);
}
