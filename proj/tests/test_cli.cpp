#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <doctest.h>
#include <json.hpp>

#include "binci/golden.hpp"

#ifndef BINCI_CLI_PATH
#error "BINCI_CLI_PATH must be defined"
#endif
#ifndef BINCI_DATA_DIR
#define BINCI_DATA_DIR "data"
#endif

namespace {

struct run_result {
  int code = -1;
  std::string out;  // stdout + stderr
};

run_result run_cli(const std::string& args) {
  const std::string cmd = std::string(BINCI_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  run_result r;
  std::array<char, 4096> buf;
  size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    r.out.append(buf.data(), got);
  }
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    // getline drops a trailing empty field
    if (!line.empty() && line.back() == ',') fields.push_back("");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("interval command prints published values") {
  const auto r = run_cli("interval --method olc --n 10 --x 3 --conf 0.95");
  CHECK(r.code == 0);
  CHECK(r.out.find("(0.0878, 0.6121)") != std::string::npos);

  const auto r2 = run_cli("interval --method olc --n 1 --x 1 --conf 0.95");
  CHECK(r2.code == 0);
  CHECK(r2.out.find("(0.0500, 1.0000)") != std::string::npos);
}

TEST_CASE("interval warns on the degenerate wald cell") {
  const auto r = run_cli("interval --method wald --n 4 --x 0 --conf 0.95");
  CHECK(r.code == 0);
  CHECK(r.out.find("(0.0000, 0.0000)") != std::string::npos);
  CHECK(r.out.find("degenerate") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli("interval --method olc --n 10 --x 3").code == 2);      // no level
  CHECK(run_cli("interval --method nope --n 10 --x 3 --conf 0.9").code == 2);
  CHECK(run_cli("interval --method olc --n 10 --x 11 --conf 0.9").code == 2);
  CHECK(run_cli("metrics --n 20 --alpha 0.025").code == 2);            // empty methods
  CHECK(run_cli("bogus-subcommand").code == 2);
}

TEST_CASE("unsatisfiable olc configuration exits 3") {
  const auto r = run_cli("interval --method olc --n 29 --x 5 --alpha 0.49 --tail upper");
  CHECK(r.code == 3);
  CHECK(r.out.find("numeric failure") != std::string::npos);
}

TEST_CASE("table --round4 reproduces the golden interval fixture") {
  const auto r = run_cli("table --method olc --n-range 1:30 --conf 0.95 --round4");
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"n", "x", "lower", "upper"});
  std::map<std::pair<int, int>, std::pair<double, double>> cells;
  for (size_t k = 1; k < rows.size(); ++k) {
    REQUIRE(rows[k].size() == 4);
    cells[{std::stoi(rows[k][0]), std::stoi(rows[k][1])}] = {std::stod(rows[k][2]),
                                                             std::stod(rows[k][3])};
  }
  const auto golden =
      binci::load_golden_intervals(std::string(BINCI_DATA_DIR) + "/table_a1.csv");
  REQUIRE(golden.checksum_ok);
  for (const auto& row : golden.rows) {
    const auto it = cells.find({row.n, row.x});
    REQUIRE(it != cells.end());
    CHECK(std::fabs(it->second.first - row.lower) <= 1e-4 + 1e-9);
    CHECK(std::fabs(it->second.second - row.upper) <= 1e-4 + 1e-9);
  }
}

TEST_CASE("identical invocations produce byte-identical output") {
  const std::string cmd = "table --method mid-p --n-range 1:12 --conf 0.99";
  const auto r1 = run_cli(cmd);
  const auto r2 = run_cli(cmd);
  CHECK(r1.code == 0);
  CHECK(r1.out == r2.out);
}

TEST_CASE("coverage command emits samples, spikes and gap averages") {
  const auto r =
      run_cli("coverage --method clopper-pearson --n 20 --alpha 0.025 --tail upper "
              "--samples 50");
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  CHECK(rows[0] == std::vector<std::string>{"kind", "x", "p_lo", "p_hi", "value"});
  int samples = 0, spikes = 0, gaps = 0;
  for (size_t k = 1; k < rows.size(); ++k) {
    if (rows[k][0] == "sample") ++samples;
    if (rows[k][0] == "spike") ++spikes;
    if (rows[k][0] == "gap") {
      ++gaps;
      CHECK(std::stod(rows[k][4]) >= 0.975);  // clopper-pearson gaps never dip below
    }
  }
  CHECK(samples == 50);
  CHECK(spikes == 21);
  CHECK(gaps == 20);

  // wilson shows at least one liberal gap; olc gaps sit exactly at nominal
  const auto rw =
      run_cli("coverage --method wilson --n 20 --alpha 0.025 --tail upper --samples 5");
  double min_avg = 1.0;
  for (const auto& row : parse_csv(rw.out)) {
    if (row[0] == "gap") min_avg = std::min(min_avg, std::stod(row[4]));
  }
  CHECK(min_avg < 0.975);

  const auto ro =
      run_cli("coverage --method olc --n 20 --alpha 0.025 --tail upper --samples 5");
  for (const auto& row : parse_csv(ro.out)) {
    if (row[0] == "gap") {
      CHECK(std::fabs(std::stod(row[4]) - 0.975) <= 1e-9);
    }
  }
}

TEST_CASE("metrics command emits the requested grid in canonical order") {
  const auto r = run_cli(
      "metrics --methods mid-p,olc --n 20 --alpha 0.025 --format csv");
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "olc");  // canonical method order, not flag order
  CHECK(rows[2][0] == "mid-p");
  CHECK(std::fabs(std::stod(rows[1][3]) - 0.975) <= 1e-9);   // t_u of olc
  CHECK(std::fabs(std::stod(rows[2][7]) - 0.0091) <= 1e-4);  // rmse of mid-p
}

TEST_CASE("interval json output carries the schema envelope") {
  const auto r = run_cli("interval --method olc --n 2 --x 1 --conf 0.95 --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["command"] == "interval");
  CHECK(std::fabs(j["payload"]["lower"].get<double>() - 0.0252) <= 1e-4);
  CHECK(std::fabs(j["payload"]["upper"].get<double>() - 0.9748) <= 1e-4);
}

TEST_CASE("verify subcommand reports and exits per contract") {
  const std::string json_path =
      (std::string("/tmp/binci_cli_verify_") + std::to_string(getpid())) + ".json";
  const auto r = run_cli("verify --nmax 12 --json " + json_path);
  // the golden RMSE table carries known numeric error in 9 cells, so the
  // harness truthfully reports a failure and exits 1
  CHECK(r.code == 1);
  CHECK(r.out.find("[FAIL] golden-table-2") != std::string::npos);
  CHECK(r.out.find("[PASS] golden-table-a1") != std::string::npos);
  std::ifstream in(json_path);
  REQUIRE(in.good());
  const auto j = nlohmann::json::parse(in);
  CHECK(j["all_pass"] == false);
  int fails = 0;
  for (const auto& c : j["checks"]) {
    if (!c["pass"].get<bool>()) {
      ++fails;
      CHECK(c["id"] == "golden-table-2");
    }
  }
  CHECK(fails == 1);
  std::remove(json_path.c_str());
}
