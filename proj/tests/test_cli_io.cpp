#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ordrisk/csv_io.hpp"

using namespace ordrisk;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("ordrisk_test_" + tag + "_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path write_file(const fs::path& dir, const std::string& name,
                    const std::string& content) {
  const fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary);
  out << content;
  out.close();
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("csv loading: labels, transforms and drop accounting") {
  TempDir tmp("load");
  const fs::path csv = write_file(tmp.path, "toy.csv",
                                  "diagnosis,area,ratio,extra\n"
                                  "M,10,0.5,7\n"
                                  "B,20,0.25,8\n"
                                  "M,0,0.5,9\n"    // log(area) fails
                                  "B,30,-1,10\n"   // log(ratio) fails
                                  "B,40,0.125,11\n");
  LoadConfig cfg;
  cfg.features = {{"area", ColumnTransform::log_e},
                  {"ratio", ColumnTransform::log_e}};
  const LoadedDataset loaded = load_csv(csv.string(), cfg);

  CHECK(loaded.drops.rows_parsed == 5);
  CHECK(loaded.drops.rows_kept == 3);
  CHECK(loaded.drops.rows_dropped == 2);
  REQUIRE(loaded.drops.dropped_by_column.size() == 2);
  CHECK(loaded.drops.dropped_by_column[0].first == "area");
  CHECK(loaded.drops.dropped_by_column[0].second == 1);
  CHECK(loaded.drops.dropped_by_column[1].first == "ratio");
  CHECK(loaded.drops.dropped_by_column[1].second == 1);

  const Dataset& d = loaded.data;
  REQUIRE(d.n() == 3);
  REQUIRE(d.p() == 3);  // intercept + 2 features
  CHECK(d.feature_names[0] == "intercept");
  CHECK(d.feature_names[1] == "log(area)");
  CHECK(d.feature_names[2] == "log(ratio)");
  CHECK(d.features(0, 0) == 1.0);
  CHECK(d.features(0, 1) == doctest::Approx(std::log(10.0)).epsilon(1e-15));
  CHECK(d.features(2, 2) == doctest::Approx(std::log(0.125)).epsilon(1e-15));
  CHECK(d.labels[0] == 1);  // M
  CHECK(d.labels[1] == 0);  // B
  CHECK(d.labels[2] == 0);
}

TEST_CASE("csv loading without a feature list keeps all non-label columns") {
  TempDir tmp("all");
  const fs::path csv = write_file(tmp.path, "toy.csv",
                                  "y,a,b\n"
                                  "pos,1,2\n"
                                  "neg,3,4\n");
  LoadConfig cfg;
  cfg.label_column = "y";
  cfg.positive_token = "pos";
  cfg.add_intercept = false;
  const LoadedDataset loaded = load_csv(csv.string(), cfg);
  REQUIRE(loaded.data.p() == 2);
  CHECK(loaded.data.feature_names[0] == "a");
  CHECK(loaded.data.feature_names[1] == "b");
  CHECK(loaded.data.features(1, 1) == 4.0);
  CHECK(loaded.data.labels[0] == 1);
  CHECK(loaded.data.labels[1] == 0);
}

TEST_CASE("csv loading errors name the offending location") {
  TempDir tmp("err");
  LoadConfig cfg;
  cfg.label_column = "y";

  const fs::path missing = write_file(tmp.path, "m.csv", "y,a\np,1\n");
  LoadConfig want_b = cfg;
  want_b.features = {{"b", ColumnTransform::identity}};
  CHECK_THROWS_WITH_AS((void)load_csv(missing.string(), want_b),
                       doctest::Contains("column 'b'"), std::invalid_argument);

  const fs::path ragged =
      write_file(tmp.path, "r.csv", "y,a,b\np,1,2\nq,3\n");
  CHECK_THROWS_WITH_AS((void)load_csv(ragged.string(), cfg),
                       doctest::Contains("line 3"), std::invalid_argument);

  const fs::path bad_num =
      write_file(tmp.path, "n.csv", "y,a\np,1\nq,zebra\n");
  try {
    (void)load_csv(bad_num.string(), cfg);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("zebra") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("'a'") != std::string::npos);
  }

  const fs::path dup = write_file(tmp.path, "d.csv", "y,a,a\np,1,2\n");
  CHECK_THROWS_WITH_AS((void)load_csv(dup.string(), cfg),
                       doctest::Contains("duplicate"), std::invalid_argument);

  const fs::path empty = write_file(tmp.path, "e.csv", "");
  CHECK_THROWS_AS((void)load_csv(empty.string(), cfg), std::invalid_argument);

  // Every row dropped by the transform is an error, not an empty dataset.
  const fs::path all_dropped =
      write_file(tmp.path, "z.csv", "y,a\np,0\nq,-1\n");
  LoadConfig log_a = cfg;
  log_a.features = {{"a", ColumnTransform::log_e}};
  CHECK_THROWS_WITH_AS((void)load_csv(all_dropped.string(), log_a),
                       doctest::Contains("no usable rows"),
                       std::invalid_argument);

  CHECK_THROWS_AS((void)load_csv((tmp.path / "absent.csv").string(), cfg),
                  std::invalid_argument);
}

TEST_CASE("transform parser and the case-study feature selection") {
  CHECK(parse_transform("identity") == ColumnTransform::identity);
  CHECK(parse_transform("id") == ColumnTransform::identity);
  CHECK(parse_transform("log") == ColumnTransform::log_e);
  CHECK_THROWS_AS((void)parse_transform("sqrt"), std::invalid_argument);
  CHECK(to_string(ColumnTransform::log_e) == "log");

  const std::vector<FeatureSpec> f = wdbc_default_features();
  REQUIRE(f.size() == 6);
  CHECK(f[0].column == "worst-texture");
  CHECK(f[0].transform == ColumnTransform::identity);
  CHECK(f[1].column == "worst-area");
  CHECK(f[1].transform == ColumnTransform::log_e);
  CHECK(f[4].column == "worst-concave-points");
  CHECK(f[4].transform == ColumnTransform::log_e);
}

TEST_CASE("double formatting round-trips exactly") {
  const double values[] = {0.0,   0.1,    1.0 / 3.0, -2.5,      1e300,
                           5e-324, -1e-17, 123456.75, 0.38129496};
  for (double v : values) {
    const std::string s = format_double(v);
    // from_chars rather than stod: glibc strtod signals ERANGE on subnormals.
    double parsed = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), parsed);
    REQUIRE(res.ec == std::errc{});
    CHECK(parsed == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-1.0) == "-1");
}

#if defined(ORDRISK_CLI_PATH) && defined(ORDRISK_DATA_DIR)

namespace {

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(ORDRISK_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("command line runs are reproducible byte for byte") {
  TempDir a("cli_a"), b("cli_b");
  const std::string model = "--mu0 0 --mu1 1.5 --sigma 1 --p 0.381295";

  SUBCASE("breakpoints on an explicit model") {
    const std::string args =
        "breakpoints " + model + " --r 0.1,0.5,0.9 --norm squared_euclidean";
    REQUIRE(run_cli(args + " --out-dir " + a.path.string()) == 0);
    REQUIRE(run_cli(args + " --out-dir " + b.path.string()) == 0);
    CHECK(read_file(a.path / "result.json") == read_file(b.path / "result.json"));
    CHECK(read_file(a.path / "report.txt") == read_file(b.path / "report.txt"));
    CHECK(read_file(a.path / "result.json").find("\"tau\"") !=
          std::string::npos);
  }

  SUBCASE("simulation with a fixed seed") {
    const std::string args = "simulate " + model + " --n 64 --seed 9";
    REQUIRE(run_cli(args + " --out-dir " + a.path.string()) == 0);
    REQUIRE(run_cli(args + " --out-dir " + b.path.string()) == 0);
    CHECK(read_file(a.path / "samples.csv") == read_file(b.path / "samples.csv"));
    CHECK(read_file(a.path / "result.json") == read_file(b.path / "result.json"));
    // Header plus one line per draw.
    const std::string csv = read_file(a.path / "samples.csv");
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n' ? 1 : 0;
    CHECK(lines == 65);
  }

  SUBCASE("logistic fit on the bundled case-study table") {
    const std::string data = std::string(ORDRISK_DATA_DIR) + "/wdbc.csv";
    const std::string args = "fit-lr --input " + data;
    REQUIRE(run_cli(args + " --out-dir " + a.path.string()) == 0);
    REQUIRE(run_cli(args + " --out-dir " + b.path.string()) == 0);
    const std::string ra = read_file(a.path / "result.json");
    CHECK(ra == read_file(b.path / "result.json"));
    CHECK(ra.find("log_likelihood") != std::string::npos);
  }
}

TEST_CASE("command line failures exit nonzero") {
  TempDir tmp("cli_fail");
  const std::string out = " --out-dir " + tmp.path.string();
  CHECK(run_cli("breakpoints --r 0.1,0.5,0.9" + out) != 0);  // no model source
  CHECK(run_cli("breakpoints --mu0 0 --mu1 1 --sigma 1 --p 0.4 --r 0.9,0.1" +
                out) != 0);  // decreasing targets
  CHECK(run_cli("fit-lr --input /nonexistent/file.csv" + out) != 0);
  CHECK(run_cli("no-such-command" + out) != 0);
  CHECK(run_cli("simulate --mu0 0 --mu1 1 --sigma -1 --p 0.4" + out) != 0);
}

#endif  // ORDRISK_CLI_PATH && ORDRISK_DATA_DIR
