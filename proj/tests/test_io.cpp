#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "qmaps/io.hpp"
#include "test_helpers.hpp"

using namespace qmaps;
using namespace qmaps::test;

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qmaps_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string &name) const {
    return (path / name).string();
  }
};

} // namespace

TEST_CASE("qm format round trip is bit exact") {
  Rng rng(101);
  const BipartiteState rho(random_density(6, rng), 2, 3);
  const std::string text = qm_to_string(rho.mat(), 2, 3);

  // key order is fixed: dim_s, dim_e, re, im
  REQUIRE(text.find("\"dim_s\"") < text.find("\"dim_e\""));
  REQUIRE(text.find("\"dim_e\"") < text.find("\"re\""));
  REQUIRE(text.find("\"re\"") < text.find("\"im\""));

  const QmFile parsed = qm_from_string(text);
  REQUIRE(parsed.dim_s == 2);
  REQUIRE(parsed.dim_e == 3);
  REQUIRE((parsed.matrix - rho.mat()).norm() == 0.0);
}

TEST_CASE("qm parse errors") {
  REQUIRE_THROWS_AS(qm_from_string("not json"), std::invalid_argument);
  REQUIRE_THROWS_AS(qm_from_string("{\"dim_s\":2}"), std::invalid_argument);
  REQUIRE_THROWS_AS(
      qm_from_string("{\"dim_s\":2,\"dim_e\":1,\"re\":[1,0],\"im\":[0,0]}"),
      std::invalid_argument);
}

TEST_CASE("state files round trip through disk") {
  TempDir tmp;
  Rng rng(102);
  const BipartiteState rho(random_density(4, rng), 2, 2);
  save_state(tmp.file("rho.qm"), rho);
  const BipartiteState back = load_state(tmp.file("rho.qm"));
  REQUIRE(back.dim_s == 2);
  REQUIRE((back.mat() - rho.mat()).norm() == 0.0);
  // no stray temp file left behind
  REQUIRE_FALSE(fs::exists(tmp.file("rho.qm.tmp")));

  SECTION("invalid density matrices are rejected on load") {
    std::ofstream bad(tmp.file("bad.qm"));
    bad << "{\"dim_s\":2,\"dim_e\":1,\"re\":[1,0,0,1],\"im\":[0,0,0,0]}";
    bad.close();
    REQUIRE_THROWS_AS(load_state(tmp.file("bad.qm")),
                      std::invalid_argument); // trace 2
  }

  SECTION("unitary loader validates") {
    Rng rng2(103);
    const Matrix u = random_unitary(4, rng2);
    write_file_atomic(tmp.file("u.qm"), qm_to_string(u, 2, 2));
    REQUIRE((load_unitary(tmp.file("u.qm"), 2, 2) - u).norm() == 0.0);
    REQUIRE_THROWS_AS(load_unitary(tmp.file("u.qm"), 2, 3),
                      std::invalid_argument);
  }
}

TEST_CASE("format_double round-trips doubles at 17 significant digits") {
  Rng rng(104);
  for (int rep = 0; rep < 200; ++rep) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-12, 12));
    REQUIRE(std::stod(format_double(v)) == v);
  }
  REQUIRE(format_double(0.5) == "0.5");
}

TEST_CASE("csv writer shape and content") {
  CsvWriter csv({"a", "b", "c"});
  csv.row().add(std::uint64_t{1}).add(0.1).add(std::string("x"));
  const std::string expected_number = format_double(0.1);
  REQUIRE(csv.str() == "a,b,c\n1," + expected_number + ",x\n");
  REQUIRE(csv.str().find("\r") == std::string::npos);

  REQUIRE_THROWS_AS(csv.row().add(1.0), std::logic_error); // short row
}

TEST_CASE("writability is checked up front") {
  REQUIRE_THROWS_AS(check_writable("/nonexistent_dir_qmaps/x.csv"),
                    std::runtime_error);
  TempDir tmp;
  REQUIRE_NOTHROW(check_writable(tmp.file("ok.csv")));
  REQUIRE_FALSE(fs::exists(tmp.file("ok.csv.tmp")));
}
