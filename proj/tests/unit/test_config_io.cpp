#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ioncool/config.hpp"
#include "ioncool/errors.hpp"
#include "ioncool/io.hpp"

using namespace ioncool;

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333333");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_significant(0.123456789, 4) == "0.1235");
}

TEST_CASE("fnv1a") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("csv writer") {
  Table t;
  t.columns = {"a", "b"};
  t.add_row({"1", "x"});
  t.add_row({"2", "y"});
  CHECK_THROWS_AS(t.add_row({"3"}), DomainError);
  std::ostringstream os;
  write_csv(os, t, "tool 1.0 hash=abc");
  CHECK(os.str() == "# tool 1.0 hash=abc\na,b\n1,x\n2,y\n");
  std::ostringstream bare;
  write_csv(bare, t);
  CHECK(bare.str() == "a,b\n1,x\n2,y\n");
}

TEST_CASE("parallel_for visits every index once") {
  for (unsigned threads : {0u, 1u, 3u, 16u}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL("called"); });
  CHECK_THROWS_AS(parallel_for(50, 4,
                               [](std::size_t i) {
                                 if (i == 17) throw DomainError("boom");
                               }),
                  DomainError);
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) == 0);
  setenv("IONCOOL_THREADS", "5", 1);
  CHECK(resolve_threads(-1) == 5);
  CHECK(resolve_threads(2) == 2);
  setenv("IONCOOL_THREADS", "junk", 1);
  CHECK(resolve_threads(-1) == 0);
  unsetenv("IONCOOL_THREADS");
  CHECK(resolve_threads(-1) == 0);
}

TEST_CASE("defaults load and are typed") {
  const RunConfig cfg = load_config(std::nullopt, {});
  CHECK(cfg.number("mass_u") == 171);
  CHECK(cfg.integer("chain.n_ions") == 15);
  CHECK(cfg.string("damping.method") == "exact-eigen");
  CHECK(cfg.integers("chain.coolant_labels") == std::vector<int>{-1, 0});
  CHECK_FALSE(cfg.number_or_auto("heating.D").has_value());
  CHECK_THROWS_AS(cfg.number("damping.method"), ConfigError);
  CHECK_THROWS_AS(cfg.integer("trap.x2"), ConfigError);
  CHECK_THROWS_AS(cfg.number("nope.nothing"), ConfigError);
}

TEST_CASE("overrides") {
  const RunConfig cfg = load_config(
      std::nullopt, {"heating.D=2e-5", "chain.coolant_labels=[3,4]", "damping.method=perturbative"});
  CHECK(cfg.number_or_auto("heating.D").value() == 2e-5);
  CHECK(cfg.integers("chain.coolant_labels") == std::vector<int>{3, 4});
  CHECK(cfg.string("damping.method") == "perturbative");
  CHECK(load_config(std::nullopt, {"heating.D=auto"}).number_or_auto("heating.D") == std::nullopt);

  CHECK_THROWS_AS(load_config(std::nullopt, {"heating.E=1"}), ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, {"trap.x2=fast"}), ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, {"trap=1"}), ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, {"chain.coolant_labels=[\"a\"]"}), ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, {"heating.D=true"}), ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, {"novalue"}), ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, {"a..b=1"}), ConfigError);
}

TEST_CASE("config files") {
  const std::string path = "ioncool_test_config.json";
  {
    std::ofstream out(path);
    out << "// comment\n{\"trap\": {\"x2\": 0.002}, \"chain\": {\"n_ions\": 9}}\n";
  }
  const RunConfig cfg = load_config(path, {"chain.n_ions=11"});
  CHECK(cfg.number("trap.x2") == 0.002);
  CHECK(cfg.number("trap.x4") == 0.00177);
  CHECK(cfg.integer("chain.n_ions") == 11);
  {
    std::ofstream out(path);
    out << "{\"trap\": {\"x3\": 1}}";
  }
  CHECK_THROWS_AS(load_config(path, {}), ConfigError);
  {
    std::ofstream out(path);
    out << "{not json";
  }
  CHECK_THROWS_AS(load_config(path, {}), ConfigError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config(path, {}), ConfigError);
}

TEST_CASE("config hash") {
  const RunConfig a = load_config(std::nullopt, {});
  const RunConfig b = load_config(std::nullopt, {"trap.x2=0.00188"});
  CHECK(a.hash("modes") == b.hash("modes"));
  CHECK(a.hash("modes") != a.hash("equilibrium"));
  CHECK(a.hash("modes") != load_config(std::nullopt, {"trap.x2=0.0019"}).hash("modes"));
  CHECK(a.hash("modes").size() == 16);
}
