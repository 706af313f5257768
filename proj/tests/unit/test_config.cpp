#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fast/config.hpp"
#include "fast/error.hpp"

using namespace fast;

TEST_CASE("defaults") {
  auto c = Config::defaults();
  CHECK(c.bind() == "127.0.0.1:8080");
  CHECK(c.packages.size() == 4);
  CHECK(c.depth == 8);
  CHECK(c.map_workers >= 1);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("merge and bind") {
  auto c = Config::defaults();
  c.merge(Value::parse(R"({"bind":"0.0.0.0:9000","packages":["pricer"],"depth":3,"check_purity":true})"));
  CHECK(c.host == "0.0.0.0");
  CHECK(c.port == 9000);
  CHECK(c.packages == std::vector<std::string>{"pricer"});
  CHECK(c.depth == 3);
  CHECK(c.check_purity);
  CHECK_THROWS_AS(c.merge(Value::parse(R"({"colour":"blue"})")), Error);
  CHECK_THROWS_AS(c.merge(Value::parse(R"({"depth":"deep"})")), Error);
  CHECK_THROWS_AS(c.set_bind("nohost"), Error);
  CHECK_THROWS_AS(c.set_bind("h:99999"), Error);
}

TEST_CASE("validate") {
  auto c = Config::defaults();
  c.packages = {"nope"};
  CHECK_THROWS_AS(c.validate(), Error);
  c = Config::defaults();
  c.depth = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = Config::defaults();
  c.max_bytes = 10;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("merge_file") {
  auto file = std::filesystem::temp_directory_path() / "fast_config_test.json";
  std::ofstream(file) << R"({"bind":"127.0.0.1:0","store":"/tmp/x.json","max_bytes":4096})";
  auto c = Config::defaults();
  c.merge_file(file);
  CHECK(c.port == 0);
  CHECK(c.store_file == std::filesystem::path("/tmp/x.json"));
  CHECK(c.max_bytes == 4096);
  std::ofstream(file) << "{";
  CHECK_THROWS_AS(c.merge_file(file), Error);
  std::filesystem::remove(file);
  CHECK_THROWS_AS(c.merge_file(file), Error);
}
