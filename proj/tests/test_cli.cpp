// Copyright (c) 2026 the spacings developers.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run_cli(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string("\"") + SPACINGS_CLI_PATH + "\" " + args +
                    (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  RunResult res;
  if (pipe == nullptr) return res;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
  int rc = pclose(pipe);
  res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("plain output carries the exact fraction and its decimal") {
  auto r = run_cli("sf --n 2 --k 3 --x 1/2 --format plain");
  CHECK(r.status == 0);
  CHECK(r.out == "3/4 = 0.75\n");

  CHECK(run_cli("mean --n 9 --k 1").out == "1/100 = 0.01\n");
  CHECK(run_cli("band --n 1 --m 2 --x 1/4").out == "1/2 = 0.5\n");
  CHECK(run_cli("pvalue --n 2 --ell 1 --x 0.9").out == "3/100 = 0.03\n");
}

TEST_CASE("maxsf is byte-for-byte the rank n+1 survival") {
  // plain output carries no query echo: full byte equality, single x and sweeps
  for (const char* tail : {"--x 0.35", "--x 17/20", "--grid \"1/20:19/20:1/20\""}) {
    auto a = run_cli(std::string("maxsf --n 6 ") + tail);
    auto b = run_cli(std::string("sf --n 6 --k 7 ") + tail);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
  }
  // structured formats echo the op name; the result objects must still match
  auto a = run_cli("maxsf --n 6 --x 17/20 --format json");
  auto b = run_cli("sf --n 6 --k 7 --x 17/20 --format json");
  auto ja = nlohmann::json::parse(a.out);
  auto jb = nlohmann::json::parse(b.out);
  CHECK(ja["result"] == jb["result"]);
  CHECK(ja["query"]["k"] == jb["query"]["k"]);
}

TEST_CASE("json round-trips: re-querying the echoed query reproduces the value") {
  auto first = run_cli("sf --n 4 --k 2 --x 0.15 --format json");
  REQUIRE(first.status == 0);
  auto j = nlohmann::json::parse(first.out);
  CHECK(j["query"]["op"] == "sf");
  CHECK(j["query"]["x"] == "3/20");
  CHECK(j["query"]["m"] == 3);
  CHECK(j["query"]["ell"] == 4);
  std::string exact = j["result"]["exact"];

  auto again = run_cli("sf --n 4 --k 2 --x " + std::string(j["query"]["x"]) + " --format json");
  auto j2 = nlohmann::json::parse(again.out);
  CHECK(std::string(j2["result"]["exact"]) == exact);
}

TEST_CASE("csv has the fixed column order") {
  auto r = run_cli("band --n 3 --m 1 --x 0.25 --format csv");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("op,n,k,m,ell,x,p,result_exact,result_decimal,mode,error_bound,condition,"
                    "fallback\n", 0) == 0);
  CHECK(r.out.find("band,3,3,1,2,1/4,,") != std::string::npos);
}

TEST_CASE("grid sweeps are monotone where the theory demands") {
  auto r = run_cli("sf --n 5 --k 4 --grid \"1/50:49/50:1/50\" --format json");
  REQUIRE(r.status == 0);
  auto arr = nlohmann::json::parse(r.out);
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 49);
  double prev = 2.0;
  for (const auto& rec : arr) {
    double v = std::stod(std::string(rec["result"]["decimal"]));
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("usage errors exit 2 and name the valid range") {
  CHECK(run_cli("sf --n 2 --k 3").status == 2);            // no --x
  CHECK(run_cli("sf --n 2 --k 3 --x zebra").status == 2);  // malformed threshold
  CHECK(run_cli("nonsense").status == 2);
  auto r = run_cli("sf --n 5 --k 9 --x 1/2", true);
  CHECK(r.status == 2);
  CHECK(r.out.find("[0, 7]") != std::string::npos);
  auto b = run_cli("band --n 3 --m 7 --x 1/2", true);
  CHECK(b.status == 2);
  CHECK(b.out.find("[0, 4]") != std::string::npos);
}

TEST_CASE("float mode reports diagnostics; strict mode signals fallback via exit 3") {
  auto r = run_cli("sf --n 2 --k 3 --x 0.5 --float --format json");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["result"]["mode"] == "float");
  CHECK_FALSE(j["result"].contains("exact"));
  CHECK(j["diagnostics"]["fallback"] == false);
  CHECK(double(j["diagnostics"]["condition"]) >= 1.0);

  auto fb = run_cli("sf --n 80 --k 81 --x 0.001 --float --format json");
  CHECK(fb.status == 0);
  auto jfb = nlohmann::json::parse(fb.out);
  CHECK(jfb["result"]["mode"] == "float-fallback-exact");

  auto strict = run_cli("sf --n 80 --k 81 --x 0.001 --float --strict");
  CHECK(strict.status == 3);

  // strict without fallback is still a success
  CHECK(run_cli("sf --n 2 --k 3 --x 0.5 --float --strict").status == 0);
}

TEST_CASE("quantile returns the critical value") {
  auto r = run_cli("quantile --n 2 --k 3 --p 3/4 --format json");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  double x = std::stod(std::string(j["result"]["decimal"]));
  CHECK(x == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(j["query"]["p"] == "3/4");
}

TEST_CASE("simulate emits the report schema and ignores the stream count") {
  auto a = run_cli("simulate --n 2 --samples 40000 --seed 9 --x 1/2 --with-exact --format json");
  REQUIRE(a.status == 0);
  auto ja = nlohmann::json::parse(a.out);
  CHECK(ja["meta"]["seed"] == 9);
  CHECK(ja["queries"].size() > 0);

  auto b = run_cli(
      "simulate --n 2 --samples 40000 --seed 9 --x 1/2 --with-exact --streams 8 --format json");
  auto jb = nlohmann::json::parse(b.out);
  for (std::size_t i = 0; i < ja["queries"].size(); ++i) {
    CHECK(ja["queries"][i]["estimate"] == jb["queries"][i]["estimate"]);
  }
}

TEST_CASE("verify runs the cross-check battery end to end") {
  auto r = run_cli("verify --nmax 2 --samples 30000 --seed 4 --format json");
  CHECK(r.status == 0);
  auto arr = nlohmann::json::parse(r.out);
  REQUIRE(arr.is_array());
  CHECK(arr.size() == 4);  // two representations x n in {1,2}
  for (const auto& rep : arr) {
    for (const auto& q : rep["queries"]) {
      CHECK((q.contains("z") || q.contains("error")));
    }
  }

  // an absurd |z| ceiling turns the same healthy run into exit code 4
  auto breach = run_cli("verify --nmax 1 --samples 20000 --seed 4 --max-abs-z 0.000001");
  CHECK(breach.status == 4);
}

TEST_CASE("simulate defaults to the mean battery when no queries are given") {
  auto r = run_cli("simulate --n 3 --samples 20000 --seed 6 --rep expratio --format json");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["meta"]["representation"] == "exponential-ratio");
  REQUIRE(j["queries"].size() == 4);  // means for k = 1..n+1
  for (const auto& q : j["queries"]) CHECK(q["query"]["kind"] == "mean");
}

TEST_CASE("output lands in --out file") {
  std::string path = "/tmp/spacings_cli_out_test.txt";
  std::remove(path.c_str());
  auto r = run_cli("sf --n 2 --k 3 --x 1/2 --out " + path);
  CHECK(r.status == 0);
  CHECK(r.out.empty());
  FILE* f = fopen(path.c_str(), "r");
  REQUIRE(f);
  char buf[64] = {0};
  REQUIRE(fgets(buf, sizeof buf, f));
  fclose(f);
  CHECK(std::string(buf) == "3/4 = 0.75\n");
  std::remove(path.c_str());
}

}  // TEST_SUITE
