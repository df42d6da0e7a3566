#include "doctest.h"
#include "oracles.hpp"

#include "json.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#ifndef RATDYN_BIN
#error "RATDYN_BIN must point at the ratdyn executable"
#endif

namespace {

std::pair<int, std::string> ratdyn(const std::string& args) {
  return oracle::run(std::string(RATDYN_BIN) + " " + args + " 2>/dev/null");
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("simulate: trivial orbit prints six values of 1") {
  const auto [code, out] = ratdyn("simulate --p 1 --q 1 --r 0 --x0 1 --x1 1 --steps 5");
  CHECK(code == 0);
  const auto ls = lines(out);
  REQUIRE(ls.size() == 7);
  CHECK(ls[0] == "index,value");
  for (int i = 1; i <= 6; ++i) CHECK(ls[i] == std::to_string(i - 1) + ",1");
}

TEST_CASE("simulate: the auxiliary pair is not a 2-cycle, the prime pair is") {
  {
    const auto [code, out] = ratdyn("simulate --p 9 --q 0.5 --r 2 --x0 2.7085 --x1 13.2915 --steps 100");
    CHECK(code == 0);
    const auto ls = lines(out);
    REQUIRE(ls.size() == 102);
    const double last = std::stod(ls.back().substr(ls.back().find(',') + 1));
    const double ybar = (10 + std::sqrt(100 + 4 * 2 * 1.5)) / 3;
    CHECK(last == doctest::Approx(ybar).epsilon(1e-8));
  }
  {
    const auto [code, pair] = ratdyn("period2 --prime --p 0.1 --q 10 --r 1");
    CHECK(code == 0);
    const std::string m = pair.substr(0, pair.find(',')), M = pair.substr(pair.find(',') + 1, pair.size() - pair.find(',') - 2);
    const auto [c2, out] = ratdyn("simulate --p 0.1 --q 10 --r 1 --x0 " + m + " --x1 " + M + " --steps 100 --format json");
    CHECK(c2 == 0);
    const auto j = nlohmann::json::parse(out);
    CHECK(j.at("limit").at("kind") == "PeriodTwo");
    const auto& v = j.at("values");
    for (std::size_t i = 2; i < v.size(); ++i)
      CHECK(std::abs(v[i].get<double>() - v[i - 2].get<double>()) < 1e-10);
  }
}

TEST_CASE("simulate: six-parameter form") {
  const auto [code, out] = ratdyn("simulate --alpha 1 --beta 1 --gamma 1 --A 1 --B 1 --C 1 --x0 1 --x1 2 --steps 3");
  CHECK(code == 0);
  const auto ls = lines(out);
  REQUIRE(ls.size() == 5);
  CHECK(ls[3] == "2,1");  // (1 + 2 + 1) / (1 + 2 + 1)
  const auto [c2, js] = ratdyn("simulate --alpha 1 --beta 1 --gamma 1 --A 1 --B 1 --C 1 --x0 1 --x1 2 --steps 300 --format json");
  CHECK(c2 == 0);
  const auto j = nlohmann::json::parse(js);
  CHECK(j.at("limit").at("kind") == "Equilibrium");
  CHECK(j.at("values").back().get<double>() == doctest::Approx(1.0));
}

TEST_CASE("exit codes") {
  CHECK(ratdyn("simulate --p -1 --q 1 --r 0").first == 2);
  CHECK(ratdyn("simulate --p 1 --q 1").first == 1);
  CHECK(ratdyn("simulate --bogus").first == 1);
  CHECK(ratdyn("").first == 1);
  CHECK(ratdyn("simulate --p 1 --q 1 --r 1 --alpha 1").first == 1);
  CHECK(ratdyn("simulate --p 1 --q 1 --r 1 --format xml").first == 1);
  CHECK(ratdyn("simulate --alpha 1 --beta 1 --gamma 1 --A 1 --B 0 --C 0").first == 2);
  CHECK(ratdyn("certify --claim nonsense").first == 1);
  CHECK(ratdyn("certify --claim claim3 --subcase Q9").first == 1);
  CHECK(ratdyn("sweep --p-steps 0").first == 1);
  CHECK(ratdyn("--help").first == 0);
}

TEST_CASE("analyze, period2, interval") {
  {
    const auto [code, out] = ratdyn("analyze --p 9 --q 0.5 --r 2");
    CHECK(code == 0);
    const auto j = nlohmann::json::parse(out);
    CHECK(j.at("behavior").at("prediction") == "AllConvergeToEquilibrium");
    CHECK(j.at("stability").contains("las"));
    CHECK(j.at("envelope").contains("hi"));
  }
  {
    const auto [code, out] = ratdyn("analyze --alpha 0.1 --beta 3 --gamma 1 --A 2 --B 1 --C 1");
    CHECK(code == 0);
    const auto j = nlohmann::json::parse(out);
    CHECK(j.at("params").at("form") == "3-2-L");
    CHECK(j.at("transformed_map").at("holds") == true);
  }
  CHECK(ratdyn("analyze --p 2 --q 1 --r 0.5 --L 0.5").first == 0);
  CHECK(ratdyn("period2 --p 9 --q 0.5 --r 2").second == "2.7084973778708186,13.291502622129181\n");
  CHECK(ratdyn("period2 --p 0.5 --q 0.5 --r 2").second == "none\n");
  {
    const auto [code, out] = ratdyn("interval --p 2 --q 2 --r 1");
    CHECK(code == 0);
    const auto ls = lines(out);
    CHECK(ls[0] == "level,m,M");
    CHECK(ls.size() > 2);
  }
}

TEST_CASE("certify writes a report with the summary fields") {
  const auto [code, out] = ratdyn("certify --claim a-coeffs --samples 50");
  CHECK(code == 0);
  const auto j = nlohmann::json::parse(out);
  CHECK(j.at("verdict") == "AllCoefficientsNonnegative");
  CHECK(j.at("n_terms") == 19);
  CHECK(j.at("n_negative") == 0);
  CHECK(j.contains("min_coeff"));
  CHECK(j.contains("wall_time"));
  const auto [c2, o2] = ratdyn("certify --claim cubic --no-timing");
  CHECK(c2 == 0);
  const auto j2 = nlohmann::json::parse(o2);
  CHECK_FALSE(j2.contains("wall_time"));
  CHECK(j2.at("informational")[0].at("verdict") == "Refuted");
}

TEST_CASE("sweep: 5x5x5 grid gives 125 rows") {
  const auto [code, out] = ratdyn(
      "sweep --p-min 0.5 --p-max 2 --p-steps 5 --q-min 0.5 --q-max 2 --q-steps 5 --r-min 0 --r-max 4 --r-steps 5 "
      "--orbits 3");
  CHECK(code == 0);
  const auto ls = lines(out);
  REQUIRE(ls.size() == 126);
  CHECK(ls[0].rfind("p,q,r,branch,prediction,", 0) == 0);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    // Fields after the quoted branch: prediction, n_equilibrium, n_period_two, ...
    std::istringstream tail(ls[i].substr(ls[i].rfind('"') + 2));
    std::vector<std::string> f;
    for (std::string x; std::getline(tail, x, ',');) f.push_back(x);
    REQUIRE(f.size() >= 4);
    CHECK(std::stoi(f[1]) + std::stoi(f[2]) + std::stoi(f[3]) == 3);
    const double p = std::stod(ls[i]), q = std::stod(ls[i].substr(ls[i].find(',') + 1));
    if (!(p < 1 && q > 1)) CHECK(f[2] == "0");
  }
}

TEST_CASE("validate-theorem is byte-identical across thread counts") {
  const std::string args = "validate-theorem --cells 20 --orbits 5 --seed 9 --no-timing";
  const auto a = ratdyn(args + " --threads 1");
  const auto b = ratdyn(args + " --threads 3");
  CHECK(a.first == 0);
  CHECK(a.second == b.second);
  const auto j = nlohmann::json::parse(a.second);
  CHECK(j.at("report").at("n_instances") == 100);
  CHECK(j.at("config").at("seed") == 9);
}
