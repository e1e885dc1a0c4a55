#include "allpay/reports.hpp"

#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

using namespace allpay::reports;
using json = nlohmann::ordered_json;

namespace {

Report run_cmd(std::string command, Params params)
{
  return run(Request{std::move(command), std::move(params)});
}

json body_json(Report const &r)
{
  return json::parse(r.body);
}

std::vector<std::vector<std::string>> csv_rows(std::string const &body)
{
  std::vector<std::vector<std::string>> rows;
  std::istringstream                    in(body);
  std::string                           line;
  while (std::getline(in, line))
  {
    if (line.empty() || line[0] == '#')
    {
      continue;
    }
    std::vector<std::string> cells;
    std::string              cell;
    std::istringstream       ls(line);
    while (std::getline(ls, cell, ','))
    {
      cells.push_back(cell);
    }
    if (line.back() == ',')
    {
      cells.emplace_back();
    }
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(std::vector<std::string> const &header, std::string const &name)
{
  for (std::size_t i = 0; i < header.size(); ++i)
  {
    if (header[i] == name)
    {
      return i;
    }
  }
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("number formatting keeps 17 significant digits")
{
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(std::nan("")).empty());
  CHECK(std::stod(format_number(std::exp(-1.0))) == std::exp(-1.0));
  CHECK(dump_json(json{{"x", 0.1}}, 0).find("0.10000000000000001") != std::string::npos);
  CHECK(dump_json(json{{"x", std::nan("")}}).find("null") != std::string::npos);
}

TEST_CASE("range parsing")
{
  CHECK(parse_range("0.5") == std::vector<double>{0.5});
  CHECK(parse_range("1,2,4") == std::vector<double>{1.0, 2.0, 4.0});
  auto const r = parse_range("0.1:0.9:0.1");
  CHECK(r.size() == 9);
  CHECK(r.back() == doctest::Approx(0.9));
  CHECK(parse_range("1:0:1").empty());
  CHECK_THROWS_AS(parse_range("1:2"), UsageError);
  CHECK_THROWS_AS(parse_range("0:1:0"), UsageError);
  CHECK_THROWS_AS(parse_range("a,b"), UsageError);
}

TEST_CASE("equilibrium report examples")
{
  auto const r2 = run_cmd("equilibrium", {{"n", "2"}, {"theta", "0.8"}, {"b", "0.6"}});
  REQUIRE(r2.exit_code == exit_ok);
  auto const j2 = body_json(r2);
  CHECK(j2["region"] == "R2");
  CHECK(j2["mu"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));

  auto const r3 = run_cmd("equilibrium", {{"n", "3"}, {"theta", "0.5"}, {"b", "0.5"}});
  auto const j3 = body_json(r3);
  CHECK(j3["region"] == "R3");
  CHECK(j3["mu"].is_null());
  CHECK(j3["all_pay"]["pi"].get<double>() == 1.0);
  CHECK(j3["all_pay"]["pi"].get<double>() > j3["standard"]["pi"].get<double>());
  CHECK(j3["payoff_comparison"]["all_pay_revenue_higher"] == true);
  CHECK(j3["manifest"]["command"] == "equilibrium");

  auto const bad = run_cmd("equilibrium", {{"n", "2"}, {"theta", "0.5"}, {"b", "1.5"}});
  CHECK(bad.exit_code == exit_usage);
  CHECK(bad.diagnostic.find("b must lie in (0,1)") != std::string::npos);
  CHECK(bad.body.empty());

  CHECK(run_cmd("equilibrium", {{"n", "2"}, {"theta", "0.5"}}).exit_code == exit_usage);
  CHECK(run_cmd("equilibrium", {{"n", "x"}, {"theta", "0.5"}, {"b", "0.5"}}).exit_code == exit_usage);
  CHECK(run_cmd("nonsense", {}).exit_code == exit_usage);
}

TEST_CASE("bid CDF table examples")
{
  auto const r = run_cmd("bidcdf", {{"n", "2"}, {"theta", "0.5"}, {"b", "0.6"}});
  REQUIRE(r.exit_code == exit_ok);
  CHECK(r.body.rfind("# manifest: ", 0) == 0);
  auto const rows = csv_rows(r.body);
  REQUIRE(rows.size() > 100);
  CHECK(rows[0] == std::vector<std::string>{"bid", "G_l", "G_h", "atom_l", "atom_h"});
  bool seen = false;
  for (auto const &row : rows)
  {
    if (row[0] == "0.25")
    {
      seen = true;
      CHECK(std::stod(row[1]) == doctest::Approx(0.5));
      CHECK(std::stod(row[2]) == 0.0);
    }
  }
  CHECK(seen);
  CHECK(std::stod(rows[1][0]) == 0.0);
  CHECK(std::stod(rows[1][1]) == 0.0);
  CHECK(std::stod(rows[1][2]) == 0.0);
  CHECK(std::stod(rows.back()[1]) == 1.0);
  CHECK(std::stod(rows.back()[2]) == doctest::Approx(1.0).epsilon(1e-15));

  auto const r2  = run_cmd("bidcdf", {{"n", "2"}, {"theta", "0.8"}, {"b", "0.6"}, {"points", "11"}});
  auto const tab = csv_rows(r2.body);
  int        atoms = 0;
  for (std::size_t i = 1; i < tab.size(); ++i)
  {
    if (std::stod(tab[i][3]) > 0.0)
    {
      ++atoms;
      CHECK(tab[i][0] == format_number(0.6));
      CHECK(std::stod(tab[i][3]) == doctest::Approx(0.5));
    }
  }
  CHECK(atoms == 1);

  CHECK(run_cmd("bidcdf", {{"n", "2"}, {"theta", "0.5"}, {"b", "0.6"}, {"points", "1"}}).exit_code ==
        exit_usage);
  CHECK(run_cmd("bidcdf", {{"n", "2"}, {"theta", "0"}, {"b", "0.6"}}).exit_code == exit_usage);
}

TEST_CASE("simulate report")
{
  Params const p{{"format", "allpay"}, {"n", "3"}, {"theta", "0.5"}, {"b", "0.5"}, {"reps", "1000000"}};
  auto const   r = run_cmd("simulate", p);
  REQUIRE(r.exit_code == exit_ok);
  auto const j = body_json(r);
  CHECK(j["manifest"]["seed"].get<std::uint64_t>() == 20240917u);
  for (auto const &t : j["targets"])
  {
    CHECK(std::abs(t["z_score"].get<double>()) <= 3.0);
  }
  CHECK(j["targets"][2]["target"] == "pi");
  CHECK(j["targets"][2]["analytic"].get<double>() == 1.0);

  CHECK(run_cmd("simulate", p).body == r.body);

  auto tampered           = p;
  tampered["inject-bias"] = "0.01";
  auto const bad          = run_cmd("simulate", tampered);
  CHECK(bad.exit_code == exit_statistical_breach);
  CHECK_FALSE(bad.body.empty());

  auto few    = p;
  few["reps"] = "100";
  CHECK(run_cmd("simulate", few).exit_code == exit_usage);

  auto const market = run_cmd("simulate", {{"lambda", "1"}, {"sigma", "0.2"}, {"b", "0.5"}, {"reps", "100000"}});
  REQUIRE(market.exit_code == exit_ok);
  CHECK(body_json(market)["mode"] == "market");
}

TEST_CASE("market report")
{
  auto const r = run_cmd("market", {{"lambda", "1"}, {"sigma", "0.2"}, {"b", "0.5"}});
  REQUIRE(r.exit_code == exit_ok);
  auto const j = body_json(r);
  CHECK(j["equilibrium"]["profit"].get<double>() == doctest::Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(j["equilibrium"]["reserve_star"].get<double>() == 0.0);
  CHECK(std::abs(j["deviation_to_standard"]["gain"].get<double>()) <= 1e-9);
  CHECK(j["deviation_to_allpay"]["profit_gain"].get<double>() > 0.0);

  auto const v = run_cmd("market", {{"lambda", "1"}, {"sigma", "0.6"}, {"b", "0.5"}});
  CHECK(v.exit_code == exit_hypothesis_violated);
  CHECK(body_json(v)["equilibrium"].is_null());
  CHECK_FALSE(v.diagnostic.empty());
}

TEST_CASE("deviate report")
{
  auto const r = run_cmd("deviate", {{"lambda", "1"}, {"sigma", "0.3"}, {"b", "0.5"}, {"r", "0.3"}});
  REQUIRE(r.exit_code == exit_ok);
  auto const d = body_json(r)["deviation"];
  CHECK(d["status"] == "ok");
  CHECK(d["theta_hat"].get<double>() > 0.3);
  CHECK(d["r_hat"].get<double>() < 0.3);
  CHECK(d["profit_gain"].get<double>() > 0.0);
  CHECK(body_json(run_cmd("deviate", {{"lambda", "1"}, {"sigma", "0.3"}, {"b", "0.5"}, {"r", "0"}}))
            ["deviation"]["status"] == "subsidy_required");
}

TEST_CASE("sweep report")
{
  SUBCASE("27-point grid")
  {
    auto const r = run_cmd("sweep", {{"lambda", "0.5:1.5:0.5"}, {"sigma", "0.1,0.3,0.5"}, {"b", "0.2:0.6:0.2"}});
    REQUIRE(r.exit_code == exit_ok);
    auto const rows = csv_rows(r.body);
    REQUIRE(rows.size() == 28);
    auto const &h = rows[0];
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
      CHECK(rows[i].size() == h.size());
      CHECK(std::stoul(rows[i][column(h, "index")]) == i - 1);
      CHECK(std::abs(std::stod(rows[i][column(h, "identity_residual_standard")])) < 1e-9);
      CHECK(std::abs(std::stod(rows[i][column(h, "identity_residual_allpay")])) < 1e-9);
    }
  }
  SUBCASE("empty grid gives a header")
  {
    auto const r = run_cmd("sweep", {{"lambda", "1:0:1"}});
    REQUIRE(r.exit_code == exit_ok);
    CHECK(csv_rows(r.body).size() == 1);
  }
  SUBCASE("atom column only in R2")
  {
    auto const r    = run_cmd("sweep", {{"n", "2,3"}, {"theta", "0.2:0.9:0.1"}, {"b", "0.1:0.9:0.2"}});
    auto const rows = csv_rows(r.body);
    auto const &h   = rows[0];
    int         r2  = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
      bool const in_r2 = rows[i][column(h, "region")] == "R2";
      CHECK(in_r2 != rows[i][column(h, "mu")].empty());
      r2 += in_r2;
    }
    CHECK(r2 > 0);
  }
  SUBCASE("JSON rows")
  {
    auto const r = run_cmd("sweep", {{"b", "0.3,0.7"}, {"out", "grid.json"}});
    REQUIRE(r.exit_code == exit_ok);
    auto const j = body_json(r);
    CHECK(j["rows"].size() == 2);
    CHECK(j["manifest"]["params"].contains("out") == false);
  }
  SUBCASE("invalid grid")
  {
    CHECK(run_cmd("sweep", {{"b", "0:1:0.5"}}).exit_code == exit_usage);
    CHECK(run_cmd("sweep", {{"n", "2.5"}}).exit_code == exit_usage);
  }
}

TEST_CASE("manifest replays the run")
{
  Params const p{{"n", "4"}, {"theta", "0.7"}, {"b", "0.2"}, {"reps", "20000"}, {"seed", "7"}};
  auto const   first = run_cmd("simulate", p);
  auto const   m     = extract_manifest(first.body);
  CHECK(m.command == "simulate");
  CHECK(m.seed == 7u);
  CHECK(m.params.at("format") == "allpay");
  CHECK(run(m.request()).body == first.body);

  auto const table = run_cmd("bidcdf", {{"n", "3"}, {"theta", "0.6"}, {"b", "0.2"}});
  CHECK(run(extract_manifest(table.body).request()).body == table.body);

  auto const back = RunManifest::from_json(m.to_json());
  CHECK(back.params == m.params);
  CHECK(back.version == m.version);
}
