#include "allpay/reports.hpp"

#include "allpay/auction_core.hpp"
#include "allpay/errors.hpp"
#include "allpay/market_search.hpp"
#include "allpay/montecarlo.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

namespace allpay::reports {
namespace {

using json = nlohmann::ordered_json;

constexpr std::int64_t  kDefaultReps = 1'000'000;
constexpr std::uint64_t kDefaultSeed = 20240917;

void dump_into(json const &j, std::string &out, int indent, int depth)
{
  std::string const pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  std::string const close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type())
  {
  case json::value_t::object:
  {
    if (j.empty())
    {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it)
    {
      if (!first)
      {
        out += ",\n";
      }
      first = false;
      out += pad + json(it.key()).dump() + ": ";
      dump_into(it.value(), out, indent, depth + 1);
    }
    out += "\n" + close + "}";
    return;
  }
  case json::value_t::array:
  {
    if (j.empty())
    {
      out += "[]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i)
    {
      if (i > 0)
      {
        out += ",\n";
      }
      out += pad;
      dump_into(j[i], out, indent, depth + 1);
    }
    out += "\n" + close + "]";
    return;
  }
  case json::value_t::number_float:
  {
    double const v = j.get<double>();
    out += std::isfinite(v) ? format_number(v) : "null";
    return;
  }
  default:
    out += j.dump();
    return;
  }
}

// ---- parameter access ------------------------------------------------------

class Args
{
public:
  explicit Args(Params params)
    : params_(std::move(params))
  {}

  bool has(std::string const &key) const
  {
    return params_.count(key) > 0;
  }

  void default_to(std::string const &key, std::string value)
  {
    params_.emplace(key, std::move(value));
  }

  std::string const &text(std::string const &key) const
  {
    auto it = params_.find(key);
    if (it == params_.end())
    {
      throw UsageError("missing required flag --" + key);
    }
    return it->second;
  }

  double real(std::string const &key) const
  {
    auto const &s     = text(key);
    double      value = 0.0;
    auto [ptr, ec]    = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
    {
      throw UsageError("--" + key + " expects a number, got '" + s + "'");
    }
    return value;
  }

  std::int64_t integer(std::string const &key) const
  {
    auto const  &s     = text(key);
    std::int64_t value = 0;
    auto [ptr, ec]     = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
    {
      throw UsageError("--" + key + " expects an integer, got '" + s + "'");
    }
    return value;
  }

  std::uint64_t seed() const
  {
    auto const   &s     = text("seed");
    std::uint64_t value = 0;
    auto [ptr, ec]      = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
    {
      throw UsageError("--seed expects an unsigned integer, got '" + s + "'");
    }
    return value;
  }

  Params const &params() const
  {
    return params_;
  }

private:
  Params params_;
};

void require(bool ok, std::string const &message)
{
  if (!ok)
  {
    throw UsageError(message);
  }
}

AuctionScene scene_from(Args const &args)
{
  auto const n     = args.integer("n");
  double const theta = args.real("theta");
  double const b     = args.real("b");
  require(n >= 2 && n <= 10000, "n must be an integer >= 2");
  require(theta >= 0.0 && theta <= 1.0, "theta must lie in [0,1]");
  require(b > 0.0 && b < 1.0, "b must lie in (0,1)");
  return AuctionScene(static_cast<int>(n), theta, b);
}

MarketParams market_from(Args const &args)
{
  double const lambda = args.real("lambda");
  double const sigma  = args.real("sigma");
  double const b      = args.real("b");
  require(lambda > 0.0 && std::isfinite(lambda), "lambda must be positive");
  require(sigma >= 0.0 && sigma <= 1.0, "sigma must lie in [0,1]");
  require(b > 0.0 && b < 1.0, "b must lie in (0,1)");
  return MarketParams(lambda, sigma, b);
}

double reserve_from(Args const &args)
{
  double const r = args.real("r");
  require(r >= 0.0 && r <= 1.0, "r must lie in [0,1]");
  return r;
}

json payoffs_json(PayoffTriple const &p)
{
  return json{{"u_h", p.u_h}, {"u_l", p.u_l}, {"pi", p.pi}};
}

json support_json(BidDistribution const &d)
{
  json atoms = json::array();
  for (auto const &a : d.atoms())
  {
    atoms.push_back(json{{"location", a.location}, {"mass", a.mass}});
  }
  return json{{"lower", d.lower_support()}, {"upper", d.upper_support()}, {"atoms", atoms}};
}

// ---- subcommands -----------------------------------------------------------

json cmd_equilibrium(Args &args, Report &)
{
  auto const scene  = scene_from(args);
  auto const region = classify_region(scene);
  auto const ap     = allpay_payoffs(scene);
  auto const st     = standard_payoffs(scene);

  json out;
  out["scene"] = json{{"n", scene.bidders()}, {"theta", scene.theta()}, {"b", scene.budget()}};
  out["region"] = std::string(to_string(region.tag));
  out["thresholds"] = json{{"pooling", region.pooling_threshold},
                           {"extraction", region.extraction_threshold}};
  out["mu"] = region.tag == Region::r2 ? json(solve_atom_mu(scene)) : json(nullptr);

  auto const ap_strategies = equilibrium_strategies(scene, AuctionFormat::all_pay);
  auto const fp_strategies = equilibrium_strategies(scene, AuctionFormat::first_price);
  json all_pay             = payoffs_json(ap);
  all_pay["surplus_residual"] = surplus_residual(scene, ap);
  all_pay["high_bids"]        = support_json(ap_strategies.high);
  all_pay["low_bids"]         = support_json(ap_strategies.low);
  json standard               = payoffs_json(st);
  standard["surplus_residual"] = surplus_residual(scene, st);
  standard["high_bids_first_price"] = support_json(fp_strategies.high);
  standard["low_bids"]              = support_json(fp_strategies.low);
  out["all_pay"]  = all_pay;
  out["standard"] = standard;
  out["payoff_comparison"] = json{
      {"all_pay_u_h_lower", ap.u_h < st.u_h},
      {"all_pay_u_l_lower", ap.u_l < st.u_l},
      {"all_pay_revenue_higher", ap.pi > st.pi},
      {"revenue_gain", ap.pi - st.pi},
  };
  return out;
}

std::string cmd_bidcdf(Args &args, Report &report)
{
  auto const scene  = scene_from(args);
  auto const points = args.integer("points");
  require(points >= 2 && points <= 10'000'000, "points must be at least 2");
  if (scene.theta() <= 0.0 || scene.theta() >= 1.0)
  {
    throw UsageError("bidcdf needs theta in (0,1); at theta in {0,1} only one type bids");
  }
  auto const profile = allpay_bid_cdfs(scene);

  double const lo = std::min(profile.low.lower_support(), profile.high.lower_support());
  double const hi = std::max(profile.low.upper_support(), profile.high.upper_support());
  std::set<double> bids;
  for (std::int64_t i = 0; i < points; ++i)
  {
    bids.insert(i + 1 == points ? hi : lo + (hi - lo) * static_cast<double>(i) / (points - 1));
  }
  for (auto const *dist : {&profile.low, &profile.high})
  {
    for (auto const &a : dist->atoms())
    {
      bids.insert(a.location);
    }
    for (auto const &s : dist->segments())
    {
      bids.insert(s.lower);
      bids.insert(s.upper);
    }
  }

  std::string out = "# manifest: " + report.manifest.to_json().dump() + "\n";
  out += "bid,G_l,G_h,atom_l,atom_h\n";
  for (double p : bids)
  {
    out += format_number(p) + "," + format_number(profile.low.eval(p)) + "," +
           format_number(profile.high.eval(p)) + "," +
           format_number(profile.low.atom_mass_at(p)) + "," +
           format_number(profile.high.atom_mass_at(p)) + "\n";
  }
  return out;
}

json target_json(SimEstimate const &e, double analytic, bool &breach)
{
  double const z      = e.z_score(analytic);
  double const a      = std::abs(z);
  std::string  status = a <= 3.0 ? "pass" : (a <= 4.0 ? "flag" : "fail");
  breach              = breach || a > 4.0;
  return json{{"target", e.target},       {"analytic", analytic},
              {"estimate", e.mean},       {"std_error", e.std_error},
              {"z_score", std::isfinite(z) ? json(z) : json(nullptr)},
              {"replications", e.replications}, {"status", status}};
}

json cmd_simulate(Args &args, Report &report)
{

  AuctionFormat format;
  try
  {
    format = parse_format(args.text("format"));
  }
  catch (DomainError const &e)
  {
    throw UsageError(e.what());
  }
  SimConfig config;
  config.replications = args.integer("reps");
  config.seed         = args.seed();
  require(config.replications >= 10'000, "reps must be at least 10000");
  double const bias = args.real("inject-bias");
  report.manifest.seed = config.seed;

  bool breach = false;
  json out;
  out["format"] = std::string(to_string(format));
  json targets  = json::array();

  if (args.has("lambda"))
  {
    auto const   params = market_from(args);
    double const r      = reserve_from(args);
    MechanismPosting const posting(format, r);
    auto const demand = DemandResponse::from_rates(params.high_rate(), params.low_rate());
    auto const u      = utilities(posting, demand, params.budget());
    double const pi   = profit_direct(posting, demand, params.budget());
    auto const est    = simulate_market(params, posting, demand, config);

    out["mode"]   = "market";
    out["market"] = json{{"lambda", params.lambda()}, {"sigma", params.sigma()},
                         {"b", params.budget()},      {"r", r}};
    targets.push_back(target_json(est.u_h, u.high + bias, breach));
    targets.push_back(target_json(est.u_l, u.low + bias, breach));
    targets.push_back(target_json(est.profit, pi + bias, breach));
    targets.push_back(target_json(est.empty_share, poisson::z(0, demand.total()) + bias, breach));
    out["max_surplus_error"] = est.max_surplus_error;
  }
  else
  {
    auto const scene    = scene_from(args);
    auto const analytic = format == AuctionFormat::all_pay ? allpay_payoffs(scene) : standard_payoffs(scene);
    auto const est      = simulate_store(scene, format, config);

    out["mode"]  = "store";
    out["scene"] = json{{"n", scene.bidders()}, {"theta", scene.theta()}, {"b", scene.budget()}};
    targets.push_back(target_json(est.u_h, analytic.u_h + bias, breach));
    targets.push_back(target_json(est.u_l, analytic.u_l + bias, breach));
    targets.push_back(target_json(est.pi, analytic.pi + bias, breach));
    out["max_surplus_error"] = est.max_surplus_error;
  }
  out["targets"] = targets;
  if (breach)
  {
    report.exit_code  = exit_statistical_breach;
    report.diagnostic = "simulation disagrees with an analytic value by more than 4 standard errors";
  }
  return out;
}

json deviation_json(AllPayDeviation const &d)
{
  return json{{"status", std::string(to_string(d.status))},
              {"theta_hat", d.theta_hat},
              {"r_hat", d.r_hat},
              {"u_h_standard", d.u_h_standard},
              {"u_l_standard", d.u_l_standard},
              {"profit_standard", d.profit_standard},
              {"profit_allpay", d.profit_allpay},
              {"profit_gain", d.profit_gain},
              {"profit_gain_direct", d.profit_gain_direct},
              {"equation_residual", d.equation_residual}};
}

json cmd_market(Args &args, Report &report)
{
  auto const   params = market_from(args);
  double const r_s    = reserve_from(args);

  json out;
  out["market"] = json{{"lambda", params.lambda()}, {"sigma", params.sigma()}, {"b", params.budget()}};
  bool const hypothesis = params.budget() > params.sigma();
  out["hypothesis_b_gt_sigma"] = hypothesis;
  if (hypothesis)
  {
    auto const eq  = allpay_symmetric_equilibrium(params);
    auto const dev = standard_deviation_check(params);
    double const lambda = params.lambda();
    out["equilibrium"] = json{{"format", std::string(to_string(eq.format))},
                              {"omega_h", eq.omega_h},
                              {"omega_l", eq.omega_l},
                              {"reserve_star", eq.reserve_star},
                              {"profit", eq.profit},
                              {"profit_closed_form", 1.0 - poisson::z(0, lambda) - poisson::z(1, lambda)}};
    out["deviation_to_standard"] = json{{"best_reserve", dev.best_reserve},
                                        {"best_profit", dev.best_profit},
                                        {"equilibrium_profit", dev.equilibrium_profit},
                                        {"gain", dev.gain},
                                        {"x_h", dev.x_h},
                                        {"x_l", dev.x_l}};
  }
  else
  {
    out["equilibrium"] = nullptr;
    report.exit_code   = exit_hypothesis_violated;
    report.diagnostic  = "warning: b <= sigma, the all-pay equilibrium is not characterized here";
  }
  out["deviation_to_allpay"] = deviation_json(allpay_deviation_from_standard(params, r_s));
  out["deviation_to_allpay"]["r_s"] = r_s;
  return out;
}

json cmd_deviate(Args &args, Report &)
{
  auto const   params = market_from(args);
  double const r_s    = reserve_from(args);
  json out;
  out["market"]    = json{{"lambda", params.lambda()}, {"sigma", params.sigma()}, {"b", params.budget()}};
  out["r_s"]       = r_s;
  out["deviation"] = deviation_json(allpay_deviation_from_standard(params, r_s));
  return out;
}

// ---- sweep -----------------------------------------------------------------

struct SweepPoint
{
  double lambda, sigma, b, r;
  int    n;
  double theta;
};

constexpr std::array<char const *, 31> kSweepColumns = {
    "index",          "lambda",          "sigma",          "b",
    "r",              "n",               "theta",          "region",
    "mu",             "u_h_allpay",      "u_l_allpay",     "pi_allpay",
    "u_h_standard",   "u_l_standard",    "pi_standard",    "surplus_residual_allpay",
    "surplus_residual_standard",         "U_h_standard",   "U_l_standard",
    "Pi_standard",    "U_h_allpay",      "U_l_allpay",     "Pi_allpay",
    "identity_residual_standard",        "identity_residual_allpay",
    "allpay_dominates",                  "x_h",            "x_l",
    "z0",             "equilibrium_profit",              "equilibrium_exists"};

std::vector<std::string> sweep_row(std::size_t index, SweepPoint const &pt)
{
  AuctionScene const scene(pt.n, pt.theta, pt.b);
  auto const         region = classify_region(scene);
  auto const         ap     = allpay_payoffs(scene);
  auto const         st     = standard_payoffs(scene);

  MarketParams const market(pt.lambda, pt.sigma, pt.b);
  auto const demand = DemandResponse::from_rates(market.high_rate(), market.low_rate());
  MechanismPosting const standard(AuctionFormat::first_price, pt.r);
  MechanismPosting const allpay(AuctionFormat::all_pay, pt.r);
  auto const u_s  = utilities(standard, demand, pt.b);
  auto const u_a  = utilities(allpay, demand, pt.b);
  double const pi_s = profit_direct(standard, demand, pt.b);
  double const pi_a = profit_direct(allpay, demand, pt.b);
  bool const dominates = u_a.high < u_s.high && u_a.low < u_s.low && pi_a > pi_s;
  bool const symmetric = pt.b > pt.sigma;

  auto f = format_number;
  return {std::to_string(index),
          f(pt.lambda),
          f(pt.sigma),
          f(pt.b),
          f(pt.r),
          std::to_string(pt.n),
          f(pt.theta),
          std::string(to_string(region.tag)),
          region.tag == Region::r2 ? f(solve_atom_mu(scene)) : std::string(),
          f(ap.u_h),
          f(ap.u_l),
          f(ap.pi),
          f(st.u_h),
          f(st.u_l),
          f(st.pi),
          f(surplus_residual(scene, ap)),
          f(surplus_residual(scene, st)),
          f(u_s.high),
          f(u_s.low),
          f(pi_s),
          f(u_a.high),
          f(u_a.low),
          f(pi_a),
          f(profit_identity_residual(standard, demand, pt.b)),
          f(profit_identity_residual(allpay, demand, pt.b)),
          dominates ? "1" : "0",
          f(demand.x_h()),
          f(demand.x_l()),
          f(poisson::z(0, pt.lambda)),
          symmetric ? f(allpay_symmetric_equilibrium(market).profit) : std::string(),
          symmetric ? "1" : "0"};
}

std::string cmd_sweep(Args &args, Report &report)
{

  auto const lambdas = parse_range(args.text("lambda"));
  auto const sigmas  = parse_range(args.text("sigma"));
  auto const budgets = parse_range(args.text("b"));
  auto const reserves = parse_range(args.text("r"));
  auto const ns       = parse_range(args.text("n"));
  auto const thetas   = parse_range(args.text("theta"));

  std::vector<SweepPoint> grid;
  for (double lambda : lambdas)
    for (double sigma : sigmas)
      for (double b : budgets)
        for (double r : reserves)
          for (double n : ns)
            for (double theta : thetas)
            {
              require(lambda > 0.0, "lambda values must be positive");
              require(sigma >= 0.0 && sigma <= 1.0, "sigma values must lie in [0,1]");
              require(b > 0.0 && b < 1.0, "b must lie in (0,1)");
              require(r >= 0.0 && r <= 1.0, "r values must lie in [0,1]");
              require(n >= 2.0 && n == std::floor(n), "n values must be integers >= 2");
              require(theta >= 0.0 && theta <= 1.0, "theta values must lie in [0,1]");
              grid.push_back({lambda, sigma, b, r, static_cast<int>(n), theta});
            }

  std::vector<std::vector<std::string>> rows(grid.size());
  detail::parallel_for(grid.size(), 0, [&](std::size_t i) { rows[i] = sweep_row(i, grid[i]); });

  bool const as_json = args.has("out") && args.text("out").ends_with(".json");
  if (as_json)
  {
    json out;
    out["manifest"] = report.manifest.to_json();
    json jrows      = json::array();
    for (auto const &row : rows)
    {
      json jrow;
      for (std::size_t c = 0; c < kSweepColumns.size(); ++c)
      {
        std::string const &cell = row[c];
        if (cell.empty())
        {
          jrow[kSweepColumns[c]] = nullptr;
        }
        else if (c == 7)
        {
          jrow[kSweepColumns[c]] = cell;
        }
        else
        {
          jrow[kSweepColumns[c]] = std::stod(cell);
        }
      }
      jrows.push_back(jrow);
    }
    out["rows"] = jrows;
    return dump_json(out) + "\n";
  }

  std::string out = "# manifest: " + report.manifest.to_json().dump() + "\n";
  for (std::size_t c = 0; c < kSweepColumns.size(); ++c)
  {
    out += (c ? "," : "") + std::string(kSweepColumns[c]);
  }
  out += "\n";
  for (auto const &row : rows)
  {
    for (std::size_t c = 0; c < row.size(); ++c)
    {
      out += (c ? "," : "") + row[c];
    }
    out += "\n";
  }
  return out;
}

}  // namespace

std::string format_number(double value)
{
  if (!std::isfinite(value))
  {
    return {};
  }
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string dump_json(json const &j, int indent)
{
  std::string out;
  dump_into(j, out, indent, 0);
  return out;
}

std::vector<double> parse_range(std::string_view spec)
{
  auto number = [&](std::string_view s) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    {
      throw UsageError("bad number '" + std::string(s) + "' in range '" + std::string(spec) + "'");
    }
    return value;
  };

  std::vector<double> values;
  if (spec.find(':') != std::string_view::npos)
  {
    auto const first  = spec.find(':');
    auto const second = spec.find(':', first + 1);
    if (second == std::string_view::npos)
    {
      throw UsageError("range must be start:stop:step, got '" + std::string(spec) + "'");
    }
    double const start = number(spec.substr(0, first));
    double const stop  = number(spec.substr(first + 1, second - first - 1));
    double const step  = number(spec.substr(second + 1));
    if (!(step > 0.0))
    {
      throw UsageError("range step must be positive");
    }
    if (stop < start)
    {
      return values;
    }
    auto const count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 10'000'000)
    {
      throw UsageError("range has too many points");
    }
    for (std::int64_t i = 0; i < count; ++i)
    {
      values.push_back(start + static_cast<double>(i) * step);
    }
    return values;
  }
  std::size_t pos = 0;
  while (pos <= spec.size())
  {
    auto const comma = spec.find(',', pos);
    auto const end   = comma == std::string_view::npos ? spec.size() : comma;
    values.push_back(number(spec.substr(pos, end - pos)));
    if (comma == std::string_view::npos)
    {
      break;
    }
    pos = comma + 1;
  }
  return values;
}

json RunManifest::to_json() const
{
  json j;
  j["command"] = command;
  j["params"]  = json(params);
  j["seed"]    = seed ? json(*seed) : json(nullptr);
  j["version"] = version;
  if (timestamp)
  {
    j["timestamp"] = *timestamp;
  }
  return j;
}

RunManifest RunManifest::from_json(json const &j)
{
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.params  = j.at("params").get<Params>();
  if (j.contains("seed") && !j["seed"].is_null())
  {
    m.seed = j["seed"].get<std::uint64_t>();
  }
  m.version = j.at("version").get<std::string>();
  if (j.contains("timestamp"))
  {
    m.timestamp = j["timestamp"].get<std::string>();
  }
  return m;
}

Request RunManifest::request() const
{
  return {command, params};
}

RunManifest extract_manifest(std::string_view body)
{
  constexpr std::string_view prefix = "# manifest: ";
  if (body.starts_with(prefix))
  {
    auto const end = body.find('\n');
    return RunManifest::from_json(json::parse(body.substr(prefix.size(), end - prefix.size())));
  }
  auto const j = json::parse(body);
  return RunManifest::from_json(j.contains("manifest") ? j.at("manifest") : j);
}

Report run(Request const &request)
{
  using Handler = std::function<std::string(Args &, Report &)>;
  auto as_json  = [](auto fn) {
    return Handler([fn](Args &args, Report &report) {
      json body      = fn(args, report);
      json out       = json::object();
      out["manifest"] = report.manifest.to_json();
      for (auto it = body.begin(); it != body.end(); ++it)
      {
        out[it.key()] = it.value();
      }
      return dump_json(out) + "\n";
    });
  };
  static std::map<std::string, Handler> const handlers = {
      {"equilibrium", as_json(cmd_equilibrium)},
      {"bidcdf", Handler(cmd_bidcdf)},
      {"simulate", as_json(cmd_simulate)},
      {"market", as_json(cmd_market)},
      {"deviate", as_json(cmd_deviate)},
      {"sweep", Handler(cmd_sweep)},
  };

  Report report;
  report.manifest.command = request.command;
  auto handler            = handlers.find(request.command);
  if (handler == handlers.end())
  {
    report.exit_code  = exit_usage;
    report.diagnostic = "unknown command '" + request.command + "'";
    return report;
  }

  Args args(request.params);
  try
  {
    // Defaults are resolved before rendering because bodies embed the manifest.
    report.body = [&] {
      static std::map<std::string, std::vector<std::pair<std::string, std::string>>> const defaults = {
          {"bidcdf", {{"points", "101"}}},
          {"simulate",
           {{"format", "allpay"},
            {"reps", std::to_string(kDefaultReps)},
            {"seed", std::to_string(kDefaultSeed)},
            {"inject-bias", "0"}}},
          {"market", {{"r", "0.3"}}},
          {"deviate", {{"r", "0.3"}}},
          {"sweep",
           {{"lambda", "1"}, {"sigma", "0.3"}, {"b", "0.5"}, {"r", "0"}, {"n", "2"}, {"theta", "0.5"}}},
      };
      if (request.command == "simulate" && args.has("lambda"))
      {
        args.default_to("sigma", "0.3");
        args.default_to("r", "0");
      }
      if (auto it = defaults.find(request.command); it != defaults.end())
      {
        for (auto const &[key, value] : it->second)
        {
          args.default_to(key, value);
        }
      }
      report.manifest.params = args.params();
      report.manifest.params.erase("out");
      if (request.command == "simulate")
      {
        report.manifest.seed = args.seed();
      }
      return handler->second(args, report);
    }();
  }
  catch (UsageError const &e)
  {
    report.body.clear();
    report.exit_code  = exit_usage;
    report.diagnostic = e.what();
  }
  catch (HypothesisViolated const &e)
  {
    report.body.clear();
    report.exit_code  = exit_hypothesis_violated;
    report.diagnostic = e.what();
  }
  catch (DegenerateComposition const &e)
  {
    report.body.clear();
    report.exit_code  = exit_usage;
    report.diagnostic = e.what();
  }
  catch (DomainError const &e)
  {
    report.body.clear();
    report.exit_code  = exit_usage;
    report.diagnostic = e.what();
  }
  catch (ConvergenceError const &e)
  {
    report.body.clear();
    report.exit_code  = exit_numerical;
    report.diagnostic = e.what();
  }
  catch (TruncationError const &e)
  {
    report.body.clear();
    report.exit_code  = exit_numerical;
    report.diagnostic = e.what();
  }
  catch (std::exception const &e)
  {
    report.body.clear();
    report.exit_code  = exit_numerical;
    report.diagnostic = e.what();
  }
  return report;
}

}  // namespace allpay::reports
