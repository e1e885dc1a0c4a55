#include "allpay/reports.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

namespace rp = allpay::reports;

constexpr char const *kFlags[] = {"n", "theta", "b", "lambda", "sigma", "r", "reps",
                                  "seed", "points", "out", "format", "inject-bias"};

std::string utc_now()
{
  auto const  now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm     tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

bool write_file(std::string const &path, std::string const &text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  return static_cast<bool>(out);
}

int emit(rp::Report report, std::optional<std::string> const &out_path)
{
  if (!report.diagnostic.empty())
  {
    std::cerr << report.diagnostic << '\n';
  }
  if (report.body.empty())
  {
    return report.exit_code;
  }
  if (!out_path)
  {
    std::cout << report.body;
    return report.exit_code;
  }
  report.manifest.timestamp = utc_now();
  if (!write_file(*out_path, report.body) ||
      !write_file(*out_path + ".manifest.json", rp::dump_json(report.manifest.to_json()) + "\n"))
  {
    std::cerr << "cannot write " << *out_path << '\n';
    return rp::exit_io_error;
  }
  return report.exit_code;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Equilibria of all-pay auctions in a competitive search market"};
  app.set_version_flag("--version", std::string(rp::kToolVersion));
  app.require_subcommand(1);

  struct Sub
  {
    CLI::App                *app;
    std::map<std::string, std::string> values;
  };
  std::vector<std::unique_ptr<Sub>> subs;

  auto add = [&](char const *name, char const *help, std::initializer_list<char const *> flags) {
    auto sub = std::make_unique<Sub>();
    sub->app = app.add_subcommand(name, help);
    for (char const *flag : flags)
    {
      sub->app->add_option(std::string("--") + flag, sub->values[flag]);
    }
    subs.push_back(std::move(sub));
  };
  add("equilibrium", "store-level equilibrium of one scene", {"n", "theta", "b", "out"});
  add("bidcdf", "CSV of the all-pay bid CDFs", {"n", "theta", "b", "points", "out"});
  add("simulate", "Monte Carlo check of analytic payoffs",
      {"n", "theta", "b", "lambda", "sigma", "r", "reps", "seed", "format", "out", "inject-bias"});
  add("market", "market equilibrium and deviation checks", {"lambda", "sigma", "b", "r", "out"});
  add("deviate", "profit of a single all-pay deviant among standard sellers",
      {"lambda", "sigma", "b", "r", "out"});
  add("sweep", "grid of analytic quantities and residuals",
      {"lambda", "sigma", "b", "r", "n", "theta", "out"});

  std::string manifest_path;
  std::string replay_out;
  auto       *replay = app.add_subcommand("replay", "rerun the command recorded in a manifest");
  replay->add_option("manifest", manifest_path, "output file or sidecar manifest")->required();
  replay->add_option("--out", replay_out);

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::ParseError const &e)
  {
    int const code = app.exit(e);
    return code == 0 ? 0 : rp::exit_usage;
  }

  if (replay->parsed())
  {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in)
    {
      std::cerr << "cannot read " << manifest_path << '\n';
      return rp::exit_io_error;
    }
    std::stringstream text;
    text << in.rdbuf();
    rp::RunManifest manifest;
    try
    {
      manifest = rp::extract_manifest(text.str());
    }
    catch (std::exception const &e)
    {
      std::cerr << "no manifest in " << manifest_path << ": " << e.what() << '\n';
      return rp::exit_usage;
    }
    auto request = manifest.request();
    std::optional<std::string> out;
    if (!replay_out.empty())
    {
      out                    = replay_out;
      request.params["out"]  = replay_out;
    }
    return emit(rp::run(request), out);
  }

  for (auto const &sub : subs)
  {
    if (!sub->app->parsed())
    {
      continue;
    }
    rp::Request request{sub->app->get_name(), {}};
    std::optional<std::string> out;
    for (char const *flag : kFlags)
    {
      auto *opt = sub->app->get_option_no_throw(std::string("--") + flag);
      if (opt != nullptr && opt->count() > 0)
      {
        request.params[flag] = sub->values[flag];
      }
    }
    if (auto it = request.params.find("out"); it != request.params.end())
    {
      out = it->second;
    }
    return emit(rp::run(request), out);
  }
  return rp::exit_usage;
}
