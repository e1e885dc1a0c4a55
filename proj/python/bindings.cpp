#include "allpay/auction_core.hpp"
#include "allpay/errors.hpp"
#include "allpay/market_search.hpp"
#include "allpay/montecarlo.hpp"
#include "allpay/poisson_demand.hpp"
#include "allpay/reports.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

namespace py = pybind11;
using namespace allpay;

namespace {

py::dict estimate_dict(SimEstimate const &e)
{
  py::dict d;
  d["mean"]         = e.mean;
  d["std_error"]    = e.std_error;
  d["replications"] = e.replications;
  return d;
}

SimConfig make_config(std::int64_t replications, std::uint64_t seed, int threads)
{
  SimConfig config;
  config.replications = replications;
  config.seed         = seed;
  config.threads      = threads;
  config.validate();
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "All-pay auctions with budget-constrained buyers and competitive search";

  auto base = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DegenerateComposition>(m, "DegenerateComposition", base.ptr());
  py::register_exception<RegionError>(m, "RegionError", PyExc_ValueError);
  py::register_exception<HypothesisViolated>(m, "HypothesisViolated", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<TruncationError>(m, "TruncationError", PyExc_RuntimeError);

  py::enum_<AuctionFormat>(m, "AuctionFormat")
      .value("first_price", AuctionFormat::first_price)
      .value("second_price", AuctionFormat::second_price)
      .value("all_pay", AuctionFormat::all_pay);
  m.def("parse_format", [](std::string const &s) { return parse_format(s); });

  py::enum_<Region>(m, "Region").value("r1", Region::r1).value("r2", Region::r2).value("r3", Region::r3);

  py::enum_<DeviationStatus>(m, "DeviationStatus")
      .value("ok", DeviationStatus::ok)
      .value("subsidy_required", DeviationStatus::subsidy_required)
      .value("infeasible", DeviationStatus::infeasible)
      .value("degenerate", DeviationStatus::degenerate);

  m.def("z", &poisson::z, py::arg("n"), py::arg("x"), "Poisson probability of exactly n arrivals at rate x.");

  py::class_<AuctionScene>(m, "AuctionScene")
      .def(py::init<int, double, double>(), py::arg("bidders"), py::arg("theta"), py::arg("budget"))
      .def_property_readonly("bidders", &AuctionScene::bidders)
      .def_property_readonly("theta", &AuctionScene::theta)
      .def_property_readonly("budget", &AuctionScene::budget)
      .def("all_rivals_low", &AuctionScene::all_rivals_low);

  py::class_<RegionInfo>(m, "RegionInfo")
      .def_readonly("tag", &RegionInfo::tag)
      .def_readonly("pooling_threshold", &RegionInfo::pooling_threshold)
      .def_readonly("extraction_threshold", &RegionInfo::extraction_threshold);

  py::class_<PayoffTriple>(m, "PayoffTriple")
      .def_readonly("u_h", &PayoffTriple::u_h)
      .def_readonly("u_l", &PayoffTriple::u_l)
      .def_readonly("pi", &PayoffTriple::pi)
      .def("__repr__", [](PayoffTriple const &p) {
        return "PayoffTriple(u_h=" + reports::format_number(p.u_h) +
               ", u_l=" + reports::format_number(p.u_l) + ", pi=" + reports::format_number(p.pi) + ")";
      });

  py::class_<BidDistribution>(m, "BidDistribution")
      .def("cdf", &BidDistribution::eval, py::arg("p"))
      .def("cdf_left", &BidDistribution::eval_left, py::arg("p"))
      .def("atom_mass_at", &BidDistribution::atom_mass_at, py::arg("p"))
      .def("quantile", &BidDistribution::quantile, py::arg("u"))
      .def("mean", &BidDistribution::mean)
      .def_property_readonly("lower_support", &BidDistribution::lower_support)
      .def_property_readonly("upper_support", &BidDistribution::upper_support);

  py::class_<AllPayProfile>(m, "AllPayProfile")
      .def_readonly("high", &AllPayProfile::high)
      .def_readonly("low", &AllPayProfile::low);

  py::class_<BestResponseGap>(m, "BestResponseGap")
      .def_readonly("gap_h", &BestResponseGap::gap_h)
      .def_readonly("gap_l", &BestResponseGap::gap_l)
      .def_readonly("value_h", &BestResponseGap::value_h)
      .def_readonly("value_l", &BestResponseGap::value_l)
      .def_readonly("tolerance", &BestResponseGap::tolerance);

  m.def("classify_region", &classify_region, py::arg("scene"));
  m.def("standard_payoffs", &standard_payoffs, py::arg("scene"));
  m.def("allpay_payoffs", &allpay_payoffs, py::arg("scene"));
  m.def("surplus_residual", &surplus_residual, py::arg("scene"), py::arg("payoffs"));
  m.def("solve_atom_mu", &solve_atom_mu, py::arg("scene"));
  m.def("atom_payoff", &atom_payoff, py::arg("scene"), py::arg("mu"));
  m.def("allpay_bid_cdfs", &allpay_bid_cdfs, py::arg("scene"));
  m.def("firstprice_high_cdf", &firstprice_high_cdf, py::arg("scene"));
  m.def("best_response_gap", &best_response_gap, py::arg("profile"), py::arg("scene"),
        py::arg("grid_size") = 100000);
  m.def("expected_bid", &expected_bid, py::arg("dist"));

  py::class_<MarketParams>(m, "MarketParams")
      .def(py::init<double, double, double>(), py::arg("lam"), py::arg("sigma"), py::arg("budget"))
      .def_property_readonly("lam", &MarketParams::lambda)
      .def_property_readonly("sigma", &MarketParams::sigma)
      .def_property_readonly("budget", &MarketParams::budget);

  py::class_<MechanismPosting>(m, "MechanismPosting")
      .def(py::init<AuctionFormat, double>(), py::arg("format"), py::arg("reserve"))
      .def_readonly("format", &MechanismPosting::format)
      .def_readonly("reserve", &MechanismPosting::reserve);

  py::class_<DemandResponse>(m, "DemandResponse")
      .def_static("from_rates", &DemandResponse::from_rates, py::arg("x_h"), py::arg("x_l"))
      .def_static("from_composition", &DemandResponse::from_composition, py::arg("total"),
                  py::arg("theta"))
      .def_property_readonly("x_h", &DemandResponse::x_h)
      .def_property_readonly("x_l", &DemandResponse::x_l)
      .def_property_readonly("theta", &DemandResponse::theta);

  py::class_<BuyerUtilities>(m, "BuyerUtilities")
      .def_readonly("high", &BuyerUtilities::high)
      .def_readonly("low", &BuyerUtilities::low);

  m.def(
      "utilities",
      [](MechanismPosting const &p, DemandResponse const &d, double b) { return utilities(p, d, b); },
      py::arg("posting"), py::arg("demand"), py::arg("budget"));
  m.def(
      "profit_direct",
      [](MechanismPosting const &p, DemandResponse const &d, double b) { return profit_direct(p, d, b); },
      py::arg("posting"), py::arg("demand"), py::arg("budget"));
  m.def("profit_identity_residual", &profit_identity_residual, py::arg("posting"), py::arg("demand"),
        py::arg("budget"));
  m.def("solve_demand", &solve_demand, py::arg("posting"), py::arg("omega_h"), py::arg("omega_l"),
        py::arg("budget"));

  py::class_<MarketEquilibrium>(m, "MarketEquilibrium")
      .def_readonly("omega_h", &MarketEquilibrium::omega_h)
      .def_readonly("omega_l", &MarketEquilibrium::omega_l)
      .def_readonly("reserve_star", &MarketEquilibrium::reserve_star)
      .def_readonly("profit", &MarketEquilibrium::profit);

  py::class_<StandardDeviation>(m, "StandardDeviation")
      .def_readonly("best_reserve", &StandardDeviation::best_reserve)
      .def_readonly("best_profit", &StandardDeviation::best_profit)
      .def_readonly("equilibrium_profit", &StandardDeviation::equilibrium_profit)
      .def_readonly("gain", &StandardDeviation::gain);

  py::class_<AllPayDeviation>(m, "AllPayDeviation")
      .def_readonly("status", &AllPayDeviation::status)
      .def_readonly("theta_hat", &AllPayDeviation::theta_hat)
      .def_readonly("r_hat", &AllPayDeviation::r_hat)
      .def_readonly("profit_standard", &AllPayDeviation::profit_standard)
      .def_readonly("profit_allpay", &AllPayDeviation::profit_allpay)
      .def_readonly("profit_gain", &AllPayDeviation::profit_gain)
      .def_readonly("profit_gain_direct", &AllPayDeviation::profit_gain_direct)
      .def_readonly("equation_residual", &AllPayDeviation::equation_residual);

  m.def("allpay_symmetric_equilibrium", &allpay_symmetric_equilibrium, py::arg("params"));
  m.def("standard_deviation_check", &standard_deviation_check, py::arg("params"));
  m.def("allpay_deviation_from_standard", &allpay_deviation_from_standard, py::arg("params"),
        py::arg("r_s"));

  m.def(
      "simulate_store",
      [](AuctionScene const &scene, AuctionFormat format, std::int64_t reps, std::uint64_t seed,
         int threads) {
        StoreEstimates e;
        {
          py::gil_scoped_release release;
          e = simulate_store(scene, format, make_config(reps, seed, threads));
        }
        py::dict d;
        d["u_h"]               = estimate_dict(e.u_h);
        d["u_l"]               = estimate_dict(e.u_l);
        d["pi"]                = estimate_dict(e.pi);
        d["max_surplus_error"] = e.max_surplus_error;
        return d;
      },
      py::arg("scene"), py::arg("format"), py::arg("replications") = 1'000'000,
      py::arg("seed") = 20240917ULL, py::arg("threads") = 0);

  // Same commands as the CLI; returns (exit_code, body, diagnostic).
  m.def(
      "run_report",
      [](std::string const &command, reports::Params const &params) {
        reports::Report r;
        {
          py::gil_scoped_release release;
          r = reports::run({command, params});
        }
        return py::make_tuple(r.exit_code, r.body, r.diagnostic);
      },
      py::arg("command"), py::arg("params") = reports::Params{});

  m.attr("__version__") = std::string(reports::kToolVersion);
}
