// chowla_lab: command-line driver for the sieve, moment, identity and
// exponential-sum experiments. Exit status: 0 all checks passed, 1 a
// certified check failed, 2 bad input or runtime error.
#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>

#include "chowla/cli.hpp"
#include "chowla/errors.hpp"
#include "chowla/parallel.hpp"

namespace {

using chowla::RunConfig;

// Flags parse into `flags`; after parsing, only options the user actually
// gave are copied over the values loaded from --config.
class Binder {
 public:
  Binder(CLI::App* app, RunConfig& flags) : app_(app), flags_(flags) {}

  template <typename T>
  CLI::Option* add(const std::string& name, T RunConfig::*field, const std::string& help) {
    CLI::Option* opt = app_->add_option(name, flags_.*field, help);
    bound_.emplace_back(opt, [this, field](RunConfig& c) { c.*field = flags_.*field; });
    return opt;
  }

  CLI::Option* add_flag(const std::string& name, bool RunConfig::*field, bool value, const std::string& help) {
    CLI::Option* opt = app_->add_flag(name, help);
    bound_.emplace_back(opt, [field, value](RunConfig& c) { c.*field = value; });
    return opt;
  }

  void custom(CLI::Option* opt, std::function<void(RunConfig&)> apply) { bound_.emplace_back(opt, std::move(apply)); }

  CLI::App* app() const { return app_; }

  void apply(RunConfig& c) const {
    for (const auto& [opt, fn] : bound_) {
      if (opt->count() > 0) fn(c);
    }
  }

 private:
  CLI::App* app_;
  RunConfig& flags_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> bound_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liouville correlation and moment experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(chowla::kVersion));

  RunConfig flags;
  std::string config_path;
  int degree = 1;
  double tol = 0.0;
  std::vector<std::unique_ptr<Binder>> binders;

  auto make = [&](const std::string& name, const std::string& help) -> Binder& {
    CLI::App* sub = app.add_subcommand(name, help);
    binders.push_back(std::make_unique<Binder>(sub, flags));
    Binder& b = *binders.back();
    sub->add_option("--config", config_path, "JSON RunConfig; explicit flags win");
    b.add("--format", &RunConfig::format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    b.add("--out", &RunConfig::out, "output path (stdout if omitted)");
    b.add("--workers", &RunConfig::workers, "worker threads (default: hardware concurrency)");
    b.add("--sieve-cache", &RunConfig::sieve_cache, "LIOUSPF1 cache to load (default $CHOWLA_SIEVE_CACHE)");
    b.add_flag("--no-timing", &RunConfig::timing, false, "report elapsed_ms as 0 for byte-stable output");
    return b;
  };
  auto ensemble_flags = [&](Binder& b, bool many_degrees) {
    if (many_degrees) {
      b.add("--degrees", &RunConfig::degrees, "comma-separated degrees d_1,...,d_s")->delimiter(',');
    } else {
      CLI::Option* opt = b.app()->add_option("--degree", degree, "polynomial degree");
      b.custom(opt, [&degree](RunConfig& c) { c.degrees = {degree}; });
    }
    b.add("--height", &RunConfig::height, "coefficient bound H");
    b.add("--x", &RunConfig::x, "interval is x <= n <= 2x");
    b.add("--degree-mode", &RunConfig::degree_mode, "exact or at_most")
        ->check(CLI::IsMember({"exact", "at_most"}));
  };

  Binder& sieve = make("sieve", "write a smallest-prime-factor cache");
  sieve.add("--limit", &RunConfig::limit, "largest n in the table")->required();

  Binder& moments = make("moments", "ensemble moments of the normalized Chowla sum");
  ensemble_flags(moments, true);
  moments.add("--k-max", &RunConfig::k_max, "highest moment");
  moments.add("--weights", &RunConfig::weights, "ones, prime, or a weight file path");
  moments.add("--mode", &RunConfig::mode, "auto, full or monte_carlo")
      ->check(CLI::IsMember({"auto", "full", "monte_carlo"}));
  moments.add("--samples", &RunConfig::samples, "Monte Carlo sample count");
  moments.add("--seed", &RunConfig::seed, "Monte Carlo seed");

  Binder& verify = make("verify-identity", "check the correlation integral identity by quadrature");
  verify.add("--d", &RunConfig::d, "polynomial degree");
  verify.add("--L", &RunConfig::L, "number of points");
  verify.add("--points", &RunConfig::points, "comma-separated points m_i")->delimiter(',');
  verify.add("--height", &RunConfig::height, "coefficient bound H");
  {
    CLI::Option* opt = verify.app()->add_option("--tol", tol, "absolute tolerance (default 1e-6 (2H+1)^(d+1))");
    verify.custom(opt, [&tol](RunConfig& c) { c.tol = tol; });
  }
  verify.add("--oversample", &RunConfig::oversample, "grid oversampling factor");
  verify.add("--budget", &RunConfig::budget, "maximum quadrature nodes");
  verify.add_flag("--force", &RunConfig::force, true, "run even when the grid exceeds the budget");

  Binder& davenport = make("davenport", "grid estimate of sup |sum lambda(n) e(n alpha)|");
  davenport.add("--x", &RunConfig::x, "sum over n <= x");
  davenport.add("--grid", &RunConfig::grid, "grid points on [-pi, pi) (default 8x)");

  Binder& exceedance = make("exceedance", "count of |C_f(x)|/sqrt(x) > y against the second moment");
  ensemble_flags(exceedance, false);
  exceedance.add("--y", &RunConfig::y, "threshold");

  Binder& probe = make("probe", "second/fourth moment lower bound on P(S_f > y)");
  ensemble_flags(probe, false);
  probe.add("--y", &RunConfig::y, "threshold");
  probe.add("--m", &RunConfig::m, "moment index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config;
    config.workers = chowla::default_workers();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw chowla::ValidationError("cannot open config " + config_path);
      try {
        nlohmann::json::parse(in).get_to(config);
      } catch (const nlohmann::json::exception& e) {
        throw chowla::ValidationError("config " + config_path + ": " + e.what());
      }
    }
    for (std::size_t i = 0; i < binders.size(); ++i) {
      if (binders[i]->app()->parsed()) {
        config.subcommand = binders[i]->app()->get_name();
        binders[i]->apply(config);
      }
    }
    if (config.workers == 0) config.workers = 1;

    const chowla::CommandResult result = chowla::run_command(config);
    // The sieve command's --out is the cache itself; its summary goes to stdout.
    const std::string text = chowla::render(result, config.format);
    if (config.out.empty() || config.subcommand == "sieve") {
      std::cout << text;
    } else {
      std::ofstream out(config.out, std::ios::binary);
      if (!out) throw chowla::ValidationError("cannot write " + config.out);
      out << text;
    }
    return result.passed ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
