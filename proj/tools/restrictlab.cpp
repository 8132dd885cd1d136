// restrictlab: batch driver for the lattice-point restriction experiments.
//
// Every run writes its CSV reports and a manifest.json into --out. Exit status:
// 0 success, 2 configuration error, 3 budget exceeded, 4 numerical warning
// (results are still written), 1 anything unexpected.

#include "cli_support.hpp"
#include "commands.hpp"

#include "restrictlab/numeric.hpp"

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <fftw3.h>
#include <gmp.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>

#ifndef RESTRICTLAB_VERSION
#define RESTRICTLAB_VERSION "0.0.0"
#endif

namespace {

using nlohmann::json;
using rlcli::Context;

constexpr int kOk = 0, kUnexpected = 1, kConfig = 2, kBudget = 3, kWarning = 4;

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json versions() {
  return {{"restrictlab", RESTRICTLAB_VERSION},
          {"boost", BOOST_LIB_VERSION},
          {"gmp", std::string(gmp_version)},
          {"fftw", std::string(fftw_version)},
          {"compiler", __VERSION__}};
}

int run(const std::vector<std::string>& args);

// Re-executes the argv recorded in a manifest with a new output directory,
// from the recorded working directory, pinning the recorded seed and budget.
int replay(const std::filesystem::path& manifest_path, const std::filesystem::path& out) {
  json m;
  try {
    std::ifstream in(manifest_path);
    m = json::parse(in);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot read manifest: " << e.what() << '\n';
    return kConfig;
  }
  if (!m.contains("argv") || !m["argv"].is_array()) {
    std::cerr << "error: manifest has no argv\n";
    return kConfig;
  }
  std::vector<std::string> args;
  bool has_seed = false, has_budget = false;
  const auto recorded = m["argv"].get<std::vector<std::string>>();
  for (std::size_t i = 0; i < recorded.size(); ++i) {
    const auto& a = recorded[i];
    if (a == "--out") {
      ++i;
      continue;
    }
    if (a.rfind("--out=", 0) == 0) continue;
    if (a == "--seed" || a.rfind("--seed=", 0) == 0) has_seed = true;
    if (a == "--budget" || a.rfind("--budget=", 0) == 0) has_budget = true;
    args.push_back(a);
  }
  if (!has_seed && m.contains("settings") && m["settings"].contains("seed")) {
    args.push_back("--seed");
    args.push_back(std::to_string(m["settings"]["seed"].get<std::uint64_t>()));
  }
  if (!has_budget && m.contains("settings") && m["settings"].contains("budget")) {
    args.push_back("--budget");
    args.push_back(std::to_string(m["settings"]["budget"].get<std::uint64_t>()));
  }
  args.push_back("--out");
  args.push_back(std::filesystem::absolute(out).string());

  const auto here = std::filesystem::current_path();
  if (m.contains("cwd")) {
    std::error_code ec;
    std::filesystem::current_path(m["cwd"].get<std::string>(), ec);
    if (ec) std::cerr << "warning: recorded working directory unavailable, replaying from " << here << '\n';
  }
  const int status = run(args);
  std::filesystem::current_path(here);
  return status;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Numerical experiments for discrete restriction on lattice points of hypersurfaces and graphs", "restrictlab"};
  app.fallthrough();
  app.require_subcommand(1);
  rlcli::Settings settings;
  app.add_flag("--deterministic", settings.deterministic, "fixed seed and single-threaded transforms");
  app.add_option("--threads", settings.threads, "worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--seed", settings.seed, "seed for every random draw");
  auto* out_opt = app.add_option("--out", settings.out, "output directory");
  app.add_option("--budget", settings.budget, "memory/work budget in entries (default RESTRICTLAB_BUDGET or 2^28)");

  std::string manifest;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a manifest into a new --out directory");
  replay_cmd->add_option("manifest", manifest, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);

  rlcli::Action action;
  rlcli::add_commands(app, action);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (replay_cmd->parsed()) {
    if (out_opt->count() == 0) {
      std::cerr << "error: replay needs --out\n";
      return kConfig;
    }
    return replay(manifest, settings.out);
  }

  Context ctx;
  ctx.settings = settings;
  ctx.seed = settings.seed ? *settings.seed : settings.deterministic ? 1 : std::random_device{}();
  if (settings.budget) {
    if (*settings.budget == 0) {
      std::cerr << "error: --budget must be positive\n";
      return kConfig;
    }
    setenv("RESTRICTLAB_BUDGET", std::to_string(*settings.budget).c_str(), 1);
  }
  ctx.budget = restrictlab::default_budget();

  std::error_code ec;
  std::filesystem::create_directories(settings.out, ec);
  if (ec) {
    std::cerr << "error: cannot create " << settings.out << ": " << ec.message() << '\n';
    return kConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  int status = kOk;
  std::string error;
  try {
    action(ctx);
  } catch (const restrictlab::BudgetExceeded& e) {
    status = kBudget;
    error = e.what();
  } catch (const restrictlab::InputError& e) {
    status = kConfig;
    error = e.what();
  } catch (const json::exception& e) {
    status = kConfig;
    error = e.what();
  } catch (const std::filesystem::filesystem_error& e) {
    status = kConfig;
    error = e.what();
  } catch (const std::invalid_argument& e) {
    status = kConfig;
    error = e.what();
  } catch (const std::exception& e) {
    status = kUnexpected;
    error = e.what();
  }
  if (status == kOk && !ctx.warnings.empty()) status = kWarning;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  json m = {{"tool", "restrictlab"},
            {"command", command},
            {"argv", args},
            {"cwd", std::filesystem::current_path().string()},
            {"settings",
             {{"threads", settings.threads},
              {"seed", ctx.seed},
              {"deterministic", settings.deterministic},
              {"budget", ctx.budget}}},
            {"outputs", ctx.outputs},
            {"summary", ctx.summary},
            {"warnings", ctx.warnings},
            {"status", status},
            {"versions", versions()},
            {"started_utc", started_utc},
            {"wall_time_seconds", wall}};
  if (!error.empty()) m["error"] = error;
  std::ofstream(settings.out / "manifest.json") << m.dump(2) << '\n';

  if (!error.empty()) std::cerr << "error: " << error << '\n';
  for (const auto& w : ctx.warnings) std::cerr << "warning: " << w << '\n';
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}
