#include "mibounds/cli.hpp"
#include "mibounds/experiments.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mibounds;

namespace {
std::filesystem::path scratch() {
  const auto d = std::filesystem::temp_directory_path() / "mibounds_cli_test";
  std::filesystem::create_directories(d);
  return d;
}

CliInvocation make(const std::string& sub, ConfigMap o) {
  CliInvocation inv;
  inv.subcommand = sub;
  inv.overrides = std::move(o);
  inv.out_dir = scratch().string();
  return inv;
}
}  // namespace

TEST_CASE("bound subcommand prints the right-hand side") {
  std::ostringstream out, err;
  const auto rc = dispatch(make("bound", {{"formula", "thm31_opt"}, {"alpha", "0.5"}, {"c", "2"},
                                          {"dpi", "1"}, {"kappa", "1"}, {"n", "100"}}),
                           out, err);
  CHECK(rc == kExitOk);
  CHECK(out.str() == "0.32\n");
  std::ostringstream out2;
  CHECK(dispatch(make("bound", {{"formula", "mi"}, {"alpha", "1"}}), out2, err) == kExitUsage);
  CHECK(dispatch(make("bound", {{"formula", "unknown"}}), out2, err) == kExitUsage);
}

TEST_CASE("certify emits a JSON certificate") {
  std::ostringstream out, err;
  const auto rc = dispatch(make("certify", {{"assumption", "2"}, {"family", "gaussian"},
                                            {"theta0", "0"}, {"sigma", "1"}, {"v", "1"}}),
                           out, err);
  CHECK(rc == kExitOk);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["d_pi"].get<double>() == 0.5);
  CHECK(j["kappa_pi"].get<double>() == 1.0);
}

TEST_CASE("contract writes one CSV row per n with metadata") {
  std::ostringstream out, err;
  ConfigMap o{{"family", "gaussian"}, {"n", "50,100,200,400"}, {"replicates", "200"},
              {"seed", "42"}};
  CHECK(dispatch(make("contract", o), out, err) == kExitOk);
  const auto dir = scratch() / "contract-42";
  const auto pts = read_results_csv((dir / "results.csv").string());
  CHECK(pts.size() == 4);
  std::ifstream meta(dir / "meta.json");
  const auto j = nlohmann::json::parse(meta);
  CHECK(j["schema"] == 1);
  CHECK(j["seed"] == 42);
  CHECK(j["config"]["n"] == "50,100,200,400");
}

TEST_CASE("config file with overrides") {
  const auto path = scratch() / "c.cfg";
  std::ofstream(path) << "# run\nfamily = gaussian\nn = 10,20,40\nreplicates = 50\nseed = 3\n";
  CliInvocation inv = make("rate-sweep", {{"replicates", "100"}});
  inv.config_path = path.string();
  std::ostringstream out, err;
  CHECK(dispatch(inv, out, err) == kExitOk);
  std::ifstream meta(scratch() / "rate-sweep-3" / "meta.json");
  CHECK(nlohmann::json::parse(meta)["config"]["replicates"] == "100");
}

TEST_CASE("assertion failures and errors map to exit codes") {
  std::ostringstream out, err;
  CHECK(dispatch(make("rate-sweep", {{"n", "10,20,40"}, {"replicates", "50"},
                                     {"expect_slope", "-3"}, {"slope_tol", "0.01"}}),
                 out, err) == kExitAssertion);
  CHECK(dispatch(make("contract", {{"alpha", "2"}}), out, err) == kExitUsage);
  CHECK(dispatch(make("nope", {}), out, err) == kExitUsage);
  CHECK(dispatch(make("fisher-check", {{"family", "gaussian"}}), out, err) == kExitAssertion);
  CHECK(dispatch(make("fisher-check", {{"family", "poisson"}, {"theta0", "0.5"}}), out, err) ==
        kExitOk);
}

TEST_CASE("every subcommand runs") {
  const std::vector<std::pair<std::string, ConfigMap>> runs{
      {"divergence", {{"family", "poisson"}, {"theta0", "0"}, {"theta", "1"}}},
      {"divergence", {{"family", "gaussian"}}},
      {"certify", {{"assumption", "1"}, {"family", "bernoulli"}}},
      {"certify", {{"assumption", "3"}, {"dim", "2"}, {"theta0", "1,0"}}},
      {"certify", {{"assumption", "4"}}},
      {"certify", {{"assumption", "2"}, {"family", "sequence"}, {"n", "50"}}},
      {"certify", {{"assumption", "uniform"}, {"M", "1"}}},
      {"mi-check", {{"n", "1"}, {"replicates", "2000"}}},
      {"highprob-check", {{"replicates", "200"}}},
      {"mle-check", {{"n", "100,200,400"}, {"replicates", "500"}}},
      {"mle-check", {{"family", "poisson"}, {"n", "100,200,400"}, {"replicates", "200"}}},
  };
  for (const auto& [sub, o] : runs) {
    std::ostringstream out, err;
    INFO(sub, " ", err.str());
    CHECK(dispatch(make(sub, o), out, err) == kExitOk);
  }
  CHECK(cli_subcommands().size() == 9);
}
