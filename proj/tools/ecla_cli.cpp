// ecla: generate corrupted instances, correct them, verify, benchmark.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecla/harness.hpp"
#include "ecla/mat.hpp"
#include "ecla/trsmec.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kAbort = 2;
constexpr int kVerifyFailed = 3;

void parse_field(const std::string& text, ecla::Scenario& sc) {
  const auto comma = text.find(',');
  sc.p = std::stoull(text.substr(0, comma));
  sc.nu = comma == std::string::npos ? 1 : static_cast<unsigned>(std::stoul(text.substr(comma + 1)));
}

void add_scenario_flags(CLI::App* cmd, ecla::Scenario& sc, std::string& field) {
  cmd->add_option("--workload", sc.workload, "lu, rect, rankdef, solve-small, solve-large, trinv, trsm")
      ->capture_default_str();
  cmd->add_option("--field", field, "P or P,NU")->capture_default_str();
  cmd->add_option("--m", sc.m, "rows (rect, rankdef, solve, trsm)");
  cmd->add_option("--rank", sc.rank, "rank (rankdef)");
  cmd->add_option("--ell", sc.ell, "inner dimension of the product term (trsm)");
  cmd->add_option("--variant", sc.variant, "upper_right, lower_right, lower_left, upper_left (trsm)")
      ->capture_default_str();
  cmd->add_option("--epsilon", sc.epsilon, "failure bound")->capture_default_str();
  cmd->add_option("--seed", sc.seed, "random seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error correction for LU factorizations and triangular solves over finite fields"};
  app.require_subcommand(1);

  std::size_t strassen = ecla::strassen_threshold();
  app.add_option("--strassen-threshold", strassen, "dimension above which Strassen is used")->capture_default_str();

  ecla::Scenario sc;
  std::string field = "65537";
  std::string out_dir = ".";

  auto* gen = app.add_subcommand("gen", "write a ground-truth instance and its corrupted candidates");
  add_scenario_flags(gen, sc, field);
  gen->add_option("--n", sc.n, "dimension")->capture_default_str();
  gen->add_option("--errors", sc.errors, "number of corrupted entries")->capture_default_str();
  gen->add_option("--out", out_dir, "instance directory")->required();

  ecla::CorrectSettings settings;
  std::optional<double> eps_override;
  std::optional<unsigned> lambda;
  std::optional<std::uint64_t> seed_override;
  auto* correct = app.add_subcommand("correct", "correct the candidates of an instance directory");
  correct->add_option("--out", out_dir, "instance directory")->required();
  correct->add_option("--epsilon", eps_override, "failure bound (default: the scenario's)");
  correct->add_option("--seed", seed_override, "random seed (default: the scenario's)");
  correct->add_option("--lambda", lambda, "fixed Freivalds projection height (testing)");
  correct->add_option("--leaf-size", settings.leaf_size, "recursion leaf size")->capture_default_str();
  correct->add_flag("--verify", settings.verify, "check the result exactly afterwards");

  std::string which = "corrected";
  auto* verify = app.add_subcommand("verify", "exact check of an instance's matrices");
  verify->add_option("--out", out_dir, "instance directory")->required();
  verify->add_option("--which", which, "true, hat or corrected")
      ->check(CLI::IsMember({"true", "hat", "corrected"}))
      ->capture_default_str();

  std::vector<std::size_t> sizes{256}, errors{0, 1, 4, 16};
  std::size_t repeats = 5;
  std::string csv_path;
  auto* bench = app.add_subcommand("bench", "time corrections over a grid of sizes and error counts");
  add_scenario_flags(bench, sc, field);
  bench->add_option("--n", sizes, "dimensions")->delimiter(',')->capture_default_str();
  bench->add_option("--errors", errors, "error counts")->delimiter(',')->capture_default_str();
  bench->add_option("--repeats", repeats, "runs per cell")->capture_default_str();
  bench->add_option("--out", csv_path, "CSV file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    ecla::set_strassen_threshold(strassen);
    parse_field(field, sc);

    if (*gen) {
      const ecla::Instance inst = ecla::generate(sc);
      ecla::save_instance(inst, out_dir);
      std::cout << "wrote " << inst.scenario.workload << " instance to " << out_dir << '\n';
      return kOk;
    }

    if (*correct) {
      const ecla::Instance inst = ecla::load_instance(out_dir);
      settings.epsilon = eps_override;
      settings.lambda = lambda;
      settings.seed = seed_override;
      const ecla::CorrectOutcome res = ecla::correct_instance(inst, settings);
      std::ofstream(std::filesystem::path(out_dir) / "report.txt") << res.report.serialize();
      if (res.aborted) {
        std::cerr << "Monte Carlo abort: " << res.abort_message << '\n';
        return kAbort;
      }
      ecla::save_set(res.corrected, out_dir, "_corrected");
      std::cout << "corrected " << res.report.corrected_count() << " entries in " << res.report.seconds << " s";
      if (settings.verify) std::cout << ", verification " << res.report.verification;
      std::cout << '\n';
      return settings.verify && res.report.verification != "pass" ? kVerifyFailed : kOk;
    }

    if (*verify) {
      const ecla::Instance inst = ecla::load_instance(out_dir);
      const ecla::MatSet set = which == "true"  ? inst.truth
                               : which == "hat" ? inst.corrupted
                                                : ecla::load_set(inst.scenario.workload, out_dir, "_corrected");
      std::string why;
      const bool ok = ecla::verify_set(inst, set, &why);
      std::cout << (ok ? "pass" : "fail: " + why) << '\n';
      return ok ? kOk : kVerifyFailed;
    }

    if (*bench) {
      ecla::BenchConfig cfg;
      cfg.base = sc;
      cfg.sizes = sizes;
      cfg.errors = errors;
      cfg.repeats = repeats;
      const std::string csv = ecla::bench_csv(ecla::run_bench(cfg));
      if (csv_path.empty()) std::cout << csv;
      else std::ofstream(csv_path) << csv;
      return kOk;
    }
  } catch (const ecla::MonteCarloAbort& e) {
    std::cerr << "Monte Carlo abort: " << e.what() << '\n';
    return kAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
