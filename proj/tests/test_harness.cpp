#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fmab/harness.hpp"

using namespace fmab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("fmab_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("config parsing") {
    const auto c = ExperimentConfig::parse(
        "# comment\n"
        "experiment = smooth_det\n"
        "\n"
        "T = 50   # trailing comment\n"
        "minima = 0, 0.5 ,1\n"
        "heuristic = yes\n");
    CHECK(c.experiment() == "smooth_det");
    CHECK(c.get_int("T", 0) == 50);
    CHECK(c.get_list("minima", {}) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(c.get_bool("heuristic", false));
    CHECK(c.repeats() == 10);
    CHECK(c.base_seed() == 1);
    CHECK(c.repeat_seed(3) == 4);
    CHECK(c.get_double("eps", 0.25) == 0.25);
    CHECK(c.echo()["T"] == "50");
  }

  TEST_CASE("config errors") {
    CHECK_THROWS_AS(ExperimentConfig::parse("bogus = 1\n"), Error);
    CHECK_THROWS_AS(ExperimentConfig::parse("T = 1\nT = 2\n"), Error);
    CHECK_THROWS_AS(ExperimentConfig::parse("no equals sign\n"), Error);
    CHECK_THROWS_AS(ExperimentConfig::parse("T = abc\n").get_int("T", 0), Error);
    CHECK_THROWS_AS(ExperimentConfig::parse("T = 1.5\n").get_int("T", 0), Error);
    CHECK_THROWS_AS(ExperimentConfig::parse("heuristic = maybe\n").get_bool("heuristic", false), Error);
    CHECK_THROWS_AS(ExperimentConfig::parse("experiment = nope\n").experiment(), Error);
    CHECK_THROWS_AS(ExperimentConfig::parse("repeats = 0\n").repeats(), Error);
    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.cfg"), Error);
    CHECK_THROWS_AS(run_experiment(ExperimentConfig::parse("experiment = smooth_det\noptimizer = sgd\nrepeats = 1\n")),
                    Error);
  }

  TEST_CASE("summary statistics") {
    CHECK(quantile({3, 1, 2, 4, 5}, 0.5) == 3.0);
    CHECK(quantile({1, 2}, 0.1) == doctest::Approx(1.1));
    const MetricSummary m = summarize({1, 2, 3, 4});
    CHECK(m.mean == 2.5);
    CHECK(m.std == doctest::Approx(1.2909944487));
    CHECK(m.q90 == doctest::Approx(3.7));
    SummaryStats s;
    s.repeats = 2;
    s.add("x", 1.0);
    CHECK_THROWS_AS(s.finalize(), Error);
    s.add("x", 3.0);
    s.finalize();
    CHECK(s.metrics.at("x").mean == 2.0);
  }

  TEST_CASE("sha256") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("arm families") {
    const auto c = ExperimentConfig::parse("experiment = nonsmooth_det\n");
    const auto arms = build_arms(c, 1);
    REQUIRE(arms.size() == 3);
    CHECK(arms[0].problem->f_star() == 0.5);
    CHECK(arms[2].problem->f_star() == 1.5);
    CHECK(arms[0].problem->dim() == 20);
    const auto cmp = build_arms(ExperimentConfig::parse("experiment = baseline_compare\n"), 1);
    REQUIRE(cmp.size() == 10);
    for (int i = 1; i < 10; ++i) {
      CHECK(cmp[i].problem->f_star() > cmp[i - 1].problem->f_star());
      CHECK(cmp[i].problem->known_opt()->x_star.norm() < cmp[i - 1].problem->known_opt()->x_star.norm());
    }
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const BfiInstance inst = build_bfi_instance(seed);
      CHECK(inst.arms.size() >= 2);
      CHECK(inst.arms.size() <= 4);
      CHECK(std::count(inst.gaps.begin(), inst.gaps.end(), 0.0) == 1);
      CHECK(inst.eps >= 0.2);
      CHECK(inst.eps <= 0.6);
    }
  }

  TEST_CASE("experiment outputs and manifest") {
    const auto out = scratch("smooth");
    auto c = ExperimentConfig::parse("experiment = smooth_det\nrepeats = 3\nT = 40\n");
    c.set("out", out.string());
    const ExperimentResult r = run_experiment(c);
    CHECK(r.summary.repeats == 3);
    CHECK(r.summary.metrics.at("final_regret").mean > 0.0);
    for (const char* f : {"summary.json", "manifest.json", "curves.csv", "traces/repeat_000.csv", "traces/repeat_002.csv"}) {
      CHECK(std::filesystem::exists(out / f));
    }
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["seeds"] == nlohmann::json::array({1, 2, 3}));
    CHECK(manifest["config"]["T"] == "40");
    for (const auto& a : manifest["artifacts"]) {
      CHECK(a["sha256"] == sha256_hex(slurp(out / a["path"].get<std::string>())));
    }
    CHECK(slurp(out / "traces/repeat_000.csv").rfind(kTraceHeader, 0) == 0);
    std::filesystem::remove_all(out);
  }

  TEST_CASE("identical configs give byte-identical traces") {
    for (const char* text : {"experiment = smooth_stoch\nrepeats = 2\nT = 120\n",
                             "experiment = mab_reduction\nrepeats = 2\nT = 300\n",
                             "experiment = bfi_synthetic\nrepeats = 3\n"}) {
      const auto a = run_experiment(ExperimentConfig::parse(text));
      const auto b = run_experiment(ExperimentConfig::parse(text));
      REQUIRE(a.traces.size() == b.traces.size());
      for (std::size_t i = 0; i < a.traces.size(); ++i) CHECK(a.traces[i].to_csv() == b.traces[i].to_csv());
    }
  }

  TEST_CASE("thread count does not change results") {
    const auto a = run_experiment(ExperimentConfig::parse("experiment = smooth_stoch\nrepeats = 4\nT = 80\nthreads = 1\n"));
    const auto b = run_experiment(ExperimentConfig::parse("experiment = smooth_stoch\nrepeats = 4\nT = 80\nthreads = 4\n"));
    CHECK(a.summary.to_json().dump() == b.summary.to_json().dump());
  }

  TEST_CASE("rank table") {
    const auto c = ExperimentConfig::parse(
        "experiment = baseline_compare\nrepeats = 3\nbudgets = 50, 200\nallocators = flcb, sh, hyperband, round_robin\n");
    const auto rows = compare_allocators(c);
    CHECK(rows.size() == 8);
    for (const auto& r : rows) {
      CHECK(r.ranks.size() == 3);
      CHECK(r.mean_rank >= 1.0);
      CHECK(r.mean_rank <= 10.0);
    }
    const auto single = compare_allocators(ExperimentConfig::parse("experiment = baseline_compare\nrepeats = 2\nallocators = sh\nbudgets = 100\n"));
    CHECK(single.size() == 1);
    CHECK_THROWS_AS(compare_allocators(ExperimentConfig::parse("experiment = baseline_compare\nallocators = magic\n")), Error);
  }

  TEST_CASE("deterministic arms rank first at ample budget") {
    const auto rows = compare_allocators(ExperimentConfig::parse(
        "experiment = baseline_compare\nrepeats = 3\nnoise = none\noptimizer = agd\nK = 4\nminima_step = 0.3\nbudgets = 2000\n"));
    for (const auto& r : rows) {
      CHECK(r.mean_rank == 1.0);
      CHECK(r.std_rank == 0.0);
    }
  }

  TEST_CASE("bounds report") {
    const auto report = emit_bounds_report(ExperimentConfig::parse("experiment = bounds_report\nK = 4\nT = 100\n"));
    CHECK(report["upper"]["fmab"].get<double>() == doctest::Approx(20.0));
    CHECK(report["upper"]["regret_order"].get<double>() == doctest::Approx(20.0));
    const auto two = emit_bounds_report(ExperimentConfig::parse("experiment = bounds_report\ngaps = 0, 1\neps = 0.5\n"));
    CHECK(two["bfi"]["budget"] == 19);
    CHECK(two["lower"]["bfi"].get<double>() == doctest::Approx(std::pow(50.0, -0.5)));
  }

  TEST_CASE("lower bound stays below upper bound times a log factor") {
    for (const char* cls : {"convex_lipschitz", "smooth_convex", "strongly_convex_lipschitz", "strongly_convex_smooth"}) {
      auto c = ExperimentConfig::parse("experiment = bounds_report\nK = 3\nkappa = 4\nT_grid = 10, 31, 100, 316, 1000, 3162, 10000\n");
      c.set("class", cls);
      const auto report = emit_bounds_report(c);
      for (const auto& row : report["sandwich"]) {
        CHECK(row["lower"].get<double>() <= row["upper"].get<double>() * row["log_factor"].get<double>());
      }
    }
  }
}
