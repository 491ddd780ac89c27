#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "polyselect/bench.hpp"

using namespace polyselect;

namespace {

SweepSpec small_spec() {
  SweepSpec s;
  s.alpha = 2;
  s.betas = {0, 3};
  s.rs = {2};
  s.tasks_per_cell = 12;
  s.methods = {Method::Attn, Method::AttnSoftFS, Method::Proto};
  s.selection.repetitions = 2;
  s.global_seed = 21;
  s.threads = 1;
  return s;
}

}  // namespace

TEST_CASE("method names round-trip") {
  for (Method m : {Method::Attn, Method::AttnSoftFS, Method::AttnSoftFSNorm, Method::AttnTopK, Method::Proto}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK(parse_methods("attn,proto") == std::vector<Method>{Method::Attn, Method::Proto});
  CHECK_THROWS_AS(parse_method("svm"), UsageError);
  CHECK_THROWS_AS(parse_family("torus"), UsageError);
}

TEST_CASE("sweep grid layout and statistics") {
  const auto grid = run_sweep(small_spec());
  REQUIRE(grid.size() == 6);
  CHECK(grid[0].beta == 0);
  CHECK(grid[3].beta == 3);
  CHECK(grid[1].method == Method::AttnSoftFS);
  // No irrelevant bits and repeated patterns: attention is exact.
  CHECK(grid[0].accuracy_mean == 1.0);
  for (const auto& c : grid) {
    CHECK(c.failures == 0);
    CHECK(c.per_task.size() == 12);
    double m = 0, ss = 0;
    for (double v : c.per_task) m += v;
    m /= 12;
    for (double v : c.per_task) ss += (v - m) * (v - m);
    CHECK(c.accuracy_mean == doctest::Approx(m));
    CHECK(c.accuracy_se == doctest::Approx(std::sqrt(ss / 11) / std::sqrt(12.0)));
  }
}

TEST_CASE("a method listed twice sees the same tasks") {
  auto s = small_spec();
  s.methods = {Method::AttnSoftFS, Method::AttnSoftFS};
  const auto grid = run_sweep(s);
  CHECK(grid[0].per_task == grid[1].per_task);
  CHECK(grid[2].per_task == grid[3].per_task);
}

TEST_CASE("results do not depend on the thread count") {
  auto s = small_spec();
  const auto one = grid_to_csv(run_sweep(s));
  s.threads = 4;
  CHECK(grid_to_csv(run_sweep(s)) == one);
}

TEST_CASE("csv round-trip") {
  const auto grid = run_sweep(small_spec());
  const auto back = grid_from_csv(grid_to_csv(grid));
  REQUIRE(back.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(back[i].method == grid[i].method);
    CHECK(back[i].beta == grid[i].beta);
    CHECK(std::abs(back[i].accuracy_mean - grid[i].accuracy_mean) < 1e-12);
    CHECK(std::abs(back[i].accuracy_se - grid[i].accuracy_se) < 1e-12);
    CHECK(back[i].seed == 21);
  }
  CHECK_THROWS_AS(grid_from_csv("nope\n"), DomainError);
  CHECK_THROWS_AS(emit_csv({}, "unused.csv"), DomainError);
}

TEST_CASE("single cell csv has one row per method") {
  auto s = small_spec();
  s.betas = {1};
  const auto csv = grid_to_csv(run_sweep(s));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.rfind("family,alpha,beta,p,r,method,tasks,accuracy_mean,accuracy_se,seed\n", 0) == 0);
}

TEST_CASE("heatmap colours") {
  CHECK(heat_colour(0.5) == kColdColour);
  CHECK(heat_colour(0.2) == kColdColour);
  CHECK(heat_colour(1.0) == kHotColour);
  CHECK(heat_colour(0.75) != heat_colour(0.8));
  const auto svg = svg_heatmap(run_sweep(small_spec()), Method::Attn, "t");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find(kHotColour) != std::string::npos);
}

TEST_CASE("sphere sweeps produce one cell") {
  SweepSpec s;
  s.family = TaskFamily::Sphere;
  s.tasks_per_cell = 4;
  s.methods = {Method::Attn, Method::AttnTopK};
  s.threads = 1;
  const auto grid = run_sweep(s);
  CHECK(grid.size() == 2);
  CHECK(grid[0].family == "sphere");
}

TEST_CASE("recipes") {
  CHECK(recipe_names().size() == 7);
  CHECK_THROWS_AS(reproduce("fig99", "unused"), UsageError);
  const auto dir = std::filesystem::temp_directory_path() / "polyselect_recipe_test";
  std::filesystem::remove_all(dir);
  const auto files = reproduce("appC_boundary", dir);
  CHECK(files.size() == 3);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));
  std::filesystem::remove_all(dir);
}
