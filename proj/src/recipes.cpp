#include <algorithm>
#include <cmath>

#include "format.hpp"
#include "polyselect/bench.hpp"
#include "polyselect/boolefn.hpp"
#include "polyselect/tasks.hpp"
#include "polyselect/theory.hpp"

namespace polyselect {

namespace {

using Paths = std::vector<std::filesystem::path>;

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> v;
  for (std::size_t i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

SweepSpec xor4_grid(const RecipeOptions& opt, std::size_t rounds, std::vector<Method> methods) {
  SweepSpec s;
  s.family = TaskFamily::Xor;
  s.alpha = 4;
  s.betas = range(0, 10);
  s.rs = range(1, 10);
  s.ps = {0.5};
  s.methods = std::move(methods);
  s.tasks_per_cell = opt.tasks.value_or(500);
  s.attention = {KernelKind::Dot, 1.0};
  s.selection.repetitions = rounds;
  s.global_seed = opt.seed;
  s.threads = opt.threads;
  return s;
}

void write_grid(const SweepGrid& grid, const std::filesystem::path& dir, const std::string& stem,
                const RecipeOptions& opt, Paths& out) {
  emit_csv(grid, dir / (stem + ".csv"));
  out.push_back(dir / (stem + ".csv"));
  if (!opt.svg) return;
  std::vector<Method> seen;
  for (const auto& c : grid) {
    if (std::find(seen.begin(), seen.end(), c.method) != seen.end()) continue;
    seen.push_back(c.method);
    const auto path = dir / (stem + "_" + to_string(c.method) + ".svg");
    emit_svg_heatmap(grid, c.method, path, stem + " " + to_string(c.method));
    out.push_back(path);
  }
}

Paths fig7_soft_fs(const std::filesystem::path& dir, const RecipeOptions& opt) {
  Paths out;
  for (std::size_t rounds : {0, 2, 5, 10}) {
    const SweepGrid grid = run_sweep(xor4_grid(opt, rounds, {Method::Attn, Method::AttnSoftFS}));
    write_grid(grid, dir, "fig7_soft_fs_R" + std::to_string(rounds), opt, out);
  }
  return out;
}

Paths fig11_topk(const std::filesystem::path& dir, const RecipeOptions& opt) {
  Paths out;
  const SweepGrid grid = run_sweep(xor4_grid(opt, 2, {Method::AttnSoftFS, Method::AttnTopK}));
  write_grid(grid, dir, "fig11_topk", opt, out);
  return out;
}

Paths table3_counts(const std::filesystem::path& dir, const RecipeOptions&) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t n = 1; n <= 4; ++n) {
    const ThresholdStats st = threshold_stats(n);
    rows.push_back({{"n", n},
                    {"count", st.threshold_count},
                    {"functions", st.function_count},
                    {"solved_fraction", st.solved_fraction},
                    {"mean_best_accuracy", st.mean_best_accuracy}});
  }
  const auto path = dir / "table3_counts.json";
  write_text_file(path, rows.dump(2) + "\n");
  return {path};
}

Paths appD_xor_bound(const std::filesystem::path& dir, const RecipeOptions&) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t n = 2; n <= 5; ++n) {
    nlohmann::json row{{"n", n}, {"max", xor_max_accuracy(n)}, {"corners", std::uint64_t{1} << n}};
    if (n <= 4) {
      threshold_set(n, dir / ("threshold_set_n" + std::to_string(n) + ".txt"));
      const XorWorstReport rep = verify_xor_worst(n);
      row["xor_is_worst"] = rep.holds;
      row["minimum_agreement"] = rep.minimum;
      row["functions_at_minimum"] = rep.worst.size();
    }
    rows.push_back(std::move(row));
  }
  const auto path = dir / "appD_xor_bound.json";
  write_text_file(path, rows.dump(2) + "\n");
  return {path};
}

LabeledSet and_support() {
  // Corners of the square; only (+1, +1) is class 1.
  return LabeledSet(Matrix::from_rows({{-1, -1}, {-1, 1}, {1, -1}, {1, 1}}), {0, 0, 0, 1}, 2);
}

double and_margin(const LabeledSet& support, double tau, double x, double y) {
  const ClassProbabilities pr = attend(Matrix::from_rows({{x, y}}), support, {KernelKind::Dot, tau});
  return pr(0, 1) - pr(0, 0);
}

Paths appC_boundary(const std::filesystem::path& dir, const RecipeOptions& opt) {
  Paths out;
  const LabeledSet support = and_support();
  std::string csv = "tau,x,y_analytic,y_numeric,p1_minus_p0\n";
  for (double tau : {1.0, 2.0}) {
    for (int i = 0; i < 50; ++i) {
      const double x = 0.2 + 4.8 * i / 49.0;
      const double y = and_boundary(tau, x);
      // P1 - P0 increases with y; bracket the root and bisect.
      double lo = -1.0, hi = y + 1.0;
      while (and_margin(support, tau, x, lo) > 0.0) lo -= 1.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (and_margin(support, tau, x, mid) > 0.0 ? hi : lo) = mid;
      }
      csv += fmt_double(tau) + ',' + fmt_double(x) + ',' + fmt_double(y) + ',' + fmt_double(0.5 * (lo + hi)) + ',' +
             fmt_double(and_margin(support, tau, x, y)) + '\n';
    }
    GridSpec grid;
    grid.x_steps = grid.y_steps = 81;
    const auto field = confidence_field(support, {KernelKind::Dot, tau}, grid);
    const auto fpath = dir / ("appC_confidence_tau" + std::to_string(static_cast<int>(tau)) + ".csv");
    write_confidence_csv(fpath, field);
    out.push_back(fpath);
  }
  (void)opt;
  const auto path = dir / "appC_boundary.csv";
  write_text_file(path, csv);
  out.insert(out.begin(), path);
  return out;
}

Paths fig5_sphere(const std::filesystem::path& dir, const RecipeOptions& opt) {
  const std::size_t tasks = opt.tasks.value_or(200);
  SelectionConfig sel;
  sel.repetitions = 10;
  sel.tau_inv = 1.0;
  sel.dispersion = Dispersion::MeanAbsoluteDeviation;
  std::string csv = "task,mad_x0,mad_y0,mad_z0,mad_x,mad_y,mad_z\n";
  std::size_t passing = 0;
  for (std::size_t t = 0; t < tasks; ++t) {
    SphereTaskSpec spec;
    spec.seed = task_seed(opt.seed, t);
    const Task task = gen_sphere_task(spec);
    const auto traj = score_trajectory(task.support, sel);
    const auto& a = traj.front();
    const auto& b = traj.back();
    csv += std::to_string(t);
    for (double v : a) csv += ',' + fmt_double(v);
    for (double v : b) csv += ',' + fmt_double(v);
    csv += '\n';
    if (b[2] < 0.2 * a[2] && b[0] > 0.6 * a[0] && b[1] > 0.6 * a[1]) ++passing;
  }
  Paths out;
  const auto path = dir / "fig5_sphere.csv";
  write_text_file(path, csv);
  out.push_back(path);

  SweepSpec s;
  s.family = TaskFamily::Sphere;
  s.methods = {Method::Attn, Method::AttnSoftFS, Method::AttnTopK, Method::Proto};
  s.tasks_per_cell = tasks;
  s.selection = sel;
  s.global_seed = opt.seed;
  s.threads = opt.threads;
  const SweepGrid grid = run_sweep(s);
  emit_csv(grid, dir / "fig5_sphere_accuracy.csv");
  out.push_back(dir / "fig5_sphere_accuracy.csv");

  nlohmann::json summary{{"tasks", tasks},
                         {"rounds", sel.repetitions},
                         {"tasks_passing", passing},
                         {"fraction_passing", static_cast<double>(passing) / static_cast<double>(tasks)}};
  const auto spath = dir / "fig5_sphere_summary.json";
  write_text_file(spath, summary.dump(2) + "\n");
  out.push_back(spath);
  return out;
}

Paths binary_strings_fs_raw(const std::filesystem::path& dir, const RecipeOptions& opt) {
  SweepGrid all;
  for (std::size_t n : {5, 10}) {
    for (std::size_t alpha = 2; alpha <= 4; ++alpha) {
      SweepSpec s;
      s.alpha = alpha;
      s.betas = {n - alpha};
      s.rs = {5};
      s.methods = {Method::Attn, Method::AttnSoftFS, Method::Proto};
      s.tasks_per_cell = opt.tasks.value_or(1000);
      s.global_seed = task_seed(opt.seed, n * 16 + alpha);
      s.threads = opt.threads;
      for (auto& c : run_sweep(s)) {
        c.seed = opt.seed;
        all.push_back(std::move(c));
      }
    }
  }
  const auto path = dir / "binary_strings_fs_raw.csv";
  emit_csv(all, path);
  return {path};
}

}  // namespace

const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names{"fig7_soft_fs", "fig11_topk",  "table3_counts",        "appD_xor_bound",
                                              "appC_boundary", "fig5_sphere", "binary_strings_fs_raw"};
  return names;
}

std::vector<std::filesystem::path> reproduce(const std::string& recipe, const std::filesystem::path& out_dir,
                                             const RecipeOptions& options) {
  using Fn = Paths (*)(const std::filesystem::path&, const RecipeOptions&);
  Fn fn = nullptr;
  if (recipe == "fig7_soft_fs") fn = fig7_soft_fs;
  if (recipe == "fig11_topk") fn = fig11_topk;
  if (recipe == "table3_counts") fn = table3_counts;
  if (recipe == "appD_xor_bound") fn = appD_xor_bound;
  if (recipe == "appC_boundary") fn = appC_boundary;
  if (recipe == "fig5_sphere") fn = fig5_sphere;
  if (recipe == "binary_strings_fs_raw") fn = binary_strings_fs_raw;
  if (!fn) throw UsageError("unknown recipe '" + recipe + "'");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string());
  return fn(out_dir, options);
}

}  // namespace polyselect
