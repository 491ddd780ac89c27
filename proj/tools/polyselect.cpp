// polyselect command-line front end.
#include <cmath>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "format.hpp"
#include "polyselect/bench.hpp"
#include "polyselect/boolefn.hpp"
#include "polyselect/prototypes.hpp"
#include "polyselect/task_io.hpp"
#include "polyselect/tasks.hpp"
#include "polyselect/theory.hpp"

using namespace polyselect;
namespace fs = std::filesystem;

namespace {

struct Global {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string format = "csv";
  bool svg = false;
  std::size_t threads = 0;
};

struct Classifier {
  std::string kernel = "dot";
  double tau = 1.0;
  std::size_t rounds = 10;
  std::string dispersion = "mad";
  double epsilon = 1e-8;
  double fs_tau = 1.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--kernel", kernel, "dot, cosine, sqeuclidean or laplace")->capture_default_str();
    cmd->add_option("--tau", tau, "inverse temperature of the classifier softmax")->capture_default_str();
    cmd->add_option("--rounds", rounds, "self-attention repetitions R")->capture_default_str();
    cmd->add_option("--dispersion", dispersion, "mad or std")->capture_default_str();
    cmd->add_option("--epsilon", epsilon, "standardisation constant")->capture_default_str();
    cmd->add_option("--fs-tau", fs_tau, "inverse temperature of the selection self-attention")->capture_default_str();
  }
  void apply(SweepSpec& s) const {
    s.attention = {parse_kernel(kernel), tau};
    s.selection.repetitions = rounds;
    s.selection.dispersion = parse_dispersion(dispersion);
    s.selection.epsilon = epsilon;
    s.selection.tau_inv = fs_tau;
  }
};

void check_format(const std::string& f) {
  if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

void run_gen_tasks(const Global& g, const std::string& family, const BooleanTaskSpec& base, std::size_t count,
                   std::string out) {
  std::vector<Task> tasks;
  for (std::size_t t = 0; t < count; ++t) {
    if (family == "sphere") {
      SphereTaskSpec s;
      s.query_count = base.query_count;
      s.seed = task_seed(g.seed, t);
      tasks.push_back(gen_sphere_task(s));
    } else if (family == "xor") {
      BooleanTaskSpec s = base;
      s.seed = task_seed(g.seed, t);
      tasks.push_back(gen_boolean_task(s));
    } else {
      throw UsageError("unknown task family '" + family + "'");
    }
  }
  if (out.empty()) out = (fs::path(g.out_dir) / "tasks.json").string();
  write_tasks(out, tasks);
  std::cout << "wrote " << tasks.size() << " tasks to " << out << "\n";
}

void run_eval(const Global& g, const std::string& file, const std::string& methods, const Classifier& cls,
              std::size_t top_k) {
  check_format(g.format);
  const auto tasks = read_tasks(file);
  SweepSpec spec;
  cls.apply(spec);
  spec.methods = parse_methods(methods);
  nlohmann::json rows = nlohmann::json::array();
  std::string csv = "task,method,accuracy\n";
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const Task& task = tasks[t];
    task.validate();
    spec.family = TaskFamily::Xor;
    spec.alpha = top_k ? top_k : (task.meta ? task.meta->alpha : 0);
    for (Method m : spec.methods) {
      if (m == Method::AttnTopK && spec.alpha == 0) throw UsageError("attn_topk needs --top-k for tasks without metadata");
      const double acc = evaluate_method(task, m, spec);
      csv += std::to_string(t) + ',' + to_string(m) + ',' + fmt_double(acc) + '\n';
      rows.push_back({{"task", t}, {"method", to_string(m)}, {"accuracy", acc}});
    }
  }
  std::cout << (g.format == "csv" ? csv : rows.dump(2) + "\n");
}

void run_sweep_cmd(const Global& g, SweepSpec spec, const std::string& methods, const Classifier& cls,
                   const std::string& dump) {
  check_format(g.format);
  cls.apply(spec);
  spec.methods = parse_methods(methods);
  spec.global_seed = g.seed;
  spec.threads = g.threads;
  const SweepGrid grid = run_sweep(spec);
  const fs::path dir(g.out_dir);
  const fs::path path = dir / (g.format == "csv" ? "sweep.csv" : "sweep.json");
  if (g.format == "csv") {
    emit_csv(grid, path);
  } else {
    emit_json(grid, path);
  }
  std::cout << "wrote " << path.string() << "\n";
  if (!dump.empty()) {
    emit_per_task_csv(grid, dump);
    std::cout << "wrote " << dump << "\n";
  }
  if (g.svg) {
    for (Method m : spec.methods) {
      const auto svg = dir / ("sweep_" + to_string(m) + ".svg");
      emit_svg_heatmap(grid, m, svg);
      std::cout << "wrote " << svg.string() << "\n";
    }
  }
}

void run_theory(const Global& g, TheoryParams params, const std::vector<std::size_t>& betas, std::size_t trials) {
  check_format(g.format);
  nlohmann::json rows = nlohmann::json::array();
  std::string csv =
      "alpha,beta,p,r,kernel,mu,var,var_independent,mu_alternative,exhaustive_mu,exhaustive_var,mc_mean,mc_var,"
      "misclass_rate,misclass_se\n";
  for (std::size_t b : betas) {
    params.beta_irrelevant = b;
    const ScoreStats s = support_sum_stats(params);
    const ScoreStats ind = independent_sum_stats(params);
    const double alt = alternative_mean(params);
    std::string ex_mu, ex_var;
    nlohmann::json row{{"alpha", params.alpha}, {"beta", b},          {"p", params.p},
                       {"r", params.r},         {"kernel", to_string(params.kernel)},
                       {"mu", s.mean},          {"var", s.variance}, {"var_independent", ind.variance},
                       {"mu_alternative", alt}};
    if (params.alpha <= 4 && b <= 6 && params.r <= 3) {
      const ScoreStats e = exhaustive_stats(params);
      ex_mu = fmt_double(e.mean);
      ex_var = fmt_double(e.variance);
      row["exhaustive_mu"] = e.mean;
      row["exhaustive_var"] = e.variance;
    }
    std::string mc = ",,,";
    if (trials > 0) {
      const MonteCarloResult m = mc_misclassification(params, trials, g.seed);
      mc = fmt_double(m.mean) + ',' + fmt_double(m.variance) + ',' + fmt_double(m.misclass_rate) + ',' +
           fmt_double(m.rate_se);
      row["mc_mean"] = m.mean;
      row["mc_var"] = m.variance;
      row["misclass_rate"] = m.misclass_rate;
      row["misclass_se"] = m.rate_se;
    }
    csv += std::to_string(params.alpha) + ',' + std::to_string(b) + ',' + fmt_double(params.p) + ',' +
           std::to_string(params.r) + ',' + to_string(params.kernel) + ',' + fmt_double(s.mean) + ',' +
           fmt_double(s.variance) + ',' + fmt_double(ind.variance) + ',' + fmt_double(alt) + ',' + ex_mu + ',' +
           ex_var + ',' + mc + '\n';
    rows.push_back(std::move(row));
  }
  std::cout << (g.format == "csv" ? csv : rows.dump(2) + "\n");
}

const std::vector<std::uint64_t>& cached_set(std::size_t n, const std::string& cache_dir) {
  if (cache_dir.empty() || n > 4) return threshold_set(n);
  return threshold_set(n, fs::path(cache_dir) / ("threshold_set_n" + std::to_string(n) + ".txt"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polythetic few-shot classification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  Global g;
  app.add_option("--seed", g.seed, "global seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--format", g.format, "csv or json")->capture_default_str();
  app.add_flag("--svg", g.svg, "also write SVG heatmaps");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)")->capture_default_str();

  // gen-tasks
  auto* gen = app.add_subcommand("gen-tasks", "generate tasks and write them as JSON");
  std::string gen_family = "xor", gen_encoding = "plus_minus", gen_out;
  BooleanTaskSpec gen_spec;
  std::size_t gen_count = 10;
  gen->add_option("--family", gen_family, "xor or sphere")->capture_default_str();
  gen->add_option("--n", gen_spec.n, "features")->capture_default_str();
  gen->add_option("--alpha", gen_spec.alpha, "active features")->capture_default_str();
  gen->add_option("--p", gen_spec.p, "Bernoulli rate of irrelevant bits")->capture_default_str();
  gen->add_option("--r", gen_spec.r, "copies of each active pattern")->capture_default_str();
  gen->add_option("--queries", gen_spec.query_count, "queries per task")->capture_default_str();
  gen->add_option("--encoding", gen_encoding, "plus_minus or zero_one")->capture_default_str();
  gen->add_option("--count", gen_count, "number of tasks")->capture_default_str();
  gen->add_option("--out", gen_out, "output file (default <out-dir>/tasks.json)");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate classifiers on a task file");
  std::string eval_file, eval_methods = "attn,attn_soft_fs,proto";
  std::size_t eval_top_k = 0;
  Classifier eval_cls;
  eval->add_option("tasks", eval_file, "task JSON file")->required();
  eval->add_option("--methods", eval_methods, "comma-separated methods")->capture_default_str();
  eval->add_option("--top-k", eval_top_k, "k for attn_topk (default: task alpha)");
  eval_cls.add(eval);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "paired accuracy sweep over a parameter grid");
  SweepSpec sweep_spec;
  std::string sweep_family = "xor", sweep_methods = "attn,attn_soft_fs", sweep_dump;
  Classifier sweep_cls;
  sweep->add_option("--family", sweep_family, "xor or sphere")->capture_default_str();
  sweep->add_option("--alpha", sweep_spec.alpha, "active features")->capture_default_str();
  sweep->add_option("--betas", sweep_spec.betas, "irrelevant feature counts")->delimiter(',');
  sweep->add_option("--rs", sweep_spec.rs, "pattern repetitions")->delimiter(',');
  sweep->add_option("--ps", sweep_spec.ps, "Bernoulli rates")->delimiter(',');
  sweep->add_option("--queries", sweep_spec.query_count, "queries per task")->capture_default_str();
  sweep->add_option("--tasks", sweep_spec.tasks_per_cell, "tasks per cell")->capture_default_str();
  sweep->add_option("--methods", sweep_methods, "comma-separated methods")->capture_default_str();
  sweep->add_option("--dump-tasks", sweep_dump, "also write per-task accuracies to this CSV");
  sweep_cls.add(sweep);

  // theory
  auto* theory = app.add_subcommand("theory", "analytic, exhaustive and Monte-Carlo moments");
  TheoryParams tp;
  std::string theory_kernel = "dot";
  std::vector<std::size_t> theory_betas{0, 1, 2, 3, 4};
  std::size_t theory_trials = 20000;
  theory->add_option("--alpha", tp.alpha)->capture_default_str();
  theory->add_option("--betas", theory_betas)->delimiter(',');
  theory->add_option("--p", tp.p)->capture_default_str();
  theory->add_option("--r", tp.r)->capture_default_str();
  theory->add_option("--kernel", theory_kernel)->capture_default_str();
  theory->add_option("--tau", tp.tau_inv)->capture_default_str();
  theory->add_option("--trials", theory_trials, "Monte-Carlo trials (0 skips)")->capture_default_str();

  // thresholds
  auto* thr = app.add_subcommand("thresholds", "exact threshold-function analysis");
  thr->require_subcommand(1);
  std::string cache_dir;
  thr->add_option("--cache-dir", cache_dir, "directory for cached threshold sets");
  std::size_t thr_n = 2;
  std::string thr_hex;
  auto* thr_count = thr->add_subcommand("count", "number of threshold functions of n variables");
  thr_count->add_option("--n", thr_n)->capture_default_str();
  auto* thr_check = thr->add_subcommand("check", "decide whether a truth table is a threshold function");
  thr_check->add_option("hex", thr_hex, "truth table as hex")->required();
  thr_check->add_option("--n", thr_n, "number of variables");
  auto* thr_approx = thr->add_subcommand("approx", "best threshold approximation of a truth table");
  thr_approx->add_option("hex", thr_hex, "truth table as hex")->required();
  thr_approx->add_option("--n", thr_n, "number of variables");
  auto* thr_xor = thr->add_subcommand("verify-xor-worst", "check XOR_n is the hardest function to threshold");
  thr_xor->add_option("--n", thr_n)->capture_default_str();
  auto* thr_stats = thr->add_subcommand("stats", "solved fraction and mean best accuracy");
  thr_stats->add_option("--n", thr_n)->capture_default_str();

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "run a named recipe");
  std::string recipe;
  std::size_t rep_tasks = 0;
  bool rep_no_svg = false;
  rep->add_option("recipe", recipe, "one of: " + join(recipe_names()))->required();
  rep->add_option("--tasks", rep_tasks, "override the recipe's task count");
  rep->add_flag("--no-svg", rep_no_svg, "skip SVG heatmaps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      gen_spec.encoding = parse_encoding(gen_encoding);
      run_gen_tasks(g, gen_family, gen_spec, gen_count, gen_out);
    } else if (*eval) {
      run_eval(g, eval_file, eval_methods, eval_cls, eval_top_k);
    } else if (*sweep) {
      sweep_spec.family = parse_family(sweep_family);
      run_sweep_cmd(g, sweep_spec, sweep_methods, sweep_cls, sweep_dump);
    } else if (*theory) {
      tp.kernel = parse_kernel(theory_kernel);
      run_theory(g, tp, theory_betas, theory_trials);
    } else if (*thr) {
      const auto n_opt = [&](CLI::App* c) -> std::optional<std::size_t> {
        return c->count("--n") ? std::optional<std::size_t>(thr_n) : std::nullopt;
      };
      if (*thr_count) {
        if (thr_n > 4) throw UsageError("count supports n <= 4");
        std::cout << "n,count\n" << thr_n << ',' << cached_set(thr_n, cache_dir).size() << "\n";
      } else if (*thr_check) {
        const auto f = BooleanFunction::from_hex(thr_hex, n_opt(thr_check));
        const auto w = is_threshold(f);
        if (!w) {
          std::cout << "threshold: no\n";
        } else {
          std::cout << "threshold: yes\nweights: " << join(w->weight_strings()) << "\nthreshold_value: "
                    << w->threshold_string() << "\n";
        }
      } else if (*thr_approx) {
        const auto f = BooleanFunction::from_hex(thr_hex, n_opt(thr_approx));
        if (!cache_dir.empty()) cached_set(f.n(), cache_dir);
        const auto a = best_threshold_agreement(f);
        std::cout << "agreement: " << a.agreement << "/" << f.size() << "\nbest: " << a.best.to_hex()
                  << "\nweights: " << join(a.witness.weight_strings())
                  << "\nthreshold_value: " << a.witness.threshold_string() << "\n";
      } else if (*thr_xor) {
        if (thr_n > 4) throw UsageError("verify-xor-worst supports n <= 4");
        cached_set(thr_n, cache_dir);
        const auto r = verify_xor_worst(thr_n);
        std::cout << "n,holds,minimum,expected,functions_at_minimum\n"
                  << thr_n << ',' << (r.holds ? "true" : "false") << ',' << r.minimum << ',' << r.expected << ','
                  << r.worst.size() << "\n";
        if (!r.holds) return 1;
      } else if (*thr_stats) {
        if (thr_n > 4) throw UsageError("stats supports n <= 4");
        cached_set(thr_n, cache_dir);
        const auto s = threshold_stats(thr_n);
        std::cout << "n,threshold_count,function_count,solved_fraction,mean_best_accuracy\n"
                  << thr_n << ',' << s.threshold_count << ',' << s.function_count << ','
                  << fmt_double(s.solved_fraction) << ',' << fmt_double(s.mean_best_accuracy) << "\n";
      }
    } else if (*rep) {
      RecipeOptions opt;
      opt.seed = g.seed;
      if (rep_tasks) opt.tasks = rep_tasks;
      opt.svg = !rep_no_svg;
      opt.threads = g.threads;
      for (const auto& p : reproduce(recipe, g.out_dir, opt)) std::cout << "wrote " << p.string() << "\n";
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
