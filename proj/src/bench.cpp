#include "polyselect/bench.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "polyselect/prototypes.hpp"
#include "polyselect/tasks.hpp"

namespace polyselect {

std::string to_string(TaskFamily family) { return family == TaskFamily::Xor ? "xor" : "sphere"; }

std::string to_string(Method method) {
  switch (method) {
    case Method::Attn: return "attn";
    case Method::AttnSoftFS: return "attn_soft_fs";
    case Method::AttnSoftFSNorm: return "attn_soft_fs_norm";
    case Method::AttnTopK: return "attn_topk";
    case Method::Proto: return "proto";
  }
  return "unknown";
}

TaskFamily parse_family(const std::string& name) {
  if (name == "xor" || name == "boolean") return TaskFamily::Xor;
  if (name == "sphere") return TaskFamily::Sphere;
  throw UsageError("unknown task family '" + name + "' (expected xor or sphere)");
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::Attn, Method::AttnSoftFS, Method::AttnSoftFSNorm, Method::AttnTopK, Method::Proto}) {
    if (to_string(m) == name) return m;
  }
  throw UsageError("unknown method '" + name + "'");
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_method(item));
  }
  if (out.empty()) throw UsageError("empty method list");
  return out;
}

void SweepSpec::validate() const {
  if (betas.empty() || rs.empty() || ps.empty()) throw DomainError("sweep: parameter ranges must be non-empty");
  if (methods.empty()) throw DomainError("sweep: no methods");
  if (tasks_per_cell < 1) throw DomainError("sweep: tasks_per_cell must be at least 1");
  attention.validate();
}

std::uint64_t cell_task_seed(std::uint64_t global_seed, std::size_t cell_index, std::size_t task_index) {
  return task_seed(task_seed(global_seed, cell_index), task_index);
}

Task make_sweep_task(const SweepSpec& spec, std::size_t beta, std::size_t r, double p, std::uint64_t seed) {
  if (spec.family == TaskFamily::Sphere) {
    SphereTaskSpec s;
    s.sample_count = spec.sphere_samples;
    s.query_count = spec.query_count;
    s.seed = seed;
    return gen_sphere_task(s);
  }
  BooleanTaskSpec b;
  b.n = spec.alpha + beta;
  b.alpha = spec.alpha;
  b.p = p;
  b.r = r;
  b.query_count = spec.query_count;
  b.encoding = EncodingScheme::PlusMinus;
  b.seed = seed;
  return gen_boolean_task(b);
}

double evaluate_method(const Task& task, Method method, const SweepSpec& spec) {
  const auto& labels = task.query.labels();
  if (method == Method::Attn) return attend_classify(task, spec.attention).accuracy(labels);
  if (method == Method::Proto) return proto_classify(task, spec.attention.tau_inv).accuracy(labels);
  SelectionConfig sel = spec.selection;
  switch (method) {
    case Method::AttnSoftFS:
      sel.mode = SelectionMode::SoftRescale;
      break;
    case Method::AttnSoftFSNorm:
      sel.mode = SelectionMode::SoftRescaleNormalized;
      break;
    default:
      sel.mode = SelectionMode::TopK;
      sel.top_k = spec.family == TaskFamily::Xor ? spec.alpha : 2;
      break;
  }
  return fs_classify(task, spec.attention, sel).accuracy(labels);
}

std::pair<double, double> mean_and_se(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

SweepGrid run_sweep(const SweepSpec& spec) {
  spec.validate();
  struct Cell {
    double p;
    std::size_t beta, r;
  };
  std::vector<Cell> cells;
  for (double p : spec.ps) {
    for (std::size_t b : spec.betas) {
      for (std::size_t r : spec.rs) cells.push_back({p, b, r});
    }
  }
  if (spec.family == TaskFamily::Sphere) cells.resize(1);

  const std::size_t methods = spec.methods.size();
  const std::size_t per_cell = spec.tasks_per_cell;
  const std::size_t jobs = cells.size() * per_cell;
  // accuracy[job * methods + m]; NaN marks a failed evaluation.
  std::vector<double> accuracy(jobs * methods, std::nan(""));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t c = job / per_cell;
      const std::size_t t = job % per_cell;
      try {
        const Task task = make_sweep_task(spec, cells[c].beta, cells[c].r, cells[c].p,
                                          cell_task_seed(spec.global_seed, c, t));
        for (std::size_t m = 0; m < methods; ++m) {
          try {
            accuracy[job * methods + m] = evaluate_method(task, spec.methods[m], spec);
          } catch (const std::exception&) {
          }
        }
      } catch (const std::exception&) {
      }
    }
  };
  std::size_t threads = spec.threads ? spec.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  // Aggregation walks tasks in index order, so results do not depend on
  // how the jobs were scheduled.
  SweepGrid grid;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t m = 0; m < methods; ++m) {
      CellResult res;
      res.family = to_string(spec.family);
      if (spec.family == TaskFamily::Sphere) {
        res.alpha = 2;
        res.beta = 1;
        res.p = 0.0;
        res.r = 0;
      } else {
        res.alpha = spec.alpha;
        res.beta = cells[c].beta;
        res.p = cells[c].p;
        res.r = cells[c].r;
      }
      res.method = spec.methods[m];
      res.seed = spec.global_seed;
      for (std::size_t t = 0; t < per_cell; ++t) {
        const double a = accuracy[(c * per_cell + t) * methods + m];
        if (std::isnan(a)) {
          ++res.failures;
        } else {
          res.per_task.push_back(a);
        }
      }
      res.tasks = res.per_task.size();
      std::tie(res.accuracy_mean, res.accuracy_se) = mean_and_se(res.per_task);
      grid.push_back(std::move(res));
    }
  }
  return grid;
}

}  // namespace polyselect
