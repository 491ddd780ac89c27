// Experiment harness: paired sweeps over generated tasks, CSV/JSON/SVG
// output and the named reproduction recipes.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "polyselect/core.hpp"
#include "polyselect/kernels.hpp"
#include "polyselect/selection.hpp"

namespace polyselect {

enum class TaskFamily { Xor, Sphere };
enum class Method { Attn, AttnSoftFS, AttnSoftFSNorm, AttnTopK, Proto };

std::string to_string(TaskFamily family);
std::string to_string(Method method);
TaskFamily parse_family(const std::string& name);
Method parse_method(const std::string& name);
/// Comma-separated list, e.g. "attn,attn_soft_fs".
std::vector<Method> parse_methods(const std::string& list);

struct SweepSpec {
  TaskFamily family = TaskFamily::Xor;
  std::size_t alpha = 4;
  std::vector<std::size_t> betas{3};
  std::vector<std::size_t> rs{2};
  std::vector<double> ps{0.5};
  std::size_t query_count = 32;
  /// Support size for the sphere family.
  std::size_t sphere_samples = 64;
  std::vector<Method> methods{Method::Attn, Method::AttnSoftFS};
  std::size_t tasks_per_cell = 500;
  AttentionConfig attention;
  SelectionConfig selection;
  std::uint64_t global_seed = 0;
  /// Worker threads; 0 means one per hardware thread.
  std::size_t threads = 0;

  /// Throws DomainError on empty ranges, tasks_per_cell == 0 or no methods.
  void validate() const;
};

struct CellResult {
  std::string family;
  std::size_t alpha = 0;
  std::size_t beta = 0;
  double p = 0.0;
  std::size_t r = 0;
  Method method = Method::Attn;
  /// Tasks that evaluated successfully.
  std::size_t tasks = 0;
  double accuracy_mean = 0.0;
  /// Sample standard deviation over tasks divided by sqrt(tasks).
  double accuracy_se = 0.0;
  std::uint64_t seed = 0;
  std::size_t failures = 0;
  /// Per-task accuracies in task order (not written to the grid CSV).
  std::vector<double> per_task;
};

using SweepGrid = std::vector<CellResult>;

/// Seed of task t in cell c: task_seed(task_seed(global, c), t).
std::uint64_t cell_task_seed(std::uint64_t global_seed, std::size_t cell_index, std::size_t task_index);

/// Generates the task of one cell for the spec's family.
Task make_sweep_task(const SweepSpec& spec, std::size_t beta, std::size_t r, double p, std::uint64_t seed);

/// Query accuracy of one method on one task. TopK keeps alpha features on
/// XOR tasks and two on sphere tasks.
double evaluate_method(const Task& task, Method method, const SweepSpec& spec);

/// Cells are ordered p, beta, r (outer to inner); each cell yields one
/// result per method, in spec order. Every method sees the same tasks.
SweepGrid run_sweep(const SweepSpec& spec);

/// mean and sample-std/sqrt(n) of the values.
std::pair<double, double> mean_and_se(const std::vector<double>& values);

// Output.

/// Header: family,alpha,beta,p,r,method,tasks,accuracy_mean,accuracy_se,seed
std::string grid_to_csv(const SweepGrid& grid);
SweepGrid grid_from_csv(const std::string& text);
nlohmann::json grid_to_json(const SweepGrid& grid);

void emit_csv(const SweepGrid& grid, const std::filesystem::path& path);
SweepGrid parse_csv(const std::filesystem::path& path);
void emit_json(const SweepGrid& grid, const std::filesystem::path& path);
/// family,alpha,beta,p,r,method,task,accuracy
void emit_per_task_csv(const SweepGrid& grid, const std::filesystem::path& path);

/// Linear colour scale: accuracy 0.5 (and below) is the coldest colour,
/// 1.0 the hottest. Returns "#rrggbb".
std::string heat_colour(double accuracy);
extern const char* const kColdColour;
extern const char* const kHotColour;

/// Heatmap of one method: beta along x, r along y. Uses the first p in
/// the grid when several are present.
std::string svg_heatmap(const SweepGrid& grid, Method method, const std::string& title);
void emit_svg_heatmap(const SweepGrid& grid, Method method, const std::filesystem::path& path,
                      const std::string& title = "");

/// Writes text atomically enough for our purposes; throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Recipes.

struct RecipeOptions {
  std::uint64_t seed = 0;
  /// Overrides each recipe's pinned task count.
  std::optional<std::size_t> tasks;
  bool svg = true;
  std::size_t threads = 0;
};

const std::vector<std::string>& recipe_names();

/// Runs a named recipe and returns the files it wrote, in write order.
/// Throws UsageError for unknown names.
std::vector<std::filesystem::path> reproduce(const std::string& recipe, const std::filesystem::path& out_dir,
                                             const RecipeOptions& options = {});

}  // namespace polyselect
