#include "polyselect/task_io.hpp"

#include <fstream>

namespace polyselect {
namespace {

nlohmann::json set_to_json(const LabeledSet& set) {
  return {{"features", set.features().to_rows()}, {"labels", set.labels()}, {"k", set.k()}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw DomainError("task json: features must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  rows.reserve(j.size());
  for (const auto& r : j) rows.push_back(r.get<std::vector<double>>());
  return Matrix::from_rows(rows);
}

}  // namespace

nlohmann::json task_to_json(const Task& task) {
  nlohmann::json j{{"support", set_to_json(task.support)}, {"query", set_to_json(task.query)}};
  if (task.meta) {
    const TaskMeta& m = *task.meta;
    j["meta"] = {{"active_indices", m.active_indices},
                 {"alpha", m.alpha},
                 {"beta_irrelevant", m.beta_irrelevant},
                 {"p", m.p},
                 {"r", m.r},
                 {"encoding", to_string(m.encoding)},
                 {"seed", m.seed}};
  }
  return j;
}

Task task_from_json(const nlohmann::json& j) {
  try {
    const auto& sj = j.at("support");
    const auto& qj = j.at("query");
    Matrix sf = matrix_from_json(sj.at("features"));
    Matrix qf = matrix_from_json(qj.at("features"));

    std::vector<int> sl, ql;
    const auto& slj = sj.at("labels");
    const auto& qlj = qj.at("labels");
    int k = 0;
    if (!slj.empty() && slj.front().is_string()) {
      // External labels: map to dense ids, query labels share the mapping.
      std::vector<std::string> all = slj.get<std::vector<std::string>>();
      const auto qs = qlj.get<std::vector<std::string>>();
      all.insert(all.end(), qs.begin(), qs.end());
      std::vector<std::string> names;
      const auto ids = densify_labels(all, &names);
      sl.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(slj.size()));
      ql.assign(ids.begin() + static_cast<std::ptrdiff_t>(slj.size()), ids.end());
      k = static_cast<int>(names.size());
    } else {
      sl = slj.get<std::vector<int>>();
      ql = qlj.get<std::vector<int>>();
      int max_label = -1;
      for (int y : sl) max_label = std::max(max_label, y);
      for (int y : ql) max_label = std::max(max_label, y);
      k = sj.contains("k") ? sj.at("k").get<int>() : max_label + 1;
    }

    Task task{LabeledSet(std::move(sf), std::move(sl), k), LabeledSet(std::move(qf), std::move(ql), k), std::nullopt};
    if (j.contains("meta") && !j.at("meta").is_null()) {
      const auto& mj = j.at("meta");
      TaskMeta m;
      m.active_indices = mj.at("active_indices").get<std::vector<std::size_t>>();
      m.alpha = mj.at("alpha").get<std::size_t>();
      m.beta_irrelevant = mj.at("beta_irrelevant").get<std::size_t>();
      m.p = mj.at("p").get<double>();
      m.r = mj.at("r").get<std::size_t>();
      m.encoding = parse_encoding(mj.at("encoding").get<std::string>());
      m.seed = mj.at("seed").get<std::uint64_t>();
      if (m.alpha + m.beta_irrelevant != task.support.dim()) throw DomainError("task json: alpha + beta_irrelevant != n");
      for (auto a : m.active_indices) {
        if (a >= task.support.dim()) throw DomainError("task json: active index out of range");
      }
      task.meta = std::move(m);
    }
    task.validate();
    return task;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("task json: ") + e.what());
  } catch (const UsageError& e) {
    throw DomainError(std::string("task json: ") + e.what());
  }
}

void write_tasks(const std::filesystem::path& path, const std::vector<Task>& tasks) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : tasks) j.push_back(task_to_json(t));
  out << j.dump(1) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<Task> read_tasks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("task json: ") + e.what());
  }
  std::vector<Task> out;
  if (j.is_array()) {
    for (const auto& t : j) out.push_back(task_from_json(t));
  } else {
    out.push_back(task_from_json(j));
  }
  return out;
}

}  // namespace polyselect
