// JSON (de)serialisation of tasks for dumps and replay.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "polyselect/core.hpp"

namespace polyselect {

/// {support: {features, labels, k}, query: {...}, meta: {...} | absent}
nlohmann::json task_to_json(const Task& task);
/// Labels may be integers or strings; strings are densified jointly over
/// support then query. Throws DomainError on schema violations.
Task task_from_json(const nlohmann::json& j);

void write_tasks(const std::filesystem::path& path, const std::vector<Task>& tasks);
/// Accepts a single task object or an array of tasks.
std::vector<Task> read_tasks(const std::filesystem::path& path);

}  // namespace polyselect
