#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "format.hpp"
#include "polyselect/bench.hpp"

namespace polyselect {

namespace {

constexpr const char* kHeader = "family,alpha,beta,p,r,method,tasks,accuracy_mean,accuracy_se,seed";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
  std::istringstream in(s);
  T v{};
  in >> v;
  if (in.fail() || !in.eof()) throw DomainError(std::string("csv: bad ") + what + " '" + s + "'");
  return v;
}

double parse_real(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw DomainError("");
    return v;
  } catch (const std::exception&) {
    throw DomainError(std::string("csv: bad ") + what + " '" + s + "'");
  }
}

struct Rgb {
  int r, g, b;
};
constexpr Rgb kCold{0x3b, 0x4c, 0xc0};
constexpr Rgb kHot{0xb4, 0x04, 0x26};

}  // namespace

const char* const kColdColour = "#3b4cc0";
const char* const kHotColour = "#b40426";

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot write " + path.string());
  }
}

std::string grid_to_csv(const SweepGrid& grid) {
  std::string out = kHeader;
  out += '\n';
  for (const auto& c : grid) {
    out += c.family + ',' + std::to_string(c.alpha) + ',' + std::to_string(c.beta) + ',' + fmt_double(c.p) + ',' +
           std::to_string(c.r) + ',' + to_string(c.method) + ',' + std::to_string(c.tasks) + ',' +
           fmt_double(c.accuracy_mean) + ',' + fmt_double(c.accuracy_se) + ',' + std::to_string(c.seed) + '\n';
  }
  return out;
}

SweepGrid grid_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw DomainError("csv: unexpected header");
  SweepGrid grid;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw DomainError("csv: expected 10 fields in '" + line + "'");
    CellResult c;
    c.family = f[0];
    c.alpha = parse_number<std::size_t>(f[1], "alpha");
    c.beta = parse_number<std::size_t>(f[2], "beta");
    c.p = parse_real(f[3], "p");
    c.r = parse_number<std::size_t>(f[4], "r");
    c.method = parse_method(f[5]);
    c.tasks = parse_number<std::size_t>(f[6], "tasks");
    c.accuracy_mean = parse_real(f[7], "accuracy_mean");
    c.accuracy_se = parse_real(f[8], "accuracy_se");
    c.seed = parse_number<std::uint64_t>(f[9], "seed");
    grid.push_back(std::move(c));
  }
  return grid;
}

nlohmann::json grid_to_json(const SweepGrid& grid) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : grid) {
    arr.push_back({{"family", c.family},
                   {"alpha", c.alpha},
                   {"beta", c.beta},
                   {"p", c.p},
                   {"r", c.r},
                   {"method", to_string(c.method)},
                   {"tasks", c.tasks},
                   {"accuracy_mean", c.accuracy_mean},
                   {"accuracy_se", c.accuracy_se},
                   {"seed", c.seed},
                   {"failures", c.failures}});
  }
  return arr;
}

void emit_csv(const SweepGrid& grid, const std::filesystem::path& path) {
  if (grid.empty()) throw DomainError("emit_csv: empty grid");
  write_text_file(path, grid_to_csv(grid));
}

SweepGrid parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return grid_from_csv(ss.str());
}

void emit_json(const SweepGrid& grid, const std::filesystem::path& path) {
  if (grid.empty()) throw DomainError("emit_json: empty grid");
  write_text_file(path, grid_to_json(grid).dump(2) + "\n");
}

void emit_per_task_csv(const SweepGrid& grid, const std::filesystem::path& path) {
  std::string out = "family,alpha,beta,p,r,method,task,accuracy\n";
  for (const auto& c : grid) {
    const std::string prefix = c.family + ',' + std::to_string(c.alpha) + ',' + std::to_string(c.beta) + ',' +
                               fmt_double(c.p) + ',' + std::to_string(c.r) + ',' + to_string(c.method) + ',';
    for (std::size_t t = 0; t < c.per_task.size(); ++t) {
      out += prefix + std::to_string(t) + ',' + fmt_double(c.per_task[t]) + '\n';
    }
  }
  write_text_file(path, out);
}

std::string heat_colour(double accuracy) {
  double t = (accuracy - 0.5) / 0.5;
  if (!(t > 0.0)) t = 0.0;
  if (t > 1.0) t = 1.0;
  auto mix = [t](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * t)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(kCold.r, kHot.r), mix(kCold.g, kHot.g), mix(kCold.b, kHot.b));
  return buf;
}

std::string svg_heatmap(const SweepGrid& grid, Method method, const std::string& title) {
  std::vector<const CellResult*> cells;
  for (const auto& c : grid) {
    if (c.method == method) cells.push_back(&c);
  }
  if (cells.empty()) throw DomainError("svg_heatmap: no cells for method " + to_string(method));
  const double p = cells.front()->p;
  std::erase_if(cells, [p](const CellResult* c) { return c->p != p; });

  std::set<std::size_t> beta_set, r_set;
  for (const auto* c : cells) {
    beta_set.insert(c->beta);
    r_set.insert(c->r);
  }
  const std::vector<std::size_t> betas(beta_set.begin(), beta_set.end());
  const std::vector<std::size_t> rs(r_set.begin(), r_set.end());
  const int cw = 40, ch = 30, left = 60, top = 40;
  const int width = left + cw * static_cast<int>(betas.size()) + 20;
  const int height = top + ch * static_cast<int>(rs.size()) + 50;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<text x=\"" << left << "\" y=\"20\" font-size=\"13\">"
    << (title.empty() ? to_string(method) : title) << "</text>\n";
  for (const auto* c : cells) {
    const auto xi = std::lower_bound(betas.begin(), betas.end(), c->beta) - betas.begin();
    const auto yi = std::lower_bound(rs.begin(), rs.end(), c->r) - rs.begin();
    const int x = left + cw * static_cast<int>(xi);
    const int y = top + ch * static_cast<int>(rs.size() - 1 - static_cast<std::size_t>(yi));
    char acc[16];
    std::snprintf(acc, sizeof acc, "%.2f", c->accuracy_mean);
    s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch << "\" fill=\""
      << heat_colour(c->accuracy_mean) << "\"/>"
      << "<text x=\"" << x + cw / 2 << "\" y=\"" << y + ch / 2 + 4 << "\" text-anchor=\"middle\" fill=\"white\">"
      << acc << "</text>\n";
  }
  const int axis_y = top + ch * static_cast<int>(rs.size());
  for (std::size_t i = 0; i < betas.size(); ++i) {
    s << "<text x=\"" << left + cw * static_cast<int>(i) + cw / 2 << "\" y=\"" << axis_y + 15
      << "\" text-anchor=\"middle\">" << betas[i] << "</text>\n";
  }
  for (std::size_t j = 0; j < rs.size(); ++j) {
    s << "<text x=\"" << left - 8 << "\" y=\"" << top + ch * static_cast<int>(rs.size() - 1 - j) + ch / 2 + 4
      << "\" text-anchor=\"end\">" << rs[j] << "</text>\n";
  }
  s << "<text x=\"" << left + cw * static_cast<int>(betas.size()) / 2 << "\" y=\"" << axis_y + 35
    << "\" text-anchor=\"middle\">beta (irrelevant features)</text>\n";
  s << "<text x=\"15\" y=\"" << top + ch * static_cast<int>(rs.size()) / 2
    << "\" transform=\"rotate(-90 15 " << top + ch * static_cast<int>(rs.size()) / 2
    << ")\" text-anchor=\"middle\">r (repetitions)</text>\n";
  s << "</svg>\n";
  return s.str();
}

void emit_svg_heatmap(const SweepGrid& grid, Method method, const std::filesystem::path& path,
                      const std::string& title) {
  write_text_file(path, svg_heatmap(grid, method, title));
}

}  // namespace polyselect
