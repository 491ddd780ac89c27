#include "polyselect/boolefn.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <mutex>
#include <sstream>

namespace polyselect {

BooleanFunction::BooleanFunction(std::size_t n, std::vector<bool> table) : n_(n), table_(std::move(table)) {
  if (n_ > 24) throw DomainError("BooleanFunction: n too large");
  if (table_.size() != (std::size_t{1} << n_)) throw DomainError("BooleanFunction: truth table length must be 2^n");
}

BooleanFunction BooleanFunction::from_mask(std::size_t n, std::uint64_t mask) {
  if (n > 6) throw DomainError("from_mask: n must be at most 6");
  std::vector<bool> t(std::size_t{1} << n);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = (mask >> i) & 1U;
  if (n < 6 && (mask >> t.size()) != 0) throw DomainError("from_mask: bits set beyond 2^n");
  return BooleanFunction(n, std::move(t));
}

BooleanFunction BooleanFunction::from_hex(const std::string& hex_in, std::optional<std::size_t> n) {
  std::string hex = hex_in;
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex = hex.substr(2);
  if (hex.empty()) throw DomainError("from_hex: empty truth table");
  std::vector<int> nibbles;
  for (char ch : hex) {
    int v = -1;
    if (ch >= '0' && ch <= '9') v = ch - '0';
    if (ch >= 'a' && ch <= 'f') v = ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') v = ch - 'A' + 10;
    if (v < 0) throw DomainError("from_hex: invalid hex digit '" + std::string(1, ch) + "'");
    nibbles.push_back(v);
  }
  std::size_t vars = 0;
  if (n) {
    vars = *n;
  } else {
    // Smallest n whose table fills the given digits (at least n = 2 for one digit).
    const std::size_t bits = 4 * nibbles.size();
    vars = 2;
    while ((std::size_t{1} << vars) < bits) ++vars;
  }
  if (vars > 24) throw DomainError("from_hex: n too large");
  const std::size_t len = std::size_t{1} << vars;
  std::vector<bool> t(len, false);
  // The last digit holds bits 0..3.
  for (std::size_t d = 0; d < nibbles.size(); ++d) {
    const int v = nibbles[nibbles.size() - 1 - d];
    for (std::size_t b = 0; b < 4; ++b) {
      if (!((v >> b) & 1)) continue;
      const std::size_t idx = 4 * d + b;
      if (idx >= len) throw DomainError("from_hex: bits set beyond 2^n");
      t[idx] = true;
    }
  }
  return BooleanFunction(vars, std::move(t));
}

std::uint64_t BooleanFunction::mask() const {
  if (n_ > 6) throw DomainError("mask: n must be at most 6");
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (table_[i]) m |= std::uint64_t{1} << i;
  }
  return m;
}

std::string BooleanFunction::to_hex() const {
  const std::size_t digits = std::max<std::size_t>(1, (table_.size() + 3) / 4);
  std::string out(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    int v = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t idx = 4 * d + b;
      if (idx < table_.size() && table_[idx]) v |= 1 << b;
    }
    out[digits - 1 - d] = "0123456789abcdef"[v];
  }
  return out;
}

BooleanFunction BooleanFunction::complement() const {
  std::vector<bool> t(table_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = !table_[i];
  return BooleanFunction(n_, std::move(t));
}

std::vector<int> cube_corner(std::size_t n, std::size_t index) {
  std::vector<int> x(n);
  for (std::size_t b = 0; b < n; ++b) x[b] = (index >> b) & 1U ? 1 : -1;
  return x;
}

BooleanFunction xor_function(std::size_t n) {
  std::vector<bool> t(std::size_t{1} << n);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::popcount(i) % 2 == 1;
  return BooleanFunction(n, std::move(t));
}

BooleanFunction and_function(std::size_t n) {
  std::vector<bool> t(std::size_t{1} << n, false);
  t.back() = true;
  return BooleanFunction(n, std::move(t));
}

bool ThresholdWitness::certifies(const BooleanFunction& f) const {
  if (weights.size() != f.n()) return false;
  mpq_class acc;
  for (std::size_t i = 0; i < f.size(); ++i) {
    acc = 0;
    for (std::size_t b = 0; b < f.n(); ++b) {
      if ((i >> b) & 1U) {
        acc += weights[b];
      } else {
        acc -= weights[b];
      }
    }
    if ((acc > threshold) != f(i)) return false;
  }
  return true;
}

std::vector<std::string> ThresholdWitness::weight_strings() const {
  std::vector<std::string> out;
  for (const auto& w : weights) out.push_back(w.get_str());
  return out;
}

std::string ThresholdWitness::threshold_string() const { return threshold.get_str(); }

namespace {

/// Dense simplex tableau over rationals, minimising with Bland's rule.
class Phase1Tableau {
 public:
  Phase1Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_((rows + 1) * (cols + 1)), basis_(rows) {}

  mpq_class& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  mpq_class& rhs(std::size_t r) { return at(r, cols_); }
  /// Reduced-cost row is stored after the constraint rows.
  mpq_class& cost(std::size_t c) { return at(rows_, c); }
  std::vector<std::size_t>& basis() { return basis_; }

  void solve() {
    for (;;) {
      std::size_t enter = cols_;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (sgn(cost(c)) < 0) {
          enter = c;
          break;
        }
      }
      if (enter == cols_) return;
      std::size_t leave = rows_;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (sgn(at(r, enter)) <= 0) continue;
        if (leave == rows_) {
          leave = r;
          continue;
        }
        // Ratio test by cross-multiplication; ties go to the lower basic index.
        const mpq_class lhs = rhs(r) * at(leave, enter);
        const mpq_class rhs_best = rhs(leave) * at(r, enter);
        if (lhs < rhs_best || (lhs == rhs_best && basis_[r] < basis_[leave])) leave = r;
      }
      // Phase 1 is bounded below by zero, so a leaving row always exists.
      pivot(leave, enter);
    }
  }

 private:
  void pivot(std::size_t pr, std::size_t pc) {
    const mpq_class inv = 1 / at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    mpq_class factor;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      factor = at(r, pc);
      if (sgn(factor) == 0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) {
        if (sgn(at(pr, c)) != 0) at(r, c) -= factor * at(pr, c);
      }
    }
    basis_[pr] = pc;
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<mpq_class> a_;
  std::vector<std::size_t> basis_;
};

/// Scales a rational witness to coprime integers (positive scaling keeps it valid).
void normalise(ThresholdWitness& w) {
  mpz_class lcm = w.threshold.get_den();
  for (const auto& x : w.weights) lcm = ::lcm(lcm, mpz_class(x.get_den()));
  mpz_class g = 0;
  auto scaled = [&](const mpq_class& x) { return mpz_class(x.get_num() * (lcm / x.get_den())); };
  for (const auto& x : w.weights) g = ::gcd(g, scaled(x));
  g = ::gcd(g, scaled(w.threshold));
  if (g == 0) g = 1;
  for (auto& x : w.weights) x = mpq_class(scaled(x) / g);
  w.threshold = mpq_class(scaled(w.threshold) / g);
}

}  // namespace

std::optional<ThresholdWitness> is_threshold(const BooleanFunction& f) {
  const std::size_t n = f.n();
  if (n > 8) throw DomainError("is_threshold: n must be at most 8");
  const std::size_t corners = f.size();
  const std::size_t rows = n + 2;
  const std::size_t cols = corners + rows;  // y_j then one artificial per row

  // Rows 0..n-1: sum_j s_j x_jk y_j = 0; row n: sum_j s_j y_j = 0;
  // row n+1: sum_j y_j = 1, with s_j = +1 on true corners and -1 otherwise.
  Phase1Tableau tab(rows, cols);
  for (std::size_t j = 0; j < corners; ++j) {
    const int s = f(j) ? 1 : -1;
    for (std::size_t k = 0; k < n; ++k) tab.at(k, j) = ((j >> k) & 1U) ? s : -s;
    tab.at(n, j) = s;
    tab.at(n + 1, j) = 1;
  }
  for (std::size_t r = 0; r < rows; ++r) {
    tab.at(r, corners + r) = 1;
    tab.basis()[r] = corners + r;
  }
  tab.rhs(n + 1) = 1;
  // Reduced costs with the artificials basic: -(column sums) on y, 0 on z.
  for (std::size_t j = 0; j < corners; ++j) {
    mpq_class sum = 0;
    for (std::size_t r = 0; r < rows; ++r) sum += tab.at(r, j);
    tab.cost(j) = -sum;
  }
  tab.cost(cols) = -1;  // -(objective value)

  tab.solve();

  const mpq_class objective = -tab.cost(cols);
  if (sgn(objective) == 0) return std::nullopt;

  // Simplex multipliers pi_r = 1 - reduced cost of artificial r. They give
  // s_j (u.x_j + u0) <= -objective < 0 for every corner, so w = -u, t = u0.
  ThresholdWitness w;
  w.weights.resize(n);
  for (std::size_t k = 0; k < n; ++k) w.weights[k] = -(1 - tab.cost(corners + k));
  w.threshold = 1 - tab.cost(corners + n);
  normalise(w);
  if (!w.certifies(f)) throw std::logic_error("is_threshold: witness failed exact verification");
  return w;
}

namespace {

std::vector<std::uint64_t> enumerate_thresholds(std::size_t n) {
  const std::uint64_t total = std::uint64_t{1} << (std::uint64_t{1} << n);
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = 0; m < total; ++m) {
    if (is_threshold(BooleanFunction::from_mask(n, m))) out.push_back(m);
  }
  return out;
}

struct ThresholdCache {
  std::mutex mutex;
  std::array<std::optional<std::vector<std::uint64_t>>, 5> sets;
};

ThresholdCache& cache() {
  static ThresholdCache c;
  return c;
}

void check_enumerable(std::size_t n) {
  if (n > 4) throw DomainError("threshold enumeration is limited to n <= 4");
}

std::optional<std::vector<std::uint64_t>> read_cache_file(std::size_t n, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string tag;
  std::size_t file_n = 0, count = 0;
  if (!(hs >> tag >> file_n >> count) || tag != "threshold-set" || file_n != n) return std::nullopt;
  std::vector<std::uint64_t> masks;
  std::string line;
  const std::uint64_t limit = std::uint64_t{1} << (std::uint64_t{1} << n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::uint64_t m = 0;
    try {
      m = std::stoull(line, nullptr, 16);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (m >= limit || (!masks.empty() && m <= masks.back())) return std::nullopt;
    masks.push_back(m);
  }
  if (masks.size() != count) return std::nullopt;
  return masks;
}

void write_cache_file(std::size_t n, const std::vector<std::uint64_t>& masks, const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  const auto tmp = std::filesystem::path(file.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write threshold cache " + tmp.string());
    out << "threshold-set " << n << ' ' << masks.size() << '\n';
    for (auto m : masks) out << std::hex << m << '\n';
    if (!out) throw IoError("write failed for threshold cache " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace

const std::vector<std::uint64_t>& threshold_set(std::size_t n) {
  check_enumerable(n);
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  if (!c.sets[n]) c.sets[n] = enumerate_thresholds(n);
  return *c.sets[n];
}

const std::vector<std::uint64_t>& threshold_set(std::size_t n, const std::filesystem::path& cache_file) {
  check_enumerable(n);
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  if (c.sets[n]) {
    if (!std::filesystem::exists(cache_file)) write_cache_file(n, *c.sets[n], cache_file);
    return *c.sets[n];
  }
  if (auto loaded = read_cache_file(n, cache_file)) {
    c.sets[n] = std::move(loaded);
  } else {
    c.sets[n] = enumerate_thresholds(n);
    write_cache_file(n, *c.sets[n], cache_file);
  }
  return *c.sets[n];
}

std::uint64_t count_threshold(std::size_t n) { return threshold_set(n).size(); }

namespace {

struct Best {
  std::uint64_t agreement;
  std::uint64_t mask;
};

Best best_against(std::size_t n, std::uint64_t f, const std::vector<std::uint64_t>& thresholds) {
  const std::uint64_t corners = std::uint64_t{1} << n;
  const std::uint64_t full = corners == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << corners) - 1;
  Best best{0, 0};
  for (auto g : thresholds) {
    const std::uint64_t agree = corners - static_cast<std::uint64_t>(std::popcount((f ^ g) & full));
    if (agree > best.agreement) best = {agree, g};
    if (agree == corners) break;
  }
  return best;
}

}  // namespace

ThresholdApproximation best_threshold_agreement(const BooleanFunction& f) {
  check_enumerable(f.n());
  const Best b = best_against(f.n(), f.mask(), threshold_set(f.n()));
  BooleanFunction g = BooleanFunction::from_mask(f.n(), b.mask);
  auto w = is_threshold(g);
  return {b.agreement, std::move(g), std::move(*w)};
}

std::uint64_t xor_max_accuracy(std::size_t n) {
  if (n < 1 || n > 62) throw DomainError("xor_max_accuracy: n must be in [1, 62]");
  const std::uint64_t m = n - 1;
  const std::uint64_t k = m / 2;
  std::uint64_t binom = 1;
  for (std::uint64_t i = 1; i <= k; ++i) binom = binom * (m - k + i) / i;
  return (std::uint64_t{1} << (n - 1)) + binom;
}

XorWorstReport verify_xor_worst(std::size_t n) {
  check_enumerable(n);
  if (n < 1) throw DomainError("verify_xor_worst: n must be at least 1");
  const auto& thresholds = threshold_set(n);
  const std::uint64_t total = std::uint64_t{1} << (std::uint64_t{1} << n);
  XorWorstReport report;
  report.expected = xor_max_accuracy(n);
  report.minimum = ~std::uint64_t{0};
  for (std::uint64_t f = 0; f < total; ++f) {
    const auto a = best_against(n, f, thresholds).agreement;
    if (a < report.minimum) {
      report.minimum = a;
      report.worst.clear();
    }
    if (a == report.minimum) report.worst.push_back(f);
  }
  report.holds = report.minimum == report.expected;
  return report;
}

ThresholdStats threshold_stats(std::size_t n) {
  check_enumerable(n);
  const auto& thresholds = threshold_set(n);
  const std::uint64_t total = std::uint64_t{1} << (std::uint64_t{1} << n);
  const std::uint64_t corners = std::uint64_t{1} << n;
  std::uint64_t agreement_sum = 0;
  for (std::uint64_t f = 0; f < total; ++f) agreement_sum += best_against(n, f, thresholds).agreement;
  ThresholdStats s;
  s.threshold_count = thresholds.size();
  s.function_count = total;
  s.solved_fraction = static_cast<double>(thresholds.size()) / static_cast<double>(total);
  s.mean_best_accuracy = static_cast<double>(agreement_sum) / static_cast<double>(total * corners);
  return s;
}

}  // namespace polyselect
