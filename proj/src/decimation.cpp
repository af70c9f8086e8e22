#include "gasket/decimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "gasket/error.hpp"
#include "gasket/geometry.hpp"

namespace gasket {

std::pair<double, double> decimation_preimages(double lambda_prev) {
  if (!(lambda_prev <= 6.25))
    throw Error(ErrorKind::Domain, "decimation preimages of " + std::to_string(lambda_prev) +
                                       " are complex (need lambda <= 25/4)");
  const double root = std::sqrt(std::max(0.0, 25.0 - 4.0 * lambda_prev));
  // 2x/(5 + root) avoids the cancellation in (5 - root)/2 for small x.
  return {2.0 * lambda_prev / (5.0 + root), 0.5 * (5.0 + root)};
}

std::int64_t series_multiplicity(int series, int birth) {
  switch (series) {
    case 2:
      if (birth != 1) break;
      return 1;
    case 5:
      if (birth < 1) break;
      return (pow3(birth - 1) + 3) / 2;
    case 6:
      if (birth < 2) break;
      return (pow3(birth) - 3) / 2;
    default: break;
  }
  throw Error(ErrorKind::Domain, "no " + std::to_string(series) + "-series eigenvalue of birth " +
                                     std::to_string(birth));
}

int EigenvalueRecord::effective_length() const {
  if (series == 6 && branches == "+") return 0;
  return static_cast<int>(branches.size());
}

double EigenvalueRecord::graph_value_at(int m) const {
  if (m < birth) throw Error(ErrorKind::Domain, "level below the generation of birth");
  double x = series;
  for (int level = birth + 1; level <= m; ++level) {
    const auto step = static_cast<std::size_t>(level - birth - 1);
    const auto [lo, hi] = decimation_preimages(x);
    x = (step < branches.size() && branches[step] == '+') ? hi : lo;
  }
  return x;
}

std::string EigenvalueRecord::key() const {
  return std::to_string(series) + ":" + std::to_string(birth) + ":" + branches;
}

bool operator<(const EigenvalueRecord& a, const EigenvalueRecord& b) {
  return std::tie(a.value, a.series, a.birth, a.branches) <
         std::tie(b.value, b.series, b.birth, b.branches);
}

double eigenvalue_limit(int series, int birth, std::string_view branches, double tol,
                        Branch tail, std::vector<double>* graph_values) {
  if (series != 2 && series != 5 && series != 6)
    throw Error(ErrorKind::Domain, "series must be 2, 5 or 6");
  if (!(tol > 0.0)) throw Error(ErrorKind::Domain, "tolerance must be positive");
  for (char b : branches)
    if (b != '+' && b != '-') throw Error(ErrorKind::Domain, "branch letters must be + or -");
  if (series == 6 && !branches.empty() && branches.front() == '-')
    throw Error(ErrorKind::Domain, "a 6-series eigenvalue must leave its birth on the + root");

  double x = series;
  int level = birth;
  if (graph_values) graph_values->assign(1, x);
  for (char b : branches) {
    const auto [lo, hi] = decimation_preimages(x);
    x = b == '+' ? hi : lo;
    ++level;
    if (graph_values) graph_values->push_back(x);
  }
  // The contracting root of x(5-x)=6 is 2, which is not a level-(j+1) eigenvalue.
  const bool forced_plus = series == 6 && branches.empty();

  double previous = renormalization(level) * x;
  for (int step = 1; step <= kMaxLimitSteps; ++step) {
    const auto [lo, hi] = decimation_preimages(x);
    x = (tail == Branch::Expanding || (forced_plus && step == 1)) ? hi : lo;
    ++level;
    if (graph_values) graph_values->push_back(x);
    const double current = renormalization(level) * x;
    if (std::abs(current - previous) < tol * std::abs(current)) return current;
    previous = current;
  }
  throw Error(ErrorKind::Convergence,
              "renormalized decimation sequence for series " + std::to_string(series) +
                  ", birth " + std::to_string(birth) + ", branches '" + std::string(branches) +
                  "' did not converge within " + std::to_string(kMaxLimitSteps) + " steps");
}

EigenvalueRecord make_record(int series, int birth, std::string branches, double tol) {
  EigenvalueRecord r;
  r.series = series;
  r.birth = birth;
  r.multiplicity = series_multiplicity(series, birth);
  r.value = eigenvalue_limit(series, birth, branches, tol, Branch::Contracting, &r.graph_values);
  r.branches = std::move(branches);
  if (r.series == 6 && r.branches.empty()) r.branches = "+";
  return r;
}

std::int64_t SpectrumTable::counting(double lambda) const {
  std::int64_t d = 0;
  for (const auto& r : records) {
    if (r.value > lambda) break;
    d += r.multiplicity;
  }
  return d;
}

namespace {

struct Enumerator {
  double cutoff;
  const EnumerationOptions& options;
  std::vector<EigenvalueRecord>& out;

  // A '+' at level L leaves lambda_L >= 5/2, so every record below it has
  // value >= (3/2) 5^L (5/2); renormalized partial values never decrease.
  bool plus_possible_at(int level) const { return renormalization(level) * 2.5 <= cutoff; }

  void visit(int series, int birth, std::string& word, double x, int level) {
    const bool canonical = word.empty() ? series != 6 : word.back() == '+';
    if (canonical) {
      auto rec = make_record(series, birth, word, options.tol);
      if (rec.value <= cutoff) {
        if (out.size() >= options.record_cap)
          throw Error(ErrorKind::ResourceLimit,
                      "spectrum enumeration exceeded the record cap of " +
                          std::to_string(options.record_cap));
        out.push_back(std::move(rec));
      }
    }
    if (!plus_possible_at(level + 1)) return;
    const auto [lo, hi] = decimation_preimages(x);
    const bool allow_minus = !(series == 6 && word.empty());
    if (allow_minus && renormalization(level + 1) * lo <= cutoff) {
      word.push_back('-');
      visit(series, birth, word, lo, level + 1);
      word.pop_back();
    }
    if (renormalization(level + 1) * hi <= cutoff) {
      word.push_back('+');
      visit(series, birth, word, hi, level + 1);
      word.pop_back();
    }
  }
};

}  // namespace

SpectrumTable enumerate_spectrum(double cutoff, const EnumerationOptions& options) {
  if (!(cutoff > 0.0)) throw Error(ErrorKind::Domain, "cutoff must be positive");
  SpectrumTable table;
  table.cutoff = cutoff;
  Enumerator e{cutoff, options, table.records};
  std::string word;
  if (renormalization(1) * 2.0 <= cutoff) e.visit(2, 1, word, 2.0, 1);
  for (int j = 1; renormalization(j) * 5.0 <= cutoff; ++j) e.visit(5, j, word, 5.0, j);
  for (int j = 2; renormalization(j) * 6.0 <= cutoff; ++j) e.visit(6, j, word, 6.0, j);
  std::sort(table.records.begin(), table.records.end());
  return table;
}

std::vector<LevelRecord> graph_records(int m, double tol) {
  if (m < 1) throw Error(ErrorKind::Domain, "graph spectrum needs level >= 1");
  std::vector<LevelRecord> out;
  auto add_family = [&](int series, int birth) {
    const int len = m - birth;
    const std::int64_t words = std::int64_t{1} << len;
    for (std::int64_t bits = 0; bits < words; ++bits) {
      std::string word(static_cast<std::size_t>(len), '-');
      for (int i = 0; i < len; ++i)
        if ((bits >> (len - 1 - i)) & 1) word[static_cast<std::size_t>(i)] = '+';
      if (series == 6 && len > 0 && word.front() == '-') continue;
      while (!word.empty() && word.back() == '-') word.pop_back();
      LevelRecord lr;
      lr.record = make_record(series, birth, word, tol);
      lr.graph_value = lr.record.graph_value_at(m);
      out.push_back(std::move(lr));
    }
  };
  add_family(2, 1);
  for (int j = 1; j <= m; ++j) add_family(5, j);
  for (int j = 2; j <= m; ++j) add_family(6, j);
  std::sort(out.begin(), out.end(), [](const LevelRecord& a, const LevelRecord& b) {
    return std::tie(a.graph_value, a.record) < std::tie(b.graph_value, b.record);
  });
  return out;
}

std::vector<double> predicted_graph_spectrum(int m) {
  std::vector<double> values;
  for (const auto& lr : graph_records(m))
    values.insert(values.end(), static_cast<std::size_t>(lr.record.multiplicity), lr.graph_value);
  return values;
}

double resolvable_window(int m) {
  for (double cutoff = renormalization(m + 1) * 2.5;; cutoff *= 5.0) {
    const auto table = enumerate_spectrum(cutoff);
    for (const auto& r : table.records)
      if (!r.resolvable_at(m)) return r.value;
  }
}

LocalizationCounts localization_counts(int series, int birth, int level) {
  if (series != 5 && series != 6)
    throw Error(ErrorKind::Domain, "localization counts exist for the 5- and 6-series only");
  if (level < 1 || level >= birth)
    throw Error(ErrorKind::Domain, "need 1 <= N < j, got N=" + std::to_string(level) +
                                       ", j=" + std::to_string(birth));
  LocalizationCounts c;
  c.d_j = series_multiplicity(series, birth);
  if (series == 6) {
    c.d_j_N = (pow3(birth) - pow3(level + 1)) / 2;
    c.m_j_N = (pow3(birth - level) - 3) / 2;
  } else {
    c.d_j_N = (pow3(birth - 1) - pow3(level)) / 2;
    c.m_j_N = (pow3(birth - level - 1) - 1) / 2;
  }
  c.alpha_N = c.d_j - c.d_j_N;
  return c;
}

SeparatedSequence separated_sequence(int j_max) {
  SeparatedSequence seq;
  for (int j = 2; j <= std::max(2, j_max); ++j) seq.records.push_back(make_record(6, j, "+"));
  const auto table = enumerate_spectrum(5.0 * seq.records.back().value);
  for (const auto& r : seq.records) {
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& other : table.records)
      if (other.key() != r.key()) gap = std::min(gap, std::abs(other.value - r.value));
    seq.gaps.push_back(gap);
  }
  return seq;
}

}  // namespace gasket
