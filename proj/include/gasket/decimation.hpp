#pragma once

// Spectral decimation for the Dirichlet Laplacian on the gasket.
//
// A graph eigenvalue lambda_m at level m decimates to lambda_{m-1} =
// lambda_m (5 - lambda_m). Every Dirichlet eigenvalue is born at some level j
// with graph value 2, 5 or 6 (its series), followed by a word of root choices
// ('-' contracting root in [0, 5/2), '+' expanding root) and then the
// contracting root forever. The eigenvalue is (3/2) lim 5^m lambda_m.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gasket {

inline constexpr double kDefaultLimitTolerance = 1e-12;
inline constexpr int kMaxLimitSteps = 60;
inline constexpr std::size_t kDefaultRecordCap = 500000;

enum class Branch : char { Contracting = '-', Expanding = '+' };

/// (contracting, expanding) roots of x (5 - x) = lambda_prev.
std::pair<double, double> decimation_preimages(double lambda_prev);

/// The map x -> x (5 - x).
constexpr double decimate(double x) { return x * (5.0 - x); }

std::int64_t series_multiplicity(int series, int birth);

struct EigenvalueRecord {
  int series = 0;
  int birth = 0;
  /// Root choices after birth; canonical form has no trailing '-'.
  std::string branches;
  /// Graph eigenvalues lambda_m for m = birth, birth+1, ... up to the stopping level.
  std::vector<double> graph_values;
  double value = 0.0;
  std::int64_t multiplicity = 0;

  /// Levels past birth needed to pin the record down: the length of the
  /// branch word, except that a 6-series "+" is already determined at birth
  /// (the contracting root of x(5-x) = 6 is the forbidden value 2).
  int effective_length() const;
  /// The level-m graph Laplacian has an eigenvector that restricts this eigenfunction.
  bool resolvable_at(int m) const { return birth + effective_length() <= m; }
  double graph_value_at(int m) const;
  std::string key() const;

  friend bool operator<(const EigenvalueRecord& a, const EigenvalueRecord& b);
};

/// Iterates the root choices `branches` from lambda_birth = series, then
/// `tail` forever, until (3/2) 5^m lambda_m changes by less than `tol`
/// relatively. An expanding tail never converges.
double eigenvalue_limit(int series, int birth, std::string_view branches,
                        double tol = kDefaultLimitTolerance, Branch tail = Branch::Contracting,
                        std::vector<double>* graph_values = nullptr);

EigenvalueRecord make_record(int series, int birth, std::string branches,
                             double tol = kDefaultLimitTolerance);

struct SpectrumTable {
  std::vector<EigenvalueRecord> records;
  double cutoff = 0.0;

  /// d_Lambda: total multiplicity of records with value <= lambda.
  std::int64_t counting(double lambda) const;
  std::int64_t dimension() const { return counting(cutoff); }
};

struct EnumerationOptions {
  std::size_t record_cap = kDefaultRecordCap;
  double tol = kDefaultLimitTolerance;
};

SpectrumTable enumerate_spectrum(double cutoff, const EnumerationOptions& options = {});

/// A level-m graph eigenvalue together with the eigenfunction record it restricts.
struct LevelRecord {
  EigenvalueRecord record;
  double graph_value = 0.0;
};

/// All distinct graph eigenvalues of the level-m Dirichlet Laplacian predicted
/// by decimation, sorted by graph value.
std::vector<LevelRecord> graph_records(int m, double tol = kDefaultLimitTolerance);

/// Sorted graph eigenvalues of the level-m Dirichlet Laplacian, repeated by multiplicity.
std::vector<double> predicted_graph_spectrum(int m);

/// Smallest eigenvalue that is not resolvable at level m. Every cutoff
/// strictly below it is inside the level-m window.
double resolvable_window(int m);

struct LocalizationCounts {
  std::int64_t d_j = 0;
  std::int64_t d_j_N = 0;
  std::int64_t alpha_N = 0;
  std::int64_t m_j_N = 0;
};

LocalizationCounts localization_counts(int series, int birth, int level);

struct SeparatedSequence {
  std::vector<EigenvalueRecord> records;
  /// Distance from each record's value to the nearest other eigenvalue.
  std::vector<double> gaps;
};

/// The 6-series family (6, j, "+") for j = 2 .. max(2, j_max); each value is
/// five times the previous one.
SeparatedSequence separated_sequence(int j_max);

}  // namespace gasket
