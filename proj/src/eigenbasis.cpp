#include "gasket/eigenbasis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gasket/error.hpp"

namespace gasket {
namespace {

// Modified Gram-Schmidt in the w-weighted inner product, two passes.
void orthonormalize_weighted(Matrix& cols, std::span<const double> w) {
  const std::size_t n = cols.rows();
  const std::size_t d = cols.cols();
  for (std::size_t k = 0; k < d; ++k) {
    auto vk = cols.column(k);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < k; ++j) {
        const auto vj = cols.column(j);
        const double proj = weighted_dot(w, vj, vk);
        for (std::size_t r = 0; r < n; ++r) vk[r] -= proj * vj[r];
      }
    const double norm = std::sqrt(weighted_dot(w, vk, vk));
    if (!(norm > 0.0)) throw Error(ErrorKind::Numeric, "degenerate vector in orthonormalization");
    for (double& x : vk) x /= norm;
    cols.set_column(k, vk);
  }
}

// Chooses `count` orthonormal vectors from the span of the candidate columns
// (d x c): repeatedly take the candidate with the largest remaining norm
// (lowest index on ties), normalize it and deflate the rest. The result
// depends only on the candidates, not on how their span was computed.
Matrix pivoted_gram_schmidt(Matrix cand, std::size_t count, const std::string& what) {
  const std::size_t d = cand.rows();
  const std::size_t c = cand.cols();
  Matrix q(d, count);
  std::vector<bool> used(c, false);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t best = c;
    double best_norm = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      if (used[j]) continue;
      double s = 0.0;
      for (std::size_t r = 0; r < d; ++r) s += cand(r, j) * cand(r, j);
      if (s > best_norm) {
        best_norm = s;
        best = j;
      }
    }
    if (best == c || std::sqrt(best_norm) < 1e-8)
      throw Error(ErrorKind::Structural, what + ": only " + std::to_string(k) + " of " +
                                             std::to_string(count) + " directions available");
    used[best] = true;
    std::vector<double> v = cand.column(best);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < k; ++j) {
        double proj = 0.0;
        for (std::size_t r = 0; r < d; ++r) proj += q(r, j) * v[r];
        for (std::size_t r = 0; r < d; ++r) v[r] -= proj * q(r, j);
      }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    q.set_column(k, v);
    for (std::size_t j = 0; j < c; ++j) {
      if (used[j]) continue;
      double proj = 0.0;
      for (std::size_t r = 0; r < d; ++r) proj += v[r] * cand(r, j);
      for (std::size_t r = 0; r < d; ++r) cand(r, j) -= proj * v[r];
    }
  }
  return q;
}

// First entry above a relative threshold made positive.
void fix_sign(std::span<double> v) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  for (double x : v)
    if (std::abs(x) > 1e-8 * scale) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
}

// Interior vertices (matrix indices) whose incident level-m cells all lie in `cell`.
std::vector<bool> inside_cell(const VertexSet& vs, const CellAddress& cell) {
  std::vector<bool> inside(vs.interior.size(), false);
  const auto span = pow3(vs.level - cell.level());
  const auto first = cell.index() * span;
  for (std::size_t i = 0; i < vs.interior.size(); ++i) {
    const auto& inc = vs.incidence[vs.interior[i]];
    inside[i] = std::all_of(inc.begin(), inc.end(),
                            [&](std::int64_t c) { return c >= first && c < first + span; });
  }
  return inside;
}

// Candidate coefficient vectors P (w_x V(x,:))^T for the listed rows, P = K K^T.
Matrix projected_candidates(const Matrix& v, std::span<const double> w, const Matrix& k,
                            const std::vector<std::size_t>& rows) {
  const std::size_t d = v.cols();
  Matrix z(d, rows.size());
  for (std::size_t c = 0; c < rows.size(); ++c)
    for (std::size_t r = 0; r < d; ++r) z(r, c) = w[rows[c]] * v(rows[c], r);
  return kernels::multiply(k, kernels::gram(k, z));
}

double laplacian_residual(const VertexSet& vs, double graph_value, std::span<const double> v) {
  const auto lv = apply_graph_laplacian(vs, v);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(lv[i] - graph_value * v[i]));
  return worst;
}

double max_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

double weighted_orthonormality_defect(const Matrix& vectors, std::span<const double> w) {
  const auto g = kernels::weighted_gram(vectors, w, vectors);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

std::vector<double> apply_graph_laplacian(const VertexSet& vs, std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = 4.0 * v[i];
  for (const auto& cell : vs.cell_vertices)
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) {
        if (a == b) continue;
        const auto ia = vs.interior_index[cell[a]];
        const auto ib = vs.interior_index[cell[b]];
        if (ia != VertexSet::npos && ib != VertexSet::npos) out[ia] -= v[ib];
      }
  return out;
}

std::vector<EigenPair> solve_graph_spectrum(const GraphLaplacian& laplacian, EigenMethod method) {
  const auto eig = solve_symmetric(laplacian.matrix, method);
  const double bound = 1e-9 * norm_inf(laplacian.matrix);
  const double residual = max_residual(laplacian.matrix, eig);
  if (residual > bound)
    throw Error(ErrorKind::Numeric, "eigenpair residual " + std::to_string(residual) +
                                        " exceeds " + std::to_string(bound));
  std::vector<EigenPair> pairs(eig.values.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    pairs[k].graph_value = eig.values[k] / laplacian.scale;
    pairs[k].vector = eig.vectors.column(k);
  }
  return pairs;
}

std::vector<EigenspaceBundle> group_eigenspaces(const std::vector<EigenPair>& pairs,
                                                const GasketLevel& level) {
  const int m = level.level();
  const auto records = graph_records(m);
  const auto w = level.measure.interior_weights(level.vertices);
  const std::size_t n = level.interior_size();

  std::vector<EigenspaceBundle> bundles;
  std::size_t start = 0;
  while (start < pairs.size()) {
    std::size_t end = start + 1;
    while (end < pairs.size() &&
           std::abs(pairs[end].graph_value - pairs[end - 1].graph_value) <=
               kGroupingTolerance * std::max(1.0, std::abs(pairs[end].graph_value)))
      ++end;
    const double value = pairs[start].graph_value;
    const LevelRecord* match = nullptr;
    for (const auto& lr : records)
      if (std::abs(lr.graph_value - value) <= kGroupingTolerance * std::max(1.0, std::abs(value))) {
        match = &lr;
        break;
      }
    if (match == nullptr) {
      std::ostringstream os;
      os << "graph eigenvalue " << value << " (cluster of " << end - start
         << ") matches no decimation record at level " << m;
      throw Error(ErrorKind::Mismatch, os.str());
    }
    if (static_cast<std::int64_t>(end - start) != match->record.multiplicity) {
      std::ostringstream os;
      os << "eigenspace of " << match->record.key() << " has dimension " << end - start
         << ", decimation predicts " << match->record.multiplicity;
      throw Error(ErrorKind::Mismatch, os.str());
    }
    EigenspaceBundle b;
    b.level = m;
    b.record = match->record;
    b.graph_value = match->graph_value;
    b.vectors = Matrix(n, end - start);
    for (std::size_t k = start; k < end; ++k) b.vectors.set_column(k - start, pairs[k].vector);
    orthonormalize_weighted(b.vectors, w);
    bundles.push_back(std::move(b));
    start = end;
  }
  if (bundles.size() != records.size())
    throw Error(ErrorKind::Mismatch, std::to_string(records.size() - bundles.size()) +
                                         " decimation records have no eigenvectors");
  return bundles;
}

std::vector<EigenspaceBundle> group_eigenspaces(const std::vector<EigenPair>& pairs,
                                                const SpectrumTable& table, const GasketLevel& level) {
  auto bundles = group_eigenspaces(pairs, level);
  for (const auto& b : bundles) {
    const bool listed = std::any_of(table.records.begin(), table.records.end(),
                                    [&](const EigenvalueRecord& r) { return r.key() == b.record.key(); });
    if (!listed)
      throw Error(ErrorKind::Mismatch, "record " + b.record.key() + " missing from the spectrum table");
  }
  return bundles;
}

std::size_t LocalizedBasis::localized_count() const {
  std::size_t n = 0;
  for (const auto& [cell, vecs] : per_cell) n += vecs.cols();
  return n;
}

LocalizedBasis localized_split(const EigenspaceBundle& bundle, int cell_level, const GasketLevel& level) {
  const auto& rec = bundle.record;
  if (cell_level < 1 || cell_level >= rec.birth || bundle.level <= cell_level)
    throw Error(ErrorKind::Domain, "localized split needs 1 <= N < birth and N < m (N=" +
                                       std::to_string(cell_level) + ", birth=" +
                                       std::to_string(rec.birth) + ", m=" + std::to_string(bundle.level) + ")");
  const auto predicted = localization_counts(rec.series, rec.birth, cell_level);
  const auto& vs = level.vertices;
  const auto w = level.measure.interior_weights(vs);
  const Matrix& v = bundle.vectors;
  const std::size_t n = v.rows();
  const std::size_t d = v.cols();

  // Gram of the full bundle sets the scale for the kernel threshold.
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) scale = std::max(scale, v(i, k) * v(i, k));
  scale *= static_cast<double>(n);

  LocalizedBasis out;
  out.cell_level = cell_level;
  out.level = bundle.level;
  out.record = rec;
  out.graph_value = bundle.graph_value;
  Matrix all_coeffs(d, 0);
  std::vector<std::vector<double>> localized_coeffs;

  for (const auto& cell : CellAddress::all(cell_level)) {
    const auto inside = inside_cell(vs, cell);
    std::vector<std::size_t> in_rows, out_rows;
    for (std::size_t i = 0; i < n; ++i) (inside[i] ? in_rows : out_rows).push_back(i);

    // Coefficient directions whose combination vanishes off the cell.
    Matrix b(out_rows.size(), d);
    for (std::size_t r = 0; r < out_rows.size(); ++r)
      for (std::size_t k = 0; k < d; ++k) b(r, k) = v(out_rows[r], k);
    const auto g = kernels::gram(b, b);
    const auto eig = solve_symmetric(g);
    std::size_t dim = 0;
    while (dim < d && eig.values[dim] <= 1e-16 * scale) ++dim;
    if (static_cast<std::int64_t>(dim) != predicted.m_j_N) {
      std::ostringstream os;
      os << "record " << rec.key() << ": cell " << cell.to_string() << " carries " << dim
         << " localized eigenfunctions, expected m_j^N = " << predicted.m_j_N;
      throw Error(ErrorKind::Structural, os.str());
    }
    Matrix basis(d, dim);
    for (std::size_t k = 0; k < dim; ++k) basis.set_column(k, eig.vectors.column(k));

    Matrix vecs(n, dim);
    if (dim > 0) {
      const auto coeffs = pivoted_gram_schmidt(projected_candidates(v, w, basis, in_rows), dim,
                                               "cell " + cell.to_string());
      vecs = kernels::multiply(v, coeffs);
      for (std::size_t k = 0; k < dim; ++k) {
        auto col = vecs.column(k);
        const double top = max_abs(col);
        for (auto r : out_rows) {
          if (std::abs(col[r]) > kSnapTolerance * top)
            throw Error(ErrorKind::Structural, "localized vector leaks outside cell " + cell.to_string());
          col[r] = 0.0;
        }
        fix_sign(col);
        if (laplacian_residual(vs, bundle.graph_value, col) > 1e-9 * 8.0 * top)
          throw Error(ErrorKind::Numeric, "snapped localized vector is no longer an eigenvector");
        vecs.set_column(k, col);
        localized_coeffs.push_back(coeffs.column(k));
      }
      orthonormalize_weighted(vecs, w);
    }
    out.per_cell.emplace_back(cell, std::move(vecs));
  }

  // Non-localized remainder: complement of the localized coefficients.
  const std::size_t localized = localized_coeffs.size();
  const std::size_t alpha = d - localized;
  if (static_cast<std::int64_t>(localized) != predicted.d_j_N ||
      static_cast<std::int64_t>(alpha) != predicted.alpha_N) {
    std::ostringstream os;
    os << "record " << rec.key() << " at N=" << cell_level << ": " << localized << " localized and "
       << alpha << " non-localized, expected d_j^N=" << predicted.d_j_N
       << " and alpha^N=" << predicted.alpha_N;
    throw Error(ErrorKind::Structural, os.str());
  }
  Matrix complement = Matrix::identity(d);
  for (const auto& c : localized_coeffs)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) complement(i, j) -= c[i] * c[j];
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  if (alpha > 0) {
    // complement is a projector, so it serves as both K and K K^T here.
    Matrix z(d, n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < d; ++r) z(r, c) = w[c] * v(c, r);
    const auto coeffs = pivoted_gram_schmidt(kernels::multiply(complement, z), alpha, "non-localized");
    out.nonlocalized = kernels::multiply(v, coeffs);
    for (std::size_t k = 0; k < alpha; ++k) {
      auto col = out.nonlocalized.column(k);
      fix_sign(col);
      out.nonlocalized.set_column(k, col);
    }
  } else {
    out.nonlocalized = Matrix(n, 0);
  }
  return out;
}

LocalizedBasis rotate_nonlocalized(const LocalizedBasis& basis, std::uint64_t seed) {
  const std::size_t a = basis.nonlocalized_count();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Matrix g(a, a);
  for (double& x : g.data()) x = gauss(rng);
  const std::vector<double> ones(a, 1.0);
  orthonormalize_weighted(g, ones);
  LocalizedBasis out = basis;
  out.nonlocalized = kernels::multiply(basis.nonlocalized, g);
  return out;
}

Eigenbasis basis_from_bundle(const EigenspaceBundle& bundle) {
  Eigenbasis b;
  b.level = bundle.level;
  b.vectors = bundle.vectors;
  for (std::size_t k = 0; k < bundle.dimension(); ++k)
    b.meta.push_back({bundle.record.key(), k, bundle.record.value, bundle.graph_value,
                      bundle.record.birth, CellAddress()});
  return b;
}

Eigenbasis basis_from_split(const LocalizedBasis& split) {
  Eigenbasis b;
  b.level = split.level;
  const std::size_t n = split.nonlocalized.rows();
  const std::size_t d = split.localized_count() + split.nonlocalized_count();
  b.vectors = Matrix(n, d);
  std::size_t col = 0;
  auto push = [&](const Matrix& m, const CellAddress& support) {
    for (std::size_t k = 0; k < m.cols(); ++k, ++col) {
      b.vectors.set_column(col, m.column(k));
      b.meta.push_back({split.record.key(), col, split.record.value, split.graph_value,
                        split.record.birth, support});
    }
  };
  for (const auto& [cell, vecs] : split.per_cell) push(vecs, cell);
  push(split.nonlocalized, CellAddress());
  return b;
}

Eigenbasis basis_up_to(const std::vector<EigenspaceBundle>& bundles, double cutoff) {
  std::vector<const EigenspaceBundle*> chosen;
  for (const auto& b : bundles)
    if (b.record.value <= cutoff) chosen.push_back(&b);
  std::sort(chosen.begin(), chosen.end(),
            [](const EigenspaceBundle* x, const EigenspaceBundle* y) { return x->record < y->record; });
  Eigenbasis out;
  std::size_t d = 0;
  for (const auto* b : chosen) d += b->dimension();
  if (!bundles.empty()) out.level = bundles.front().level;
  const std::size_t n = bundles.empty() ? 0 : bundles.front().vectors.rows();
  out.vectors = Matrix(n, d);
  std::size_t col = 0;
  for (const auto* b : chosen)
    for (std::size_t k = 0; k < b->dimension(); ++k, ++col) {
      for (std::size_t r = 0; r < n; ++r) out.vectors(r, col) = b->vectors(r, k);
      out.meta.push_back({b->record.key(), k, b->record.value, b->graph_value, b->record.birth, CellAddress()});
    }
  return out;
}

const EigenspaceBundle& LevelSpectrum::bundle(const std::string& record_key) const {
  for (const auto& b : bundles)
    if (b.record.key() == record_key) return b;
  throw Error(ErrorKind::Domain, "record " + record_key + " is not resolvable at level " +
                                     std::to_string(m()));
}

LevelSpectrum build_level_spectrum(int m, EigenMethod method) {
  LevelSpectrum ls;
  ls.level = make_level(m);
  const auto lap = build_dirichlet_laplacian(ls.level.vertices, false);
  ls.bundles = group_eigenspaces(solve_graph_spectrum(lap, method), ls.level);
  std::sort(ls.bundles.begin(), ls.bundles.end(),
            [](const EigenspaceBundle& x, const EigenspaceBundle& y) { return x.record < y.record; });
  return ls;
}

}  // namespace gasket
