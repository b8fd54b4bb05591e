#pragma once

// Fiber Hamiltonian H_{P,n} and its interaction slices as sparse symmetric
// operators on a truncated occupation-number basis.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdio>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "yukawa/errors.hpp"
#include "yukawa/fock.hpp"
#include "yukawa/model.hpp"

namespace yukawa {

using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

struct OffDiagEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Diagonal vector plus off-diagonal entries stored row-sorted over both triangles.
class SparseSymmetric {
public:
  SparseSymmetric() = default;

  /// `upper` holds entries with row < col; the mirror entries are generated.
  SparseSymmetric(Vector diagonal, const std::vector<OffDiagEntry>& upper)
      : diag_(std::move(diagonal)) {
    const auto n = static_cast<std::size_t>(diag_.size());
    row_ptr_.assign(n + 1, 0);
    for (const auto& e : upper) {
      if (e.row >= n || e.col >= n || e.row == e.col) {
        throw DimensionMismatch("off-diagonal entry outside the operator");
      }
      ++row_ptr_[e.row + 1];
      ++row_ptr_[e.col + 1];
    }
    for (std::size_t i = 0; i < n; ++i) row_ptr_[i + 1] += row_ptr_[i];
    cols_.resize(row_ptr_[n]);
    vals_.resize(row_ptr_[n]);
    std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
    for (const auto& e : upper) {
      cols_[fill[e.row]] = e.col;
      vals_[fill[e.row]++] = e.value;
      cols_[fill[e.col]] = e.row;
      vals_[fill[e.col]++] = e.value;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto b = row_ptr_[i], e = row_ptr_[i + 1];
      std::vector<std::pair<std::size_t, double>> row;
      row.reserve(e - b);
      for (auto k = b; k < e; ++k) row.emplace_back(cols_[k], vals_[k]);
      std::sort(row.begin(), row.end());
      for (auto k = b; k < e; ++k) {
        cols_[k] = row[k - b].first;
        vals_[k] = row[k - b].second;
      }
    }
  }

  static SparseSymmetric from_dense(const Eigen::MatrixXd& a, double drop = 0.0) {
    std::vector<OffDiagEntry> upper;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = i + 1; j < a.cols(); ++j)
        if (std::abs(a(i, j)) > drop) upper.push_back({std::size_t(i), std::size_t(j), a(i, j)});
    return SparseSymmetric(a.diagonal(), upper);
  }

  Eigen::Index dim() const { return diag_.size(); }
  const Vector& diagonal() const { return diag_; }
  std::size_t nnz_offdiag() const { return cols_.size(); }
  bool offdiag_empty() const {
    return std::all_of(vals_.begin(), vals_.end(), [](double v) { return v == 0.0; });
  }

  /// Entries with row < col, in row-major order.
  std::vector<OffDiagEntry> upper_entries() const {
    std::vector<OffDiagEntry> out;
    for (std::size_t i = 0; i + 1 < row_ptr_.size(); ++i)
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        if (cols_[k] > i) out.push_back({i, cols_[k], vals_[k]});
    return out;
  }

  double entry(std::size_t i, std::size_t j) const {
    if (i == j) return diag_[static_cast<Eigen::Index>(i)];
    const auto b = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto e = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(b, e, j);
    if (it == e || *it != j) return 0.0;
    return vals_[static_cast<std::size_t>(it - cols_.begin())];
  }

  template <class Scalar>
  void apply_into(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                  Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y) const {
    if (x.size() != dim()) {
      throw DimensionMismatch("vector of size " + std::to_string(x.size()) +
                              " applied to operator of size " + std::to_string(dim()));
    }
    y.resize(x.size());
    const auto n = static_cast<std::size_t>(dim());
    for (std::size_t i = 0; i < n; ++i) {
      Scalar acc = diag_[Eigen::Index(i)] * x[Eigen::Index(i)];
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += vals_[k] * x[Eigen::Index(cols_[k])];
      y[Eigen::Index(i)] = acc;
    }
  }

  template <class Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y;
    apply_into(x, y);
    return y;
  }

  /// Gershgorin-type bound on the operator norm.
  double norm_bound() const {
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < row_ptr_.size(); ++i) {
      double s = std::abs(diag_[Eigen::Index(i)]);
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(vals_[k]);
      best = std::max(best, s);
    }
    return best;
  }

  /// Lower end of the Gershgorin disc union.
  double gershgorin_lower() const {
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < row_ptr_.size(); ++i) {
      double s = 0.0;
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(vals_[k]);
      low = std::min(low, diag_[Eigen::Index(i)] - s);
    }
    return low;
  }

  Eigen::MatrixXd to_dense(Eigen::Index threshold = 4000) const {
    if (dim() > threshold) {
      throw DimensionMismatch("dense materialization refused for size " + std::to_string(dim()) +
                              " above threshold " + std::to_string(threshold));
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim(), dim());
    a.diagonal() = diag_;
    for (std::size_t i = 0; i + 1 < row_ptr_.size(); ++i)
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        a(Eigen::Index(i), Eigen::Index(cols_[k])) = vals_[k];
    return a;
  }

  /// Coordinate list "row col value" (0-based), diagonal first then every stored off-diagonal.
  void write_coo(std::ostream& os) const {
    os << "# dim " << dim() << " nnz " << (dim() + static_cast<Eigen::Index>(cols_.size())) << "\n";
    char buf[96];
    for (Eigen::Index i = 0; i < dim(); ++i) {
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", (long long)i, (long long)i, diag_[i]);
      os << buf;
    }
    for (std::size_t i = 0; i + 1 < row_ptr_.size(); ++i)
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", i, cols_[k], vals_[k]);
        os << buf;
      }
  }

  SparseSymmetric shifted(double c) const {
    SparseSymmetric out = *this;
    out.diag_.array() += c;
    return out;
  }

private:
  Vector diag_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
};

/// Anything the spectral routines can act on.
template <class Op>
concept SymmetricOperator = requires(const Op& op, const Vector& x, const CVector& cx, Vector& y,
                                     CVector& cy) {
  { op.dim() } -> std::convertible_to<Eigen::Index>;
  { op.diagonal() } -> std::convertible_to<const Vector&>;
  op.apply_into(x, y);
  op.apply_into(cx, cy);
};

/// Common storage for FiberOperator and SlicePiece.
class BasisOperator {
public:
  const SparseSymmetric& matrix() const { return mat_; }
  const std::shared_ptr<const FockBasis>& basis() const { return basis_; }

  Eigen::Index dim() const { return mat_.dim(); }
  const Vector& diagonal() const { return mat_.diagonal(); }
  template <class Scalar>
  void apply_into(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                  Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y) const {
    mat_.apply_into(x, y);
  }
  template <class Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) const {
    return mat_.apply(x);
  }
  double entry(std::size_t i, std::size_t j) const { return mat_.entry(i, j); }
  Eigen::MatrixXd to_dense(Eigen::Index threshold = 4000) const { return mat_.to_dense(threshold); }
  void write_coo(std::ostream& os) const { mat_.write_coo(os); }

protected:
  BasisOperator() = default;
  BasisOperator(std::shared_ptr<const FockBasis> basis, SparseSymmetric mat)
      : basis_(std::move(basis)), mat_(std::move(mat)) {}

  std::shared_ptr<const FockBasis> basis_;
  SparseSymmetric mat_;
};

/// H_{P,n} on a basis of scale >= n: kinetic + field energy on the diagonal,
/// interaction from shells 1..n off the diagonal.
class FiberOperator : public BasisOperator {
public:
  FiberOperator() = default;
  FiberOperator(std::shared_ptr<const FockBasis> basis, SparseSymmetric mat, Momentum3 p, int scale)
      : BasisOperator(std::move(basis), std::move(mat)), p_(p), scale_(scale) {}

  const Momentum3& p() const { return p_; }
  /// Interaction shells 1..scale() are included.
  int scale() const { return scale_; }

private:
  Momentum3 p_;
  int scale_ = 0;
};

/// g Phi restricted to the modes of one shell; zero diagonal.
class SlicePiece : public BasisOperator {
public:
  SlicePiece() = default;
  SlicePiece(std::shared_ptr<const FockBasis> basis, SparseSymmetric mat, Shell shell)
      : BasisOperator(std::move(basis), std::move(mat)), shell_(shell) {}

  const Shell& shell() const { return shell_; }
  bool is_zero() const { return mat_.offdiag_empty(); }

private:
  Shell shell_;
};

struct AssembleOptions {
  bool allow_p_beyond_max = false;
};

namespace detail {

inline void check_compatible(const FockBasis& basis, const ModeSet& modes) {
  if (basis.mode_fingerprint() != modes.fingerprint()) {
    throw DimensionMismatch("basis was built from a different mode set");
  }
}

/// Creation entries g sqrt(w_j) rho(k_j) sqrt(n_j + 1) for modes in [first, last).
inline std::vector<OffDiagEntry> interaction_entries(const FockBasis& basis, const ModeSet& modes,
                                                     const ModelParams& params, std::size_t first,
                                                     std::size_t last) {
  std::vector<OffDiagEntry> out;
  if (params.g == 0.0) return out;
  last = std::min(last, basis.active_modes());
  std::vector<double> coupling(modes.size(), 0.0);
  for (std::size_t j = first; j < last; ++j) {
    coupling[j] = params.g * std::sqrt(modes[j].weight) * rho(modes[j].k, params.mu);
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const OccState& s = basis[i];
    if (static_cast<int>(s.total_bosons()) >= basis.b_max()) continue;
    for (std::size_t j = first; j < last; ++j) {
      const auto jj = static_cast<std::uint32_t>(j);
      const auto target = basis.find(s.raised(jj));
      if (!target) continue;
      const double enhancement = std::sqrt(static_cast<double>(s.occupation(jj)) + 1.0);
      out.push_back({i, *target, coupling[j] * enhancement});
    }
  }
  return out;
}

}  // namespace detail

/// sqrt((P - P^f)^2 + m^2) + H^f per basis state.
inline Vector free_diagonal(const Momentum3& p, const FockBasis& basis, const ModeSet& modes,
                            const ModelParams& params) {
  Vector d(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Momentum3 pf = field_momentum(basis[i], modes);
    d[Eigen::Index(i)] = free_energy(p - pf, params.m) + field_energy(basis[i], modes, params);
  }
  return d;
}

inline FiberOperator assemble(const Momentum3& p, int n, const ModelParams& params,
                              std::shared_ptr<const FockBasis> basis, const ModeSet& modes,
                              AssembleOptions options = {}) {
  if (!basis) throw DimensionMismatch("null basis");
  detail::check_compatible(*basis, modes);
  if (n < 0 || n > modes.n_shells()) {
    throw InvalidParameters("scale " + std::to_string(n) + " outside the shell ladder");
  }
  if (basis->scale() < n) {
    throw DimensionMismatch("basis scale " + std::to_string(basis->scale()) +
                            " below operator scale " + std::to_string(n));
  }
  if (!options.allow_p_beyond_max && !(p.norm() < params.p_max)) {
    throw InvalidParameters("|P| = " + std::to_string(p.norm()) + " is not below p_max = " +
                            std::to_string(params.p_max));
  }
  auto entries = detail::interaction_entries(*basis, modes, params, 0, modes.active_count(n));
  SparseSymmetric mat(free_diagonal(p, *basis, modes, params), entries);
  return FiberOperator(std::move(basis), std::move(mat), p, n);
}

inline SlicePiece slice_piece(int n, const ModelParams& params, std::shared_ptr<const FockBasis> basis,
                              const ModeSet& modes) {
  if (!basis) throw DimensionMismatch("null basis");
  detail::check_compatible(*basis, modes);
  const Shell s = shell(params, n);
  if (basis->scale() < n) {
    throw DimensionMismatch("basis scale " + std::to_string(basis->scale()) + " below shell " +
                            std::to_string(n));
  }
  const auto [first, last] = modes.shell_range(n);
  auto entries = detail::interaction_entries(*basis, modes, params, first, last);
  SparseSymmetric mat(Vector::Zero(static_cast<Eigen::Index>(basis->size())), entries);
  return SlicePiece(std::move(basis), std::move(mat), s);
}

template <SymmetricOperator Op, class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(const Op& op, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y;
  op.apply_into(v, y);
  return y;
}

/// Completed-square constant S = sum_j w_j rho(k_j)^2 / omega(k_j) over modes of shells <= n.
inline double completed_square_constant(const ModeSet& modes, const ModelParams& params, int n) {
  double s = 0.0;
  for (std::size_t j = 0; j < modes.active_count(n); ++j) {
    const double r = rho(modes[j].k, params.mu);
    s += modes[j].weight * r * r / omega(modes[j].k, params.mu);
  }
  return s;
}

}  // namespace yukawa
