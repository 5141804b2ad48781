#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace splab {

/// Real symmetric operator given only through its action.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t dim() const = 0;
  /// y = A x; x and y do not alias.
  virtual void apply(const double* x, double* y) const = 0;
  /// Max absolute column sum (exact or an upper bound).
  virtual double norm1() const = 0;
};

/// Compressed sparse row matrix with sorted column indices.
class SparseMatrix : public LinearOperator {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t dim, std::vector<std::int64_t> offsets, std::vector<std::int32_t> cols,
               std::vector<double> vals, bool symmetric);

  /// Builds from a per-row generator in two passes (count, fill). The
  /// generator must emit the same entries on both calls for a row.
  using RowFn = std::function<void(std::size_t row, std::vector<std::pair<std::int32_t, double>>& out)>;
  static SparseMatrix from_rows(std::size_t dim, const RowFn& row_fn, bool symmetric);

  static SparseMatrix identity(std::size_t dim);
  static SparseMatrix from_dense(const std::vector<double>& a, std::size_t dim, bool symmetric);

  std::size_t dim() const override { return dim_; }
  std::size_t nnz() const noexcept { return vals_.size(); }
  void apply(const double* x, double* y) const override;
  double norm1() const override;

  std::vector<double> matvec(const std::vector<double>& v) const;
  std::vector<double> diagonal() const;
  std::vector<double> to_dense() const;
  double at(std::size_t i, std::size_t j) const;

  /// Largest |A_ij - A_ji| over stored entries (missing partners count as 0).
  double asymmetry() const;
  bool symmetric() const noexcept { return symmetric_; }

  /// Returns alpha*A + diag(d) (d may be empty).
  SparseMatrix scaled_plus_diagonal(double alpha, std::span<const double> d) const;

  const std::vector<std::int64_t>& offsets() const noexcept { return offsets_; }
  const std::vector<std::int32_t>& columns() const noexcept { return cols_; }
  const std::vector<double>& values() const noexcept { return vals_; }

  /// Binary dump: dim (u64), nnz (u64), offsets (i64), columns (i32), values (f64), little-endian.
  void save_binary(const std::filesystem::path& path) const;
  static SparseMatrix load_binary(const std::filesystem::path& path);

 private:
  std::size_t dim_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int32_t> cols_;
  std::vector<double> vals_;
  bool symmetric_ = false;
};

/// alpha*A + diag(d) applied without materializing a new matrix.
class ShiftedOperator : public LinearOperator {
 public:
  ShiftedOperator(const SparseMatrix& a, double alpha, std::vector<double> diag);
  std::size_t dim() const override { return a_.dim(); }
  void apply(const double* x, double* y) const override;
  double norm1() const override;
  const std::vector<double>& diag() const noexcept { return diag_; }

 private:
  const SparseMatrix& a_;
  double alpha_;
  std::vector<double> diag_;
  double a_norm1_;
};

/// Dense symmetric operator (row-major), used by tests and small problems.
class DenseOperator : public LinearOperator {
 public:
  DenseOperator(std::vector<double> a, std::size_t dim);
  std::size_t dim() const override { return dim_; }
  void apply(const double* x, double* y) const override;
  double norm1() const override;

 private:
  std::vector<double> a_;
  std::size_t dim_;
};

/// Materializes any operator densely by applying it to unit vectors.
std::vector<double> to_dense(const LinearOperator& op);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace splab
