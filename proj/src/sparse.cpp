#include "splab/sparse.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

#include "splab/error.hpp"
#include "splab/parallel.hpp"

namespace splab {

SparseMatrix::SparseMatrix(std::size_t dim, std::vector<std::int64_t> offsets, std::vector<std::int32_t> cols,
                           std::vector<double> vals, bool symmetric)
    : dim_(dim), offsets_(std::move(offsets)), cols_(std::move(cols)), vals_(std::move(vals)), symmetric_(symmetric) {
  if (offsets_.size() != dim_ + 1 || offsets_.front() != 0 ||
      static_cast<std::size_t>(offsets_.back()) != cols_.size() || cols_.size() != vals_.size())
    throw ValidationError("CSR arrays are inconsistent");
  for (std::size_t r = 0; r < dim_; ++r) {
    if (offsets_[r + 1] < offsets_[r]) throw ValidationError("CSR offsets must be nondecreasing");
    for (auto p = offsets_[r]; p < offsets_[r + 1]; ++p) {
      if (cols_[p] < 0 || static_cast<std::size_t>(cols_[p]) >= dim_) throw ValidationError("CSR column out of range");
      if (p > offsets_[r] && cols_[p] <= cols_[p - 1]) throw ValidationError("CSR columns must be strictly increasing");
    }
  }
}

SparseMatrix SparseMatrix::from_rows(std::size_t dim, const RowFn& row_fn, bool symmetric) {
  if (dim > static_cast<std::size_t>(INT32_MAX)) throw CapacityError("operator dimension exceeds 32-bit columns");
  SparseMatrix m;
  m.dim_ = dim;
  m.symmetric_ = symmetric;
  m.offsets_.assign(dim + 1, 0);
  parallel_blocks(dim, [&](std::size_t b, std::size_t e) {
    std::vector<std::pair<std::int32_t, double>> row;
    for (std::size_t r = b; r < e; ++r) {
      row.clear();
      row_fn(r, row);
      m.offsets_[r + 1] = static_cast<std::int64_t>(row.size());
    }
  });
  for (std::size_t r = 0; r < dim; ++r) m.offsets_[r + 1] += m.offsets_[r];
  m.cols_.resize(static_cast<std::size_t>(m.offsets_.back()));
  m.vals_.resize(m.cols_.size());
  parallel_blocks(dim, [&](std::size_t b, std::size_t e) {
    std::vector<std::pair<std::int32_t, double>> row;
    for (std::size_t r = b; r < e; ++r) {
      row.clear();
      row_fn(r, row);
      std::sort(row.begin(), row.end(), [](const auto& a, const auto& c) { return a.first < c.first; });
      auto p = m.offsets_[r];
      if (static_cast<std::int64_t>(row.size()) != m.offsets_[r + 1] - p)
        throw ValidationError("row generator is not deterministic");
      for (std::size_t t = 0; t < row.size(); ++t) {
        if (t > 0 && row[t].first == row[t - 1].first) throw ValidationError("row generator emitted a duplicate column");
        m.cols_[p + t] = row[t].first;
        m.vals_[p + t] = row[t].second;
      }
    }
  });
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t dim) {
  std::vector<std::int64_t> off(dim + 1);
  std::vector<std::int32_t> cols(dim);
  for (std::size_t i = 0; i <= dim; ++i) off[i] = static_cast<std::int64_t>(i);
  for (std::size_t i = 0; i < dim; ++i) cols[i] = static_cast<std::int32_t>(i);
  return SparseMatrix(dim, std::move(off), std::move(cols), std::vector<double>(dim, 1.0), true);
}

SparseMatrix SparseMatrix::from_dense(const std::vector<double>& a, std::size_t dim, bool symmetric) {
  if (a.size() != dim * dim) throw ValidationError("dense matrix has wrong size");
  return from_rows(
      dim,
      [&](std::size_t r, auto& out) {
        for (std::size_t c = 0; c < dim; ++c)
          if (a[r * dim + c] != 0.0) out.emplace_back(static_cast<std::int32_t>(c), a[r * dim + c]);
      },
      symmetric);
}

void SparseMatrix::apply(const double* x, double* y) const {
  parallel_blocks(dim_, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      double s = 0.0;
      for (auto p = offsets_[r]; p < offsets_[r + 1]; ++p) s += vals_[p] * x[cols_[p]];
      y[r] = s;
    }
  }, 2048);
}

double SparseMatrix::norm1() const {
  std::vector<double> colsum(dim_, 0.0);
  for (std::size_t p = 0; p < vals_.size(); ++p) colsum[cols_[p]] += std::abs(vals_[p]);
  return colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
}

std::vector<double> SparseMatrix::matvec(const std::vector<double>& v) const {
  if (v.size() != dim_) throw ValidationError("matvec: vector length " + std::to_string(v.size()) +
                                              " does not match dimension " + std::to_string(dim_));
  std::vector<double> y(dim_);
  apply(v.data(), y.data());
  return y;
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto b = cols_.begin() + offsets_[i];
  const auto e = cols_.begin() + offsets_[i + 1];
  const auto it = std::lower_bound(b, e, static_cast<std::int32_t>(j));
  return (it != e && *it == static_cast<std::int32_t>(j)) ? vals_[it - cols_.begin()] : 0.0;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(dim_);
  for (std::size_t i = 0; i < dim_; ++i) d[i] = at(i, i);
  return d;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> a(dim_ * dim_, 0.0);
  for (std::size_t r = 0; r < dim_; ++r)
    for (auto p = offsets_[r]; p < offsets_[r + 1]; ++p) a[r * dim_ + cols_[p]] = vals_[p];
  return a;
}

double SparseMatrix::asymmetry() const {
  double worst = 0.0;
  for (std::size_t r = 0; r < dim_; ++r)
    for (auto p = offsets_[r]; p < offsets_[r + 1]; ++p)
      worst = std::max(worst, std::abs(vals_[p] - at(static_cast<std::size_t>(cols_[p]), r)));
  return worst;
}

SparseMatrix SparseMatrix::scaled_plus_diagonal(double alpha, std::span<const double> d) const {
  if (!d.empty() && d.size() != dim_) throw ValidationError("diagonal length does not match dimension");
  return from_rows(
      dim_,
      [&](std::size_t r, auto& out) {
        bool has_diag = false;
        for (auto p = offsets_[r]; p < offsets_[r + 1]; ++p) {
          double v = alpha * vals_[p];
          if (static_cast<std::size_t>(cols_[p]) == r) {
            has_diag = true;
            if (!d.empty()) v += d[r];
          }
          out.emplace_back(cols_[p], v);
        }
        if (!has_diag && !d.empty() && d[r] != 0.0) out.emplace_back(static_cast<std::int32_t>(r), d[r]);
      },
      symmetric_);
}

namespace {

template <typename T>
void write_le(std::ofstream& out, const T* data, std::size_t count) {
  static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
}

template <typename T>
void read_le(std::ifstream& in, T* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
  if (!in) throw ValidationError("truncated CSR dump");
}

}  // namespace

void SparseMatrix::save_binary(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  const std::uint64_t header[2] = {dim_, vals_.size()};
  write_le(out, header, 2);
  write_le(out, offsets_.data(), offsets_.size());
  write_le(out, cols_.data(), cols_.size());
  write_le(out, vals_.data(), vals_.size());
}

SparseMatrix SparseMatrix::load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::uint64_t header[2];
  read_le(in, header, 2);
  std::vector<std::int64_t> off(header[0] + 1);
  std::vector<std::int32_t> cols(header[1]);
  std::vector<double> vals(header[1]);
  read_le(in, off.data(), off.size());
  read_le(in, cols.data(), cols.size());
  read_le(in, vals.data(), vals.size());
  SparseMatrix m(header[0], std::move(off), std::move(cols), std::move(vals), false);
  m.symmetric_ = m.asymmetry() == 0.0;
  return m;
}

ShiftedOperator::ShiftedOperator(const SparseMatrix& a, double alpha, std::vector<double> diag)
    : a_(a), alpha_(alpha), diag_(std::move(diag)), a_norm1_(a.norm1()) {
  if (diag_.size() != a_.dim()) throw ValidationError("diagonal length does not match dimension");
}

void ShiftedOperator::apply(const double* x, double* y) const {
  const auto& off = a_.offsets();
  const auto& cols = a_.columns();
  const auto& vals = a_.values();
  parallel_blocks(a_.dim(), [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      double s = 0.0;
      for (auto p = off[r]; p < off[r + 1]; ++p) s += vals[p] * x[cols[p]];
      y[r] = alpha_ * s + diag_[r] * x[r];
    }
  }, 2048);
}

double ShiftedOperator::norm1() const {
  double dmax = 0.0;
  for (double d : diag_) dmax = std::max(dmax, std::abs(d));
  return std::abs(alpha_) * a_norm1_ + dmax;
}

DenseOperator::DenseOperator(std::vector<double> a, std::size_t dim) : a_(std::move(a)), dim_(dim) {
  if (a_.size() != dim * dim) throw ValidationError("dense operator has wrong size");
}

void DenseOperator::apply(const double* x, double* y) const {
  for (std::size_t r = 0; r < dim_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) s += a_[r * dim_ + c] * x[c];
    y[r] = s;
  }
}

double DenseOperator::norm1() const {
  double best = 0.0;
  for (std::size_t c = 0; c < dim_; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) s += std::abs(a_[r * dim_ + c]);
    best = std::max(best, s);
  }
  return best;
}

std::vector<double> to_dense(const LinearOperator& op) {
  const std::size_t n = op.dim();
  std::vector<double> a(n * n), e(n, 0.0), col(n);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    op.apply(e.data(), col.data());
    e[c] = 0.0;
    for (std::size_t r = 0; r < n; ++r) a[r * n + c] = col[r];
  }
  return a;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace splab
