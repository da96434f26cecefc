#include "fosls/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fosls {

SparseSymMatrix::SparseSymMatrix(int dimension, std::vector<int> row_ptr, std::vector<int> col_index)
    : n_(dimension), row_ptr_(std::move(row_ptr)), col_(std::move(col_index)),
      values_(col_.size(), 0.0) {
  if (row_ptr_.size() != static_cast<std::size_t>(n_) + 1 ||
      static_cast<std::size_t>(row_ptr_.back()) != col_.size()) {
    throw std::invalid_argument("SparseSymMatrix: inconsistent CSR arrays");
  }
}

SparseSymMatrix SparseSymMatrix::from_triplets(int dimension, std::span<const Triplet> entries) {
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(dimension));
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= dimension || t.col < 0 || t.col >= dimension) {
      throw std::out_of_range("from_triplets: index out of range");
    }
    rows[t.row].emplace_back(t.col, t.value);
  }
  std::vector<int> ptr{0};
  std::vector<int> cols;
  std::vector<double> vals;
  for (auto& r : rows) {
    std::stable_sort(r.begin(), r.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k > 0 && r[k].first == r[k - 1].first) {
        vals.back() += r[k].second;
      } else {
        cols.push_back(r[k].first);
        vals.push_back(r[k].second);
      }
    }
    ptr.push_back(static_cast<int>(cols.size()));
  }
  SparseSymMatrix m(dimension, std::move(ptr), std::move(cols));
  m.values_ = std::move(vals);
  return m;
}

int SparseSymMatrix::find(int row, int col) const noexcept {
  if (row < 0 || row >= n_) return -1;
  const auto first = col_.begin() + row_ptr_[row];
  const auto last = col_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return -1;
  return static_cast<int>(it - col_.begin());
}

double SparseSymMatrix::get(int row, int col) const noexcept {
  const int k = find(row, col);
  return k < 0 ? 0.0 : values_[static_cast<std::size_t>(k)];
}

void SparseSymMatrix::add(int row, int col, double value) {
  const int k = find(row, col);
  if (k < 0) {
    throw std::out_of_range("entry (" + std::to_string(row) + ", " + std::to_string(col) +
                            ") outside sparsity pattern");
  }
  values_[static_cast<std::size_t>(k)] += value;
}

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
  for (int i = 0; i < n_; ++i) d[i] = get(i, i);
  return d;
}

double SparseSymMatrix::asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      worst = std::max(worst, std::abs(values_[k] - get(col_[k], i)));
    }
  }
  return worst;
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y, Execution exec) const {
  if (exec == Execution::serial) {
    kernels::spmv_serial(*this, x, y);
  } else {
    kernels::spmv_parallel(*this, x, y);
  }
}

std::vector<double> SparseSymMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(n_));
  multiply(x, y);
  return y;
}

double SparseSymMatrix::bilinear(std::span<const double> x, std::span<const double> y) const {
  const std::vector<double> ay = multiply(y);
  return kernels::dot(x, ay);
}

void SparseSymMatrix::write_coordinate(std::ostream& out) const {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << n_ << ' ' << n_ << ' ' << nnz() << '\n';
  const auto old = out.precision(17);
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      out << i + 1 << ' ' << col_[k] + 1 << ' ' << values_[k] << '\n';
    }
  }
  out.precision(old);
}

namespace kernels {

namespace {

std::size_t block_count(std::size_t n) { return (n + kReductionBlock - 1) / kReductionBlock; }

template <typename BlockFn>
double blocked_sum(std::size_t n, Execution exec, BlockFn&& block) {
  const std::size_t nb = block_count(n);
  std::vector<double> partial(nb, 0.0);
  const auto nbl = static_cast<long>(nb);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (long b = 0; b < nbl; ++b) partial[b] = block(static_cast<std::size_t>(b));
  } else {
    for (long b = 0; b < nbl; ++b) partial[b] = block(static_cast<std::size_t>(b));
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

} // namespace

double dot(std::span<const double> a, std::span<const double> b, Execution exec) {
  const std::size_t n = a.size();
  return blocked_sum(n, exec, [&](std::size_t blk) {
    const std::size_t lo = blk * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
  });
}

double norm2(std::span<const double> a, Execution exec) { return std::sqrt(dot(a, a, exec)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y, Execution exec) {
  const auto n = static_cast<long>(x.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) y[i] += alpha * x[i];
  } else {
    for (long i = 0; i < n; ++i) y[i] += alpha * x[i];
  }
}

void spmv_serial(const SparseSymMatrix& a, std::span<const double> x, std::span<double> y) {
  const auto& ptr = a.row_ptr();
  const auto& col = a.col_index();
  const auto& val = a.values();
  for (int i = 0; i < a.dimension(); ++i) {
    double s = 0.0;
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

void spmv_parallel(const SparseSymMatrix& a, std::span<const double> x, std::span<double> y) {
  const auto& ptr = a.row_ptr();
  const auto& col = a.col_index();
  const auto& val = a.values();
  const int n = a.dimension();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

} // namespace kernels

} // namespace fosls
