#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace fosls {

enum class Execution { serial, parallel };

struct Triplet {
  int row;
  int col;
  double value;
};

/// Square matrix in compressed-row storage with both triangles stored.
/// Symmetry is a property of how the matrix is filled, not of the storage;
/// asymmetry() reports the largest mismatch.
class SparseSymMatrix {
public:
  SparseSymMatrix() = default;
  SparseSymMatrix(int dimension, std::vector<int> row_ptr, std::vector<int> col_index);

  /// Sums duplicates; columns sorted within each row.
  static SparseSymMatrix from_triplets(int dimension, std::span<const Triplet> entries);

  int dimension() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  const std::vector<int>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<int>& col_index() const noexcept { return col_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  /// Position of (row, col) in the value array or -1 when outside the pattern.
  int find(int row, int col) const noexcept;
  double get(int row, int col) const noexcept;
  /// Throws std::out_of_range outside the pattern.
  void add(int row, int col, double value);

  std::vector<double> diagonal() const;
  double asymmetry() const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y,
                Execution exec = Execution::parallel) const;
  std::vector<double> multiply(std::span<const double> x) const;

  /// x^T A y
  double bilinear(std::span<const double> x, std::span<const double> y) const;

  /// Matrix Market coordinate format (1-based indices), all stored entries.
  void write_coordinate(std::ostream& out) const;

private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_;
  std::vector<double> values_;
};

namespace kernels {

/// Reductions are summed over fixed-size blocks in a fixed order so the
/// result does not depend on the thread count.
inline constexpr std::size_t kReductionBlock = 4096;

double dot(std::span<const double> a, std::span<const double> b, Execution exec = Execution::parallel);
double norm2(std::span<const double> a, Execution exec = Execution::parallel);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y,
          Execution exec = Execution::parallel);

void spmv_serial(const SparseSymMatrix& a, std::span<const double> x, std::span<double> y);
void spmv_parallel(const SparseSymMatrix& a, std::span<const double> x, std::span<double> y);

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();
void set_threads(int n);

} // namespace kernels

} // namespace fosls
