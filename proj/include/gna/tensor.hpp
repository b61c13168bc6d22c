#pragma once

#include <cstddef>
#include <initializer_list>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace gna {

using Shape = std::vector<std::size_t>;

// Cache-line aligned storage. Eigen picks its kernel peeling from the address
// alignment, so unaligned buffers could change the summation order between two
// otherwise identical runs in one process.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

using AlignedValues = std::vector<double, AlignedAllocator<double>>;

// Keeps freed tensor buffers in the process heap. glibc otherwise trims or
// unmaps large aligned blocks on free, and training then spends about a third
// of its time in page faults. Call once from main; a no-op on other C libraries.
void retain_freed_memory();

std::string to_string(const Shape& shape);

// Dense row-major array of doubles. Every dimension is positive, so a tensor
// always holds at least one value. Rank-1 tensors behave as a single row when
// an operation works row by row.
class Tensor {
 public:
  // A single zero, shape {1}.
  Tensor();
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t rows() const noexcept { return rank() == 2 ? shape_[0] : 1; }
  std::size_t cols() const noexcept { return shape_.back(); }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

  // The only value of a one-element tensor.
  double item() const;

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols(), cols());
  }

  void fill(double value);
  bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }
  std::string shape_string() const { return to_string(shape_); }

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  AlignedValues values_;
};

}  // namespace gna
