#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace bgx {

using Shape = std::vector<std::size_t>;

/// Dense row-major tensor of doubles with 1 to 4 modes.
///
/// The last mode varies fastest. A video is stored as (height, width,
/// channel, frame), so the frame values of one pixel-channel are contiguous.
class Tensor {
 public:
  static constexpr std::size_t kMaxOrder = 4;

  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t order() const noexcept { return shape_.size(); }
  std::size_t extent(std::size_t mode) const { return shape_.at(mode); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  /// Row-major strides in elements.
  Shape strides() const;
  std::size_t offset(std::initializer_list<std::size_t> index) const;

  double& operator()(std::initializer_list<std::size_t> index) { return data_[offset(index)]; }
  double operator()(std::initializer_list<std::size_t> index) const { return data_[offset(index)]; }
  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

std::size_t element_count(const Shape& shape);

struct Norms {
  double l1 = 0.0;
  double frobenius = 0.0;
  double max_abs = 0.0;
};

/// Mode-n unfolding (0-based mode). Rows follow the chosen mode, columns
/// enumerate the remaining modes lexicographically in increasing mode order.
Tensor unfold(const Tensor& t, std::size_t mode);

/// Inverse of unfold for a tensor of the given shape.
Tensor fold(const Tensor& matrix, std::size_t mode, const Shape& shape);

/// Contraction over the first `shared_modes` modes of both operands. The
/// result carries the remaining modes of x followed by those of y; a full
/// contraction yields shape (1).
Tensor contract(const Tensor& x, const Tensor& y, std::size_t shared_modes);

/// Elementwise max(s - tau, 0) + min(s + tau, 0).
Tensor soft_threshold(const Tensor& t, double tau);

Norms norms(const Tensor& t);

}  // namespace bgx
