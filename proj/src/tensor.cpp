#include "bgx/tensor.hpp"

#include <cmath>
#include <string>

#include "bgx/errors.hpp"
#include "bgx/kernels.hpp"

namespace bgx {

namespace {

void check_shape(const Shape& shape) {
  if (shape.empty() || shape.size() > Tensor::kMaxOrder)
    throw InvalidArgument("tensor order must be 1.." + std::to_string(Tensor::kMaxOrder) + ", got " +
                          std::to_string(shape.size()));
  for (std::size_t e : shape)
    if (e == 0) throw InvalidArgument("tensor extents must be >= 1");
}

std::size_t product(const Shape& shape, std::size_t first, std::size_t last) {
  std::size_t p = 1;
  for (std::size_t i = first; i < last; ++i) p *= shape[i];
  return p;
}

}  // namespace

std::size_t element_count(const Shape& shape) { return product(shape, 0, shape.size()); }

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(element_count(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != element_count(shape_))
    throw InvalidArgument("tensor data length " + std::to_string(data_.size()) +
                          " does not match shape product " + std::to_string(element_count(shape_)));
}

Shape Tensor::strides() const {
  Shape s(shape_.size(), 1);
  for (std::size_t i = shape_.size(); i-- > 1;) s[i - 1] = s[i] * shape_[i];
  return s;
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) throw InvalidArgument("index arity does not match tensor order");
  std::size_t flat = 0;
  std::size_t mode = 0;
  for (std::size_t i : index) {
    if (i >= shape_[mode]) throw InvalidArgument("index out of range");
    flat = flat * shape_[mode] + i;
    ++mode;
  }
  return flat;
}

Tensor unfold(const Tensor& t, std::size_t mode) {
  if (mode >= t.order())
    throw InvalidArgument("unfold mode " + std::to_string(mode) + " out of range for order " +
                          std::to_string(t.order()));
  const Shape& shape = t.shape();
  const std::size_t outer = product(shape, 0, mode);
  const std::size_t rows = shape[mode];
  const std::size_t inner = product(shape, mode + 1, shape.size());
  const std::size_t cols = outer * inner;

  Tensor m({rows, cols});
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t i = 0; i < inner; ++i) m[r * cols + o * inner + i] = t[(o * rows + r) * inner + i];
  return m;
}

Tensor fold(const Tensor& matrix, std::size_t mode, const Shape& shape) {
  check_shape(shape);
  if (mode >= shape.size()) throw InvalidArgument("fold mode out of range");
  const std::size_t outer = product(shape, 0, mode);
  const std::size_t rows = shape[mode];
  const std::size_t inner = product(shape, mode + 1, shape.size());
  const std::size_t cols = outer * inner;
  if (matrix.order() != 2 || matrix.extent(0) != rows || matrix.extent(1) != cols)
    throw InvalidArgument("fold: matrix shape does not match target unfolding");

  Tensor t(shape);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t i = 0; i < inner; ++i) t[(o * rows + r) * inner + i] = matrix[r * cols + o * inner + i];
  return t;
}

Tensor contract(const Tensor& x, const Tensor& y, std::size_t shared_modes) {
  if (shared_modes > x.order() || shared_modes > y.order())
    throw InvalidArgument("contract: shared mode count exceeds operand order");
  for (std::size_t m = 0; m < shared_modes; ++m)
    if (x.extent(m) != y.extent(m))
      throw InvalidArgument("contract: extent mismatch on shared mode " + std::to_string(m) + " (" +
                            std::to_string(x.extent(m)) + " vs " + std::to_string(y.extent(m)) + ")");

  Shape out_shape(x.shape().begin() + shared_modes, x.shape().end());
  out_shape.insert(out_shape.end(), y.shape().begin() + shared_modes, y.shape().end());
  if (out_shape.empty()) out_shape.push_back(1);
  if (out_shape.size() > Tensor::kMaxOrder) throw InvalidArgument("contract: result order exceeds 4");

  const std::size_t k = product(x.shape(), 0, shared_modes);
  const std::size_t a = x.size() / k;
  const std::size_t b = y.size() / k;
  Tensor out(out_shape);
  kernels::transpose_product(x.data(), y.data(), k, a, b, out.data());
  return out;
}

Tensor soft_threshold(const Tensor& t, double tau) {
  if (!(tau >= 0.0)) throw InvalidArgument("soft_threshold: tau must be non-negative");
  Tensor out(t.shape());
  kernels::soft_threshold(t.data(), tau, out.data());
  return out;
}

Norms norms(const Tensor& t) {
  return {kernels::sum_abs(t.data()), std::sqrt(kernels::sum_sq(t.data())), kernels::max_abs(t.data())};
}

}  // namespace bgx
