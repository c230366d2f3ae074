#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sanne {

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string shape_str(const std::vector<int>& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ',';
    os << s[i];
  }
  os << ']';
  return os.str();
}

// Dense row-major tensor, rank 0..3. float for training, double for the
// gradient-checking build of the same code paths.
template <typename T>
struct TensorT {
  std::vector<int> shape;
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(std::vector<int> s, T fill = T(0))
      : shape(std::move(s)), data(checked_count(shape), fill) {}

  static std::int64_t checked_count(const std::vector<int>& s) {
    std::int64_t n = 1;
    for (int d : s) {
      if (d < 0) throw ShapeError("negative dimension in shape " + shape_str(s));
      n *= d;
    }
    return n;
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int last_dim() const { return shape.empty() ? 1 : shape.back(); }

  // Number of length-last_dim rows when the tensor is viewed as 2-D.
  std::int64_t row_count() const {
    return last_dim() == 0 ? 0 : numel() / last_dim();
  }

  T* row(std::int64_t r) { return data.data() + r * last_dim(); }
  const T* row(std::int64_t r) const { return data.data() + r * last_dim(); }

  T& at2(std::int64_t r, std::int64_t c) { return data[r * shape[1] + c]; }
  const T& at2(std::int64_t r, std::int64_t c) const { return data[r * shape[1] + c]; }

  bool all_finite() const {
    for (const T& v : data) {
      if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
  }

  template <typename U>
  TensorT<U> cast() const {
    TensorT<U> out;
    out.shape = shape;
    out.data.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }

  bool same_shape(const TensorT& o) const { return shape == o.shape; }
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

}  // namespace sanne
