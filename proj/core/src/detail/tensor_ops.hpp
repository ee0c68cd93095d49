#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cex::detail {

/// Transposes a dense tensor stored with the first axis slowest: axis k of
/// the result is axis order[k] of the input.
inline Eigen::VectorXcd permute_axes(const Eigen::VectorXcd& in, const std::vector<std::size_t>& dims,
                                     const std::vector<std::size_t>& order) {
  const std::size_t n = dims.size();
  bool identity = true;
  for (std::size_t k = 0; k < n; ++k) identity = identity && order[k] == k;
  if (identity || n < 2) return in;

  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = n - 1; i-- > 0;) stride[i] = stride[i + 1] * dims[i + 1];

  std::vector<std::size_t> new_dims(n), src_stride(n);
  for (std::size_t k = 0; k < n; ++k) {
    new_dims[k] = dims[order[k]];
    src_stride[k] = stride[order[k]];
  }

  Eigen::VectorXcd out(in.size());
  const std::size_t total = static_cast<std::size_t>(in.size());
  const std::size_t inner = new_dims[n - 1];
  const std::size_t inner_stride = src_stride[n - 1];
  std::vector<std::size_t> idx(n, 0);
  std::size_t src = 0;
  const auto* from = in.data();
  auto* to = out.data();
  for (std::size_t dst = 0; dst < total; dst += inner) {
    for (std::size_t j = 0; j < inner; ++j) to[dst + j] = from[src + j * inner_stride];
    for (std::size_t k = n - 1; k-- > 0;) {
      ++idx[k];
      src += src_stride[k];
      if (idx[k] < new_dims[k]) break;
      src -= src_stride[k] * new_dims[k];
      idx[k] = 0;
    }
  }
  return out;
}

}  // namespace cex::detail
