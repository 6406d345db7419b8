#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "netgame/common/error.hpp"

namespace netgame::io {

// Little helpers for the checkpoint format: raw native-endian PODs, length
// prefixed strings and Eigen blocks. Round trips are bit exact.

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  static_assert(std::is_trivially_copyable_v<T>);
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ArgumentError("checkpoint truncated");
  return value;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_pod<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
  const auto n = read_pod<std::uint64_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw ArgumentError("checkpoint truncated");
  return s;
}

template <typename Derived>
void write_dense(std::ostream& out, const Eigen::DenseBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  write_pod<std::int64_t>(out, m.rows());
  write_pod<std::int64_t>(out, m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) write_pod<Scalar>(out, m(i, j));
}

template <typename MatrixType>
MatrixType read_dense(std::istream& in) {
  using Scalar = typename MatrixType::Scalar;
  const auto rows = read_pod<std::int64_t>(in);
  const auto cols = read_pod<std::int64_t>(in);
  MatrixType m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = read_pod<Scalar>(in);
  return m;
}

}  // namespace netgame::io
