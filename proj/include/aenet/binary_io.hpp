#pragma once

// Little-endian primitive I/O shared by the dataset, function and
// checkpoint file formats.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

#include <Eigen/Dense>

#include "aenet/errors.hpp"

namespace aenet::io {

template <typename T>
  requires std::is_arithmetic_v<T>
void write_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t,
            std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  U bits;
  std::memcpy(&bits, &value, sizeof(T));
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
  requires std::is_arithmetic_v<T>
T read_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t,
            std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw IoError("unexpected end of binary stream");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<U>(bytes[i]) << (8 * i);
  }
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

template <typename T>
void write_array(std::ostream& out, std::span<const T> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (T v : values) write_le(out, v);
  }
}

template <typename T>
void read_array(std::istream& in, std::span<T> values) {
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size_bytes()));
    if (!in) throw IoError("unexpected end of binary stream");
  } else {
    for (T& v : values) v = read_le<T>(in);
  }
}

inline void write_string(std::ostream& out, std::string_view s) {
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
  auto size = read_le<std::uint32_t>(in);
  if (size > (1u << 24)) throw IoError("string field too long");
  std::string s(size, '\0');
  in.read(s.data(), size);
  if (!in) throw IoError("unexpected end of binary stream");
  return s;
}

inline void expect_magic(std::istream& in, std::string_view magic) {
  std::string got(magic.size(), '\0');
  in.read(got.data(), static_cast<std::streamsize>(got.size()));
  if (!in || got != magic) {
    throw IoError("bad file magic, expected '" + std::string(magic) + "'");
  }
}

/// u64 rows, u64 cols, then row-major doubles.
inline void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  write_array<double>(out, std::span<const double>(rm.data(), static_cast<std::size_t>(rm.size())));
}

inline Eigen::MatrixXd read_matrix(std::istream& in) {
  const auto rows = read_le<std::uint64_t>(in);
  const auto cols = read_le<std::uint64_t>(in);
  if (rows > (1ull << 32) || cols > (1ull << 32) || rows * cols > (1ull << 34)) {
    throw IoError("matrix header is implausible");
  }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(
      static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  read_array<double>(in, std::span<double>(rm.data(), static_cast<std::size_t>(rm.size())));
  return rm;
}

inline void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(v.size()));
  write_array<double>(out, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

inline Eigen::VectorXd read_vector(std::istream& in) {
  const auto n = read_le<std::uint64_t>(in);
  if (n > (1ull << 32)) throw IoError("vector header is implausible");
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  read_array<double>(in, std::span<double>(v.data(), static_cast<std::size_t>(n)));
  return v;
}

}  // namespace aenet::io
