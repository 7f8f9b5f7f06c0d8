#pragma once

#include <array>
#include <bit>
#include <complex>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "fiberscope/errors.hpp"

namespace fiberscope::binary {

// Fixed little-endian encoding, independent of the host byte order.

inline void put_u64(std::ostream& out, std::uint64_t value) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((value >> (8 * i)) & 0xffU);
  out.write(bytes.data(), bytes.size());
}

inline void put_f64(std::ostream& out, double value) { put_u64(out, std::bit_cast<std::uint64_t>(value)); }

inline void put_complex(std::ostream& out, std::complex<double> value) {
  put_f64(out, value.real());
  put_f64(out, value.imag());
}

/// Writes the 4-character magic padded with zero bytes to one 64-bit slot.
inline void put_magic(std::ostream& out, const char (&magic)[5]) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 4; ++i) bytes[static_cast<std::size_t>(i)] = magic[i];
  out.write(bytes.data(), bytes.size());
}

inline std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw IoError("unexpected end of file");
  std::uint64_t value = 0;
  for (int i = 7; i >= 0; --i) value = (value << 8) | bytes[static_cast<std::size_t>(i)];
  return value;
}

inline double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

inline std::complex<double> get_complex(std::istream& in) {
  const double re = get_f64(in);
  const double im = get_f64(in);
  return {re, im};
}

inline void expect_magic(std::istream& in, const char (&magic)[5], const std::string& what) {
  std::array<char, 8> bytes{};
  in.read(bytes.data(), bytes.size());
  if (!in) throw IoError(what + ": truncated header");
  for (int i = 0; i < 4; ++i)
    if (bytes[static_cast<std::size_t>(i)] != magic[i]) throw IoError(what + ": bad magic");
  for (int i = 4; i < 8; ++i)
    if (bytes[static_cast<std::size_t>(i)] != 0) throw IoError(what + ": bad magic padding");
}

}  // namespace fiberscope::binary
