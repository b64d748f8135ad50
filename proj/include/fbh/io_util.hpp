#ifndef FBH_IO_UTIL_HPP
#define FBH_IO_UTIL_HPP

#include <cstdint>
#include <cstring>
#include <string>

#include "fbh/types.hpp"

namespace fbh::io {

// Little-endian fixed-width encoding helpers for the binary field format.
inline void put_u32(std::string& buf, uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  buf.append(b, 4);
}
inline void put_f64(std::string& buf, double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  buf.append(b, 8);
}
inline uint32_t get_u32(const std::string& s, size_t& off) {
  if (off + 4 > s.size()) throw ConfigInvalid("truncated binary field file");
  uint32_t v;
  std::memcpy(&v, s.data() + off, 4);
  off += 4;
  return v;
}
inline double get_f64(const std::string& s, size_t& off) {
  if (off + 8 > s.size()) throw ConfigInvalid("truncated binary field file");
  double v;
  std::memcpy(&v, s.data() + off, 8);
  off += 8;
  return v;
}

/// Write to a temp file in the same directory, then rename over the target.
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace fbh::io

#endif
