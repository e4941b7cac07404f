#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace kfbem {

/// 64-bit FNV-1a, incremental.
class Fnv1a {
 public:
  void update(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  template <class T>
  void update_value(const T& v) {
    update(&v, sizeof(T));
  }
  template <class T>
  void update_vector(const std::vector<T>& v) {
    update_value(v.size());
    if (!v.empty()) update(v.data(), v.size() * sizeof(T));
  }
  void update_string(std::string_view s) {
    update_value(s.size());
    update(s.data(), s.size());
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(const void* data, std::size_t size) {
  Fnv1a h;
  h.update(data, size);
  return h.digest();
}

}  // namespace kfbem
