#pragma once

#include <optional>
#include <string>

#include "fracop/errors.hpp"

namespace support {

template <typename F>
std::optional<fracop::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const fracop::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline std::string kind_name(const std::optional<fracop::ErrorKind>& k) {
  return k ? std::string(fracop::to_string(*k)) : std::string("no error");
}

}  // namespace support

#define CHECK_THROWS_KIND(expr, kind) \
  CHECK(support::kind_name(support::error_kind([&] { (void)(expr); })) == fracop::to_string(kind))
