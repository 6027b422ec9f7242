#pragma once

#include <functional>
#include <string>

#include "mmsb/errors.hpp"

namespace testutil {

// Runs fn and reports whether it threw an mmsb::Error carrying `code`.
inline bool throws_code(mmsb::ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const mmsb::Error& e) {
    return e.code() == code;
  } catch (...) {
    return false;
  }
  return false;
}

inline bool has_warning(const mmsb::Warnings& ws, mmsb::WarningCode code) {
  for (const auto& w : ws)
    if (w.code == code) return true;
  return false;
}

}  // namespace testutil
