#pragma once

#include <doctest.h>

#include <functional>

#include "qpack/error.hpp"

namespace qpack::test {

inline ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace qpack::test
