#pragma once

#include <istream>
#include <ostream>

#include "bochner/error.hpp"

namespace bochner::detail {

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(ErrorCode::io, "unexpected end of binary stream");
  return value;
}

}  // namespace bochner::detail
