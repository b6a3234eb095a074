#include "relocnet/tensor.hpp"

#include <cstring>
#include <sstream>

namespace relocnet {

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape_.size(); ++i)
    os << (i ? "," : "") << shape_[i];
  os << ")";
  return os.str();
}

std::uint64_t Tensor::fnv1a() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto* p = reinterpret_cast<const unsigned char*>(data_.data());
  std::size_t n = data_.size() * sizeof(double);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace relocnet
