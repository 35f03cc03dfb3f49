#include "robustreg/kernels.hpp"

namespace robustreg {

Kernel Kernel::custom(double lower, double upper, std::function<double(double)> shape) {
  if (!(lower > 0.0 && upper >= lower)) throw std::invalid_argument("kernel bounds need 0 < c_K <= C_K");
  if (!shape) throw std::invalid_argument("custom kernel needs a shape function");
  return Kernel(Kind::custom, lower, upper, std::move(shape));
}

Kernel Kernel::parse(const std::string& name) {
  if (name == "triangular_shifted" || name == "triangular") return triangular_shifted();
  if (name == "uniform") return uniform();
  throw std::invalid_argument("unknown kernel '" + name + "'");
}

std::string Kernel::name() const {
  switch (kind_) {
    case Kind::triangular_shifted:
      return "triangular_shifted";
    case Kind::uniform:
      return "uniform";
    case Kind::custom:
      return "custom";
  }
  return "custom";
}

}  // namespace robustreg
