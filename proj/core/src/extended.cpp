#include "torus/extended.hpp"

namespace torus {
namespace {

std::recursive_mutex& precision_mutex() {
  static std::recursive_mutex m;
  return m;
}

}  // namespace

ExtendedPrecision::ExtendedPrecision(unsigned digits10)
    : lock_(precision_mutex()),
      digits_(digits10),
      previous_(Extended::default_precision()) {
  Extended::default_precision(digits10);
}

ExtendedPrecision::~ExtendedPrecision() { Extended::default_precision(previous_); }

}  // namespace torus
