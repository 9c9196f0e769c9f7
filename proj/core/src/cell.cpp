#include "torus/cell.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace torus {

Cell::Cell(std::span<const double> periods) {
  if (periods.empty() || periods.size() > 2) {
    throw std::invalid_argument("cell dimension must be 1 or 2");
  }
  for (double p : periods) {
    if (!std::isfinite(p) || p <= 0.0) {
      throw std::invalid_argument("cell periods must be positive and finite");
    }
  }
  dim_ = static_cast<int>(periods.size());
  std::copy(periods.begin(), periods.end(), periods_.begin());
  if (dim_ == 1) periods_[1] = 1.0;
}

Cell::Cell(std::initializer_list<double> periods)
    : Cell(std::span<const double>(periods.begin(), periods.size())) {}

Cell Cell::unit(int dim) {
  if (dim == 1) return Cell{1.0};
  if (dim == 2) return Cell{1.0, 1.0};
  throw std::invalid_argument("cell dimension must be 1 or 2");
}

Cell Cell::triangular() { return Cell{std::sqrt(3.0), 1.0}; }

std::vector<double> Cell::periods() const {
  return {periods_.begin(), periods_.begin() + dim_};
}

double Cell::volume() const noexcept {
  return dim_ == 1 ? periods_[0] : periods_[0] * periods_[1];
}

double Cell::min_period() const noexcept {
  return dim_ == 1 ? periods_[0] : std::min(periods_[0], periods_[1]);
}

}  // namespace torus
