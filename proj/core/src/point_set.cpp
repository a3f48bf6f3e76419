#include "bot/point_set.hpp"

#include <cmath>

namespace bot {

double distance(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sq += d * d;
  }
  return std::sqrt(sq);
}

}  // namespace bot
