#include "sgsr/random.hpp"

#include <cmath>
#include <numbers>

namespace sgsr {

namespace {

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

double NormalGenerator::uniform() {
  return static_cast<double>(engine_() >> 11) * kTwoPow53Inv;
}

double NormalGenerator::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * kTwoPow53Inv;
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace sgsr
