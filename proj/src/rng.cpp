#include "parsley/rng.hpp"

#include <cmath>

namespace parsley {

double RngStream::normal(double mean, double stddev) {
  // u1 must be strictly positive for the log.
  double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = next_double();
  double z = std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * 3.14159265358979323846 * u2);
  return mean + stddev * z;
}

}  // namespace parsley
