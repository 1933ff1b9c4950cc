#include "nvmpr/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "nvmpr/errors.hpp"

namespace nvmpr {

namespace {

constexpr double kRescaleAbove = 1e200;

// Values for z > 0.
std::vector<double> miller(int n_max, double z) {
  const int reach = std::max(n_max, static_cast<int>(std::ceil(z)));
  int start = reach + 30 + static_cast<int>(std::sqrt(40.0 * reach));
  if (start % 2) ++start;

  std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
  j[static_cast<std::size_t>(start) + 1] = 0.0;
  j[static_cast<std::size_t>(start)] = 1e-300;
  for (int k = start; k >= 1; --k) {
    const auto ku = static_cast<std::size_t>(k);
    j[ku - 1] = (2.0 * k / z) * j[ku] - j[ku + 1];
    if (std::abs(j[ku - 1]) > kRescaleAbove) {
      for (std::size_t m = ku - 1; m < j.size(); ++m) j[m] /= kRescaleAbove;
    }
  }
  double norm = j[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * j[static_cast<std::size_t>(k)];

  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  for (int k = 0; k <= n_max; ++k) out[static_cast<std::size_t>(k)] = j[static_cast<std::size_t>(k)] / norm;
  return out;
}

void check_argument(double z) {
  if (!std::isfinite(z) || std::abs(z) >= kBesselMaxArgument) {
    throw UnsupportedRange("bessel_j: |z| must be below 50, got " + std::to_string(z));
  }
}

}  // namespace

std::vector<double> bessel_j_table(int n_max, double z) {
  check_argument(z);
  if (n_max < 0) throw InvalidParameter("bessel_j_table: n_max must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (z == 0.0) {
    out[0] = 1.0;
    return out;
  }
  out = miller(n_max, std::abs(z));
  if (z < 0.0) {
    for (int k = 1; k <= n_max; k += 2) out[static_cast<std::size_t>(k)] = -out[static_cast<std::size_t>(k)];
  }
  return out;
}

double bessel_j(int n, double z) {
  const int m = std::abs(n);
  const double v = bessel_j_table(m, z)[static_cast<std::size_t>(m)];
  return (n < 0 && (m % 2)) ? -v : v;
}

}  // namespace nvmpr
