#pragma once

#include <vector>

namespace nvmpr {

inline constexpr double kBesselMaxArgument = 50.0;

// Bessel function of the first kind of integer order, |z| < 50.
// Miller backward recurrence normalized by J_0 + 2 sum J_2k = 1.
// Throws UnsupportedRange outside the supported argument range.
double bessel_j(int n, double z);

// J_0 .. J_{n_max} at one argument from a single recurrence pass.
std::vector<double> bessel_j_table(int n_max, double z);

}  // namespace nvmpr
