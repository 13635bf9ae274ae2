#pragma once

// Individual evaluation routes behind casimir::special::bessel_j, exposed so
// the overlap bands between them can be tested directly.

namespace casimir::special::detail {

double bessel_j_series(int nu, double x);
double bessel_j_miller(int nu, double x);
double bessel_j_asymptotic(int nu, double x, int* terms_used);

}  // namespace casimir::special::detail
