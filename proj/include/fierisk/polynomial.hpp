#pragma once

#include <span>
#include <vector>

namespace fierisk {

/// Tolerance on the unit circle for stationarity / invertibility checks:
/// a lag polynomial is accepted when every root has modulus > 1 + kUnitRootTolerance.
inline constexpr double kUnitRootTolerance = 1e-8;

/// Smallest root modulus of c[0] + c[1] z + ... + c[n] z^n (companion-matrix
/// eigenvalues). Returns +inf for a nonzero constant polynomial.
double min_root_modulus(std::span<const double> coeffs);

/// True when 1 - phi_1 z - ... - phi_k z^k has all roots strictly outside the unit circle.
bool is_stable_ar(std::span<const double> phi);

/// True when 1 + theta_1 z + ... + theta_k z^k has all roots strictly outside the unit circle.
bool is_stable_ma(std::span<const double> theta);

/// Partial autocorrelations -> AR coefficients phi (Durbin-Levinson / Monahan).
/// Every |pacf_k| < 1 yields a stable 1 - sum phi_j z^j.
std::vector<double> pacf_to_ar(std::span<const double> pacf);

/// Inverse of pacf_to_ar. Returns an empty vector if phi is not stable.
std::vector<double> ar_to_pacf(std::span<const double> phi);

}  // namespace fierisk
