#pragma once

// Parameter types for FIEGARCH(p, d, q) volatility models in the two
// equivalent parameterizations:
//
//   ln sigma_t^2 = omega + alpha(L) / (beta(L) (1 - L)^d) g(Z_{t-1})
//   g(z)         = theta z + gamma (|z| - E|Z|)
//
// with alpha(L) = 1 - alpha_1 L - ... - alpha_p L^p and
//      beta(L)  = 1 - beta_1 L - ... - beta_q L^q  (leading -1 coefficients implicit),
// and the intercept/shock form
//
//   beta(L) (1 - L)^d ln sigma_t^2 = a + sum_{i=0..p} (psi_i |Z_{t-1-i}| + gamma_i Z_{t-1-i}).

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fierisk {

enum class Innovation { Gaussian };

/// E|Z| for the innovation law.
double expected_abs(Innovation innovation) noexcept;

struct FiegarchParams {
  double omega = 0.0;
  std::vector<double> alpha;  // alpha_1..alpha_p
  std::vector<double> beta;   // beta_1..beta_q
  double theta = 0.0;
  double gamma = 0.0;
  double d = 0.0;
  Innovation innovation = Innovation::Gaussian;
};

/// Validated FIEGARCH parameter set: finite values, |d| < 0.5 and beta(z) != 0 on |z| <= 1.
class FiegarchSpec {
 public:
  explicit FiegarchSpec(FiegarchParams params);

  /// Reason the parameters are invalid, or nullopt when they are valid.
  static std::optional<std::string> validate(const FiegarchParams& params);

  const FiegarchParams& params() const noexcept { return params_; }
  double omega() const noexcept { return params_.omega; }
  std::span<const double> alpha() const noexcept { return params_.alpha; }
  std::span<const double> beta() const noexcept { return params_.beta; }
  double theta() const noexcept { return params_.theta; }
  double gamma() const noexcept { return params_.gamma; }
  double d() const noexcept { return params_.d; }
  std::size_t p() const noexcept { return params_.alpha.size(); }
  std::size_t q() const noexcept { return params_.beta.size(); }
  double expected_abs_z() const noexcept { return expected_abs(params_.innovation); }

 private:
  FiegarchParams params_;
};

struct ZivotWangParams {
  /// Level of ln sigma^2 carried alongside the intercept. (1 - L)^d annihilates a
  /// constant only in the untruncated d > 0 limit, so it is kept explicit to make
  /// truncated filters of both forms agree for any omega.
  double omega = 0.0;
  double a = 0.0;
  std::vector<double> psi;       // psi_0..psi_p
  std::vector<double> gamma_zw;  // gamma_0..gamma_p
  std::vector<double> beta;
  double d = 0.0;
  Innovation innovation = Innovation::Gaussian;
};

class ZivotWangSpec {
 public:
  explicit ZivotWangSpec(ZivotWangParams params);

  const ZivotWangParams& params() const noexcept { return params_; }
  double expected_abs_z() const noexcept { return expected_abs(params_.innovation); }

 private:
  ZivotWangParams params_;
};

double g_transform(double z, double theta, double gamma, double e_abs_z) noexcept;

ZivotWangSpec to_zivot_wang(const FiegarchSpec& spec);

/// Inverse of to_zivot_wang; requires psi_i / gamma_i proportional to the same
/// alpha_i with psi_0 = gamma and gamma_0 = theta. Throws Error(InvalidArgument) otherwise.
FiegarchSpec from_zivot_wang(const ZivotWangSpec& spec, double tolerance = 1e-10);

/// The five generating models of the simulation study (M1..M5).
struct NamedModel {
  std::string name;
  FiegarchSpec spec;
};
std::vector<NamedModel> reference_models();
std::optional<FiegarchSpec> reference_model(std::string_view name);

}  // namespace fierisk
