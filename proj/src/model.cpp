#include "fierisk/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fierisk/error.hpp"
#include "fierisk/polynomial.hpp"

namespace fierisk {
namespace {

constexpr std::string_view kModule = "fiegarch";

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

double expected_abs(Innovation innovation) noexcept {
  switch (innovation) {
    case Innovation::Gaussian: return std::sqrt(2.0 / std::numbers::pi);
  }
  return std::sqrt(2.0 / std::numbers::pi);
}

std::optional<std::string> FiegarchSpec::validate(const FiegarchParams& p) {
  if (!std::isfinite(p.omega) || !std::isfinite(p.theta) || !std::isfinite(p.gamma) ||
      !std::isfinite(p.d) || !all_finite(p.alpha) || !all_finite(p.beta)) {
    return "parameters must be finite";
  }
  if (!(std::abs(p.d) < 0.5)) return "d must lie in (-0.5, 0.5)";
  if (!is_stable_ar(p.beta)) return "beta(z) has a root on or inside the unit circle";
  return std::nullopt;
}

FiegarchSpec::FiegarchSpec(FiegarchParams params) : params_(std::move(params)) {
  if (auto why = validate(params_)) {
    const auto kind = why->starts_with("beta") ? ErrorKind::NonInvertible : ErrorKind::Domain;
    throw Error(kind, kModule, *why);
  }
}

ZivotWangSpec::ZivotWangSpec(ZivotWangParams params) : params_(std::move(params)) {
  const auto& p = params_;
  if (!std::isfinite(p.omega) || !std::isfinite(p.a) || !std::isfinite(p.d) ||
      !all_finite(p.psi) || !all_finite(p.gamma_zw) || !all_finite(p.beta)) {
    throw Error(ErrorKind::Domain, kModule, "parameters must be finite");
  }
  if (p.psi.size() != p.gamma_zw.size()) {
    throw Error(ErrorKind::InvalidArgument, kModule, "psi and gamma must have equal length");
  }
  if (!(std::abs(p.d) < 0.5)) throw Error(ErrorKind::Domain, kModule, "d must lie in (-0.5, 0.5)");
  if (!is_stable_ar(p.beta)) {
    throw Error(ErrorKind::NonInvertible, kModule, "beta(z) has a root on or inside the unit circle");
  }
}

double g_transform(double z, double theta, double gamma, double e_abs_z) noexcept {
  return theta * z + gamma * (std::abs(z) - e_abs_z);
}

ZivotWangSpec to_zivot_wang(const FiegarchSpec& spec) {
  // alpha_0 = -1 convention: full coefficient list is (-1, alpha_1, ..., alpha_p)
  std::vector<double> alpha_full{-1.0};
  alpha_full.insert(alpha_full.end(), spec.alpha().begin(), spec.alpha().end());

  double alpha_at_one = 0.0;
  for (double a : alpha_full) alpha_at_one -= a;

  ZivotWangParams zw;
  zw.omega = spec.omega();
  zw.a = -spec.gamma() * alpha_at_one * spec.expected_abs_z();
  for (double a : alpha_full) {
    zw.psi.push_back(-spec.gamma() * a);
    zw.gamma_zw.push_back(-spec.theta() * a);
  }
  zw.beta.assign(spec.beta().begin(), spec.beta().end());
  zw.d = spec.d();
  zw.innovation = spec.params().innovation;
  return ZivotWangSpec(std::move(zw));
}

FiegarchSpec from_zivot_wang(const ZivotWangSpec& spec, double tolerance) {
  const auto& zw = spec.params();
  if (zw.psi.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "psi must contain psi_0");
  FiegarchParams p;
  p.omega = zw.omega;
  p.gamma = zw.psi[0];
  p.theta = zw.gamma_zw[0];
  p.beta = zw.beta;
  p.d = zw.d;
  p.innovation = zw.innovation;
  const double scale = std::max(std::abs(p.gamma), std::abs(p.theta));
  for (std::size_t i = 1; i < zw.psi.size(); ++i) {
    // psi_i = -gamma alpha_i and gamma_i = -theta alpha_i
    const double alpha_i = std::abs(p.gamma) >= std::abs(p.theta) ? -zw.psi[i] / p.gamma
                                                                  : -zw.gamma_zw[i] / p.theta;
    if (scale == 0.0 || std::abs(-p.gamma * alpha_i - zw.psi[i]) > tolerance ||
        std::abs(-p.theta * alpha_i - zw.gamma_zw[i]) > tolerance) {
      throw Error(ErrorKind::InvalidArgument, kModule,
                  "psi_i / gamma_i are not proportional to a common alpha_i");
    }
    p.alpha.push_back(alpha_i);
  }
  FiegarchSpec out(std::move(p));
  double alpha_at_one = 1.0;
  for (double a : out.alpha()) alpha_at_one -= a;
  if (std::abs(-out.gamma() * alpha_at_one * out.expected_abs_z() - zw.a) > tolerance) {
    throw Error(ErrorKind::InvalidArgument, kModule, "intercept a is inconsistent with gamma, alpha");
  }
  return out;
}

std::vector<NamedModel> reference_models() {
  auto make = [](std::vector<double> beta, std::vector<double> alpha, double theta, double gamma,
                 double d) {
    return FiegarchSpec(FiegarchParams{0.0, std::move(alpha), std::move(beta), theta, gamma, d,
                                       Innovation::Gaussian});
  };
  return {
      {"M1", make({0.45}, {}, -0.14, 0.38, 0.45)},
      {"M2", make({0.90}, {0.80}, 0.04, 0.38, 0.45)},
      {"M3", make({0.22, 0.18, 0.47, -0.45}, {}, -0.04, 0.40, 0.26)},
      {"M4", make({0.58}, {}, -0.11, 0.33, 0.42)},
      {"M5", make({0.71}, {}, -0.17, 0.28, 0.34)},
  };
}

std::optional<FiegarchSpec> reference_model(std::string_view name) {
  for (auto& m : reference_models()) {
    if (m.name == name) return m.spec;
  }
  return std::nullopt;
}

}  // namespace fierisk
