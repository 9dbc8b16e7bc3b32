#include "fierisk/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fierisk/error.hpp"

namespace fierisk {
namespace {

constexpr std::string_view kModule = "optimize";
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Counted {
  const Objective& f;
  std::size_t count = 0;
  double operator()(std::span<const double> x) {
    ++count;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  }
};

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void record(OptimizeResult& r, double value) {
  const double best = r.trace.empty() ? value : std::min(r.trace.back(), value);
  r.trace.push_back(best);
}

// Nelder-Mead on an already counted objective; appends to `out`.
void run_nelder_mead(Counted& f, std::vector<double> x0, double f0, std::size_t max_iter,
                     double tol, OptimizeResult& out) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> values(n + 1, f0);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = std::abs(x0[i]) > 1e-3 ? 0.05 * std::abs(x0[i]) + 0.05 : 0.1;
    simplex[i + 1][i] += step;
    values[i + 1] = f(simplex[i + 1]);
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  auto point = [&](double coeff, const std::vector<double>& worst, std::vector<double>& dst) {
    for (std::size_t j = 0; j < n; ++j) dst[j] = centroid[j] + coeff * (worst[j] - centroid[j]);
  };

  for (std::size_t it = 0; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    ++out.iterations;
    record(out, values[best]);

    double spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        spread = std::max(spread, std::abs(simplex[i][j] - simplex[best][j]));
      }
    }
    if (std::isfinite(values[worst]) &&
        values[worst] - values[best] <= tol * (std::abs(values[best]) + tol) && spread < 1e-9) {
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
    }

    point(-1.0, simplex[worst], xr);
    const double fr = f(xr);
    if (fr < values[best]) {
      point(-2.0, simplex[worst], xe);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    point(outside ? -0.5 : 0.5, simplex[worst], xc);
    const double fc = f(xc);
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) {
        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      }
      values[i] = f(simplex[i]);
    }
  }

  const auto it = std::min_element(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(it - values.begin());
  if (*it <= out.value || out.x.empty()) {
    out.x = simplex[idx];
    out.value = *it;
  }
}

struct BfgsOutcome {
  bool converged = false;
  bool stalled = false;
};

// BFGS from out.x / out.value. Updates `out` in place.
BfgsOutcome run_bfgs(Counted& f, const Objective& raw, const OptimizeOptions& opt,
                     std::size_t budget, OptimizeResult& out) {
  const std::size_t n = out.x.size();
  std::vector<double> g(n), g_new(n), dir(n), x_new(n), s(n), y(n), hy(n);
  std::vector<double> h(n * n, 0.0);
  auto reset = [&] {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
  };
  reset();
  bool identity = true;
  int flat_steps = 0;

  std::size_t grad_evals = 0;
  if (!numerical_gradient(raw, out.x, out.value, opt.relative_step, g, &grad_evals)) {
    f.count += grad_evals;
    return {false, true};
  }
  f.count += grad_evals;
  out.gradient_norm = max_abs(g);

  for (std::size_t iter = 0; iter < budget; ++iter) {
    if (out.gradient_norm <= opt.gradient_tolerance) return {true, false};

    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v -= h[i * n + j] * g[j];
      dir[i] = v;
    }
    double slope = dot(g, dir);
    if (!(slope < 0.0)) {
      reset();
      identity = true;
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
      slope = dot(g, dir);
    }
    const double len = std::sqrt(dot(dir, dir));
    if (len > opt.max_step) {
      const double scale = opt.max_step / len;
      for (double& v : dir) v *= scale;
      slope *= scale;
    }

    double step = 1.0;
    double f_new = kInf;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = out.x[i] + step * dir[i];
      f_new = f(x_new);
      if (f_new < out.value && f_new <= out.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++out.iterations;
    if (!accepted) {
      record(out, out.value);
      if (!identity) {
        reset();
        identity = true;
        continue;
      }
      return {false, true};
    }

    grad_evals = 0;
    const bool grad_ok = numerical_gradient(raw, x_new, f_new, opt.relative_step, g_new, &grad_evals);
    f.count += grad_evals;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - out.x[i];
      y[i] = g_new[i] - g[i];
    }
    const bool flat = out.value - f_new <= 1e-15 * std::max(1.0, std::abs(out.value));
    flat_steps = flat ? flat_steps + 1 : 0;
    out.x = x_new;
    out.value = f_new;
    record(out, out.value);
    if (flat_steps >= 5) return {false, true};
    if (!grad_ok) return {false, true};
    g = g_new;
    out.gradient_norm = max_abs(g);

    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      if (identity) {
        const double scale = sy / dot(y, y);
        for (std::size_t i = 0; i < n; ++i) h[i * n + i] = scale;
        identity = false;
      }
      for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) v += h[i * n + j] * y[j];
        hy[i] = v;
      }
      const double yhy = dot(y, hy);
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h[i * n + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
        }
      }
    }
  }
  return {out.gradient_norm <= opt.gradient_tolerance, false};
}

}  // namespace

bool numerical_gradient(const Objective& f, std::span<const double> x, double fx,
                        double relative_step, std::vector<double>& grad,
                        std::size_t* evaluations) {
  const std::size_t n = x.size();
  grad.assign(n, 0.0);
  std::vector<double> probe(x.begin(), x.end());
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double step = relative_step * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + step;
    const double up = f(probe);
    probe[i] = x[i] - step;
    const double down = f(probe);
    probe[i] = x[i];
    count += 2;
    const bool up_ok = std::isfinite(up), down_ok = std::isfinite(down);
    if (up_ok && down_ok) {
      grad[i] = (up - down) / (2.0 * step);
    } else if (up_ok && std::isfinite(fx)) {
      grad[i] = (up - fx) / step;
    } else if (down_ok && std::isfinite(fx)) {
      grad[i] = (fx - down) / step;
    } else {
      if (evaluations) *evaluations += count;
      return false;
    }
  }
  if (evaluations) *evaluations += count;
  return true;
}

OptimizeResult nelder_mead(const Objective& f, std::vector<double> x0, const OptimizeOptions& options) {
  if (x0.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "empty starting point");
  Counted counted{f};
  OptimizeResult out;
  out.x = x0;
  out.value = counted(x0);
  if (!std::isfinite(out.value)) {
    throw Error(ErrorKind::Fit, kModule, "objective is not finite at the starting point");
  }
  run_nelder_mead(counted, std::move(x0), out.value, options.nelder_mead_iterations,
                  options.nelder_mead_tolerance, out);
  std::vector<double> g;
  std::size_t extra = 0;
  if (numerical_gradient(f, out.x, out.value, options.relative_step, g, &extra)) {
    out.gradient_norm = max_abs(g);
  } else {
    out.gradient_norm = kInf;
  }
  out.evaluations = counted.count + extra;
  out.converged = out.gradient_norm <= options.gradient_tolerance;
  out.used_fallback = true;
  return out;
}

OptimizeResult minimize(const Objective& f, std::vector<double> x0, const OptimizeOptions& options) {
  if (x0.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "empty starting point");
  Counted counted{f};
  OptimizeResult out;
  out.x = std::move(x0);
  out.value = counted(out.x);
  if (!std::isfinite(out.value)) {
    throw Error(ErrorKind::Fit, kModule, "objective is not finite at the starting point");
  }
  record(out, out.value);

  auto remaining = [&] {
    return options.max_iterations > out.iterations ? options.max_iterations - out.iterations : 0;
  };

  // BFGS, then one Nelder-Mead pass and a BFGS polish if the line search stalls.
  BfgsOutcome outcome = run_bfgs(counted, f, options, remaining(), out);
  if (outcome.stalled && !outcome.converged) {
    out.used_fallback = true;
    const std::size_t nm_budget = std::min(options.nelder_mead_iterations, 50 * out.x.size());
    run_nelder_mead(counted, out.x, out.value, nm_budget, options.nelder_mead_tolerance, out);
    outcome = run_bfgs(counted, f, options, std::max<std::size_t>(remaining(), 20), out);
  }

  if (!std::isfinite(out.gradient_norm)) out.gradient_norm = kInf;
  out.converged = out.gradient_norm <= options.gradient_tolerance;
  out.evaluations = counted.count;
  return out;
}

}  // namespace fierisk
