#include "srn/duals.hpp"

#include <cmath>
#include <numbers>

#include "srn/errors.hpp"

namespace srn {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

struct Sweep {
  const ReactionNetwork& net;
  const PathRecord& path;
  std::size_t d, J;
  std::vector<double> phi, a_n, a_next, f, grads, G;

  Sweep(const ReactionNetwork& n, const PathRecord& p, std::span<const double> grad_g)
      : net(n), path(p), d(n.species()), J(n.reactions()), phi(grad_g.begin(), grad_g.end()), a_n(J),
        a_next(J), f(J), grads(J * d), G(J * J) {}

  double dt(std::size_t n) const { return path.times[n + 1] - path.times[n]; }

  void load_gradients(std::size_t n) {
    const auto x = path.state(n);
    for (std::size_t j = 0; j < J; ++j) net.gradient(j, x, std::span<double>(grads.data() + j * d, d));
  }

  void load_f() {
    for (std::size_t j = 0; j < J; ++j) {
      const auto v = net.nu(j);
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += phi[i] * v[i];
      f[j] = s;
    }
  }

  // phi <- phi + dt sum_j grad a_j (nu_j . phi); expects f and grads current.
  void propagate(double h) {
    for (std::size_t j = 0; j < J; ++j) {
      if (f[j] == 0.0) continue;
      for (std::size_t i = 0; i < d; ++i) phi[i] += h * grads[j * d + i] * f[j];
    }
  }
};

template <class OnStep>
void backward(Sweep& s, OnStep&& on_tau_leap) {
  for (std::size_t n = s.path.steps(); n-- > 0;) {
    const double h = s.dt(n);
    s.load_gradients(n);
    s.load_f();
    if (s.path.kinds[n] == StepKind::TauLeap) on_tau_leap(n, h);
    s.propagate(h);
  }
}

}  // namespace

std::vector<std::vector<double>> dual_weights(const ReactionNetwork& net, const PathRecord& path,
                                              std::span<const double> grad_g) {
  Sweep s(net, path, grad_g);
  std::vector<std::vector<double>> out(path.steps() + 1);
  out.back() = s.phi;
  for (std::size_t n = path.steps(); n-- > 0;) {
    s.load_gradients(n);
    s.load_f();
    s.propagate(s.dt(n));
    out[n] = s.phi;
  }
  return out;
}

DualAccumulators dual_terms(const ReactionNetwork& net, const PathRecord& path, std::span<const double> grad_g,
                            double threshold) {
  Sweep s(net, path, grad_g);
  DualAccumulators acc;
  const std::size_t J = s.J, d = s.d;
  backward(s, [&](std::size_t n, double h) {
    net.propensities(path.state(n), s.a_n);
    net.propensities(path.state(n + 1), s.a_next);
    const double half = 0.5 * h;

    double weak = 0.0;
    for (std::size_t j = 0; j < J; ++j) weak += s.f[j] * (s.a_next[j] - s.a_n[j]);
    acc.weak_error += half * weak;

    // G[j][i] = grad a_j(x_n) . nu_i
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t i = 0; i < J; ++i) {
        const auto v = net.nu(i);
        double g = 0.0;
        for (std::size_t k = 0; k < d; ++k) g += s.grads[j * d + k] * v[k];
        s.G[j * J + i] = g;
      }

    double se = 0.0, aux1 = 0.0, aux2 = 0.0, aux3 = 0.0;
    for (std::size_t i = 0; i < J; ++i) {
      double w = 0.0;
      for (std::size_t j = 0; j < J; ++j) w += s.f[j] * s.G[j * J + i];
      aux1 += s.a_n[i] * w * w;
    }
    aux1 *= h * h * h / 8.0;
    for (std::size_t j = 0; j < J; ++j) {
      double mu = 0.0, mu_abs = 0.0, var = 0.0;
      for (std::size_t i = 0; i < J; ++i) {
        const double g = s.G[j * J + i];
        mu += g * s.a_n[i];
        mu_abs += std::fabs(g) * s.a_n[i];
        var += g * g * s.a_n[i];
      }
      mu *= half;
      mu_abs *= half;
      var *= half;
      se += s.f[j] * mu;
      const double f2 = s.f[j] * s.f[j];
      if (f2 == 0.0) continue;
      if (half * s.a_n[j] > threshold) {
        if (var > 0.0) {
          const double sigma = std::sqrt(var);
          const double q = mu / sigma;
          const double p = normal_cdf(-q);
          aux2 += f2 * (mu * (1.0 - 2.0 * p) + std::sqrt(2.0 / std::numbers::pi) * sigma * std::exp(-0.5 * q * q));
        }
      } else {
        aux3 += f2 * std::min(mu_abs, std::sqrt(mu * mu + var));
      }
    }
    acc.s_e += half * se;
    acc.s_v += aux1 + half * (aux2 + aux3);
  });
  return acc;
}

double weak_error_path(const ReactionNetwork& net, const PathRecord& path, std::span<const double> grad_g) {
  return dual_terms(net, path, grad_g).weak_error;
}

std::pair<double, double> strong_error_terms(const ReactionNetwork& net, const PathRecord& path,
                                             std::span<const double> grad_g, double threshold) {
  const auto acc = dual_terms(net, path, grad_g, threshold);
  return {acc.s_e, acc.s_v};
}

double vhat_estimator(std::span<const double> s_e, std::span<const double> s_v) {
  const std::size_t M = s_e.size();
  if (M < 2 || s_v.size() != M) throw InsufficientSamples("variance estimator needs at least two in-lattice paths");
  double mean_e = 0.0, mean_v = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    mean_e += s_e[m];
    mean_v += s_v[m];
  }
  mean_e /= static_cast<double>(M);
  mean_v /= static_cast<double>(M);
  double ss = 0.0;
  for (double e : s_e) ss += (e - mean_e) * (e - mean_e);
  return ss / static_cast<double>(M - 1) + mean_v;
}

}  // namespace srn
