#include "srn/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "srn/errors.hpp"

namespace srn {

Polynomial Polynomial::mass_action(double rate, const std::vector<std::pair<int, int>>& reactants) {
  // Expand each falling factorial x(x-1)...(x-k+1) into powers of x, then take the product.
  std::vector<Monomial> terms{{rate, {}}};
  for (auto [species, k] : reactants) {
    std::vector<double> coeffs{1.0};  // coefficients in powers of x
    for (int r = 0; r < k; ++r) {
      std::vector<double> next(coeffs.size() + 1, 0.0);
      for (std::size_t p = 0; p < coeffs.size(); ++p) {
        next[p + 1] += coeffs[p];
        next[p] -= r * coeffs[p];
      }
      coeffs = std::move(next);
    }
    std::vector<Monomial> expanded;
    for (const auto& t : terms) {
      for (std::size_t p = 0; p < coeffs.size(); ++p) {
        if (coeffs[p] == 0.0) continue;
        Monomial m = t;
        m.coef *= coeffs[p];
        if (p > 0) m.factors.emplace_back(species, static_cast<int>(p));
        expanded.push_back(std::move(m));
      }
    }
    terms = std::move(expanded);
  }
  return Polynomial(std::move(terms));
}

ReactionNetwork::ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
  const std::size_t d = species_.size();
  nu_.reserve(reactions_.size() * d);
  for (const auto& r : reactions_) {
    if (r.nu.size() != d) throw ModelError("reaction '" + r.label + "': stoichiometry has wrong length");
    if (std::all_of(r.nu.begin(), r.nu.end(), [](int v) { return v == 0; }))
      throw ModelError("reaction '" + r.label + "': stoichiometric vector is zero");
    for (const auto& m : r.propensity.terms())
      for (auto [i, p] : m.factors)
        if (i < 0 || static_cast<std::size_t>(i) >= d || p < 0)
          throw ModelError("reaction '" + r.label + "': propensity refers to an unknown species");
    nu_.insert(nu_.end(), r.nu.begin(), r.nu.end());
  }
}

double ReactionNetwork::propensity(std::size_t j, std::span<const std::int64_t> x) const {
  const auto v = nu(j);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (x[i] + v[i] < 0) return 0.0;
  const double a = reactions_[j].propensity(x);
  if (a < 0.0) throw ModelError("reaction '" + reactions_[j].label + "': negative propensity");
  return a;
}

double ReactionNetwork::propensities(std::span<const std::int64_t> x, std::span<double> out) const {
  double a0 = 0.0;
  for (std::size_t j = 0; j < reactions_.size(); ++j) {
    out[j] = propensity(j, x);
    a0 += out[j];
  }
  return a0;
}

void ReactionNetwork::propensities_real(std::span<const double> x, std::span<double> out) const {
  for (std::size_t j = 0; j < reactions_.size(); ++j) out[j] = std::max(0.0, reactions_[j].propensity(x));
}

void ReactionNetwork::gradient(std::size_t j, std::span<const std::int64_t> x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  reactions_[j].propensity.add_gradient(x, out);
}

int ReactionNetwork::species_index(const std::string& name) const {
  auto it = std::find(species_.begin(), species_.end(), name);
  return it == species_.end() ? -1 : static_cast<int>(it - species_.begin());
}

State apply_reaction(const ReactionNetwork& net, State x, std::size_t j, std::int64_t k) {
  net.apply(x, j, k);
  return x;
}

std::vector<MeanFieldPoint> mean_field(const ReactionNetwork& net, std::vector<double> x0, double T,
                                       double step, double cap) {
  const std::size_t d = net.species(), J = net.reactions();
  std::vector<MeanFieldPoint> out;
  std::vector<double> a(J);
  double t = 0.0;
  out.push_back({t, x0});
  auto x = std::move(x0);
  while (t < T) {
    const double h = std::min(step, T - t);
    net.propensities_real(x, a);
    for (std::size_t j = 0; j < J; ++j) {
      const auto v = net.nu(j);
      for (std::size_t i = 0; i < d; ++i) x[i] += h * a[j] * v[i];
    }
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = std::max(0.0, x[i]);
      if (!(x[i] <= cap))
        throw ModelError("mean-field solution of species '" + net.species_names()[i] + "' exceeds " +
                         std::to_string(cap) + " at t=" + std::to_string(t + h));
    }
    t = (T - t <= step) ? T : t + h;
    out.push_back({t, x});
  }
  return out;
}

std::vector<double> drift_jacobian(const ReactionNetwork& net, std::span<const double> x) {
  const std::size_t d = net.species(), J = net.reactions();
  std::vector<double> jac(d * d, 0.0), grad(d);
  for (std::size_t j = 0; j < J; ++j) {
    std::fill(grad.begin(), grad.end(), 0.0);
    net.reaction_list()[j].propensity.add_gradient(x, std::span<double>(grad));
    const auto v = net.nu(j);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) jac[r * d + c] += v[r] * grad[c];
  }
  return jac;
}

}  // namespace srn
