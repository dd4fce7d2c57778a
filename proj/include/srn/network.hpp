#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace srn {

using State = std::vector<std::int64_t>;

struct Monomial {
  double coef = 0.0;
  std::vector<std::pair<int, int>> factors;  // (species, power)
};

// Sum of monomials over the species counts.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Monomial> terms) : terms_(std::move(terms)) {}

  // c * prod_i x_i (x_i - 1) ... (x_i - k_i + 1) for reactant multiplicities k.
  static Polynomial mass_action(double rate, const std::vector<std::pair<int, int>>& reactants);

  template <class T>
  double operator()(std::span<const T> x) const {
    double sum = 0.0;
    for (const auto& m : terms_) {
      double v = m.coef;
      for (auto [i, p] : m.factors) {
        const double xi = static_cast<double>(x[i]);
        for (int k = 0; k < p; ++k) v *= xi;
      }
      sum += v;
    }
    return sum;
  }

  // Adds d/dx_i of the polynomial at x into grad.
  template <class T>
  void add_gradient(std::span<const T> x, std::span<double> grad) const {
    for (const auto& m : terms_) {
      for (std::size_t f = 0; f < m.factors.size(); ++f) {
        const auto [i, p] = m.factors[f];
        double v = m.coef * p;
        for (std::size_t g = 0; g < m.factors.size(); ++g) {
          const auto [k, q] = m.factors[g];
          const double xk = static_cast<double>(x[k]);
          const int power = g == f ? q - 1 : q;
          for (int r = 0; r < power; ++r) v *= xk;
        }
        grad[i] += v;
      }
    }
  }

  const std::vector<Monomial>& terms() const { return terms_; }

 private:
  std::vector<Monomial> terms_;
};

struct Reaction {
  std::string label;
  std::vector<int> nu;
  Polynomial propensity;
  // Source form, kept for round-tripping model files.
  bool mass_action = true;
  std::vector<std::pair<int, int>> reactants;
  std::vector<std::pair<int, int>> products;
  std::string rate_text;
};

// Immutable after construction; shared read-only by path workers.
class ReactionNetwork {
 public:
  ReactionNetwork() = default;
  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions);

  std::size_t species() const { return species_.size(); }
  std::size_t reactions() const { return reactions_.size(); }
  const std::vector<std::string>& species_names() const { return species_; }
  const std::vector<Reaction>& reaction_list() const { return reactions_; }
  std::span<const int> nu(std::size_t j) const { return {nu_.data() + j * species(), species()}; }

  // a_j(x), zero whenever x + nu_j leaves the lattice. Throws ModelError on a negative value.
  double propensity(std::size_t j, std::span<const std::int64_t> x) const;
  // Writes a(x) into out and returns a_0(x).
  double propensities(std::span<const std::int64_t> x, std::span<double> out) const;
  // Real-valued evaluation for the mean-field ODE, negative values floored at zero.
  void propensities_real(std::span<const double> x, std::span<double> out) const;

  // Row j of the J x d propensity Jacobian at x.
  void gradient(std::size_t j, std::span<const std::int64_t> x, std::span<double> out) const;

  void apply(std::span<std::int64_t> x, std::size_t j, std::int64_t k) const {
    const auto v = nu(j);
    for (std::size_t i = 0; i < v.size(); ++i) x[i] += k * v[i];
  }

  int species_index(const std::string& name) const;

 private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
  std::vector<int> nu_;  // J x d, row-major
};

State apply_reaction(const ReactionNetwork& net, State x, std::size_t j, std::int64_t k);

inline bool in_lattice(std::span<const std::int64_t> x) {
  for (auto v : x)
    if (v < 0) return false;
  return true;
}

struct MeanFieldPoint {
  double t;
  std::vector<double> x;
};

// Forward Euler on dx/dt = nu a(x). Throws ModelError if a component exceeds cap.
std::vector<MeanFieldPoint> mean_field(const ReactionNetwork& net, std::vector<double> x0, double T,
                                       double step, double cap = 1e12);

// d x d Jacobian of nu a(x) at a real state, row-major.
std::vector<double> drift_jacobian(const ReactionNetwork& net, std::span<const double> x);

}  // namespace srn
