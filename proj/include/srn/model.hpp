#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "srn/network.hpp"

namespace srn {

// Linear observable g(x) = w.x + b.
struct Observable {
  std::vector<double> weights;
  double offset = 0.0;
  std::string text;

  double operator()(std::span<const std::int64_t> x) const {
    double g = offset;
    for (std::size_t i = 0; i < weights.size(); ++i) g += weights[i] * static_cast<double>(x[i]);
    return g;
  }
  const std::vector<double>& gradient() const { return weights; }
};

struct Model {
  std::string name;
  ReactionNetwork net;
  State x0;
  double T = 0.0;
  Observable g;
};

// Model file: one statement per line, '#' starts a comment.
//   name = decay
//   T = 0.5
//   species X = 100000
//   reaction death: X -> 0 @ 1
//   reaction dimer: nu = (0,-2,1) @ 0.001*P^2 - 0.001*P
//   observable = X
Model parse_model(const std::string& text);
Model load_model(const std::string& path);
std::string write_model(const Model& model);

// FNV-1a over the canonical model text, hex encoded.
std::string model_hash(const Model& model);

struct LintMessage {
  bool error;
  std::string text;
};

// Sanity checks; check_simplex additionally looks for w >= 0, w != 0 with (w, nu_j) <= 0 for all j.
std::vector<LintMessage> lint_model(const Model& model, bool check_simplex);

Model decay_model(double x0 = 1e5, double c = 1.0, double T = 0.5);
Model gene_model();

}  // namespace srn
