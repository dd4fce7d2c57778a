#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srn/network.hpp"

namespace srn {

enum class StepKind : std::uint8_t { Exact, MnrmK1, MnrmK2, TauLeap };

struct StepCounts {
  std::int64_t tl = 0;
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
  std::int64_t total() const { return tl + k1 + k2; }
  StepCounts& operator+=(const StepCounts& o) {
    tl += o.tl;
    k1 += o.k1;
    k2 += o.k2;
    return *this;
  }
};

// One trajectory. States are recorded at every step boundary when `recording` is set;
// otherwise only the latest state is kept.
struct PathRecord {
  std::size_t d = 0;
  std::size_t J = 0;
  bool recording = true;

  std::vector<double> times;
  std::vector<std::int64_t> states;  // flattened, d per point
  std::vector<StepKind> kinds;       // kinds[k] labels the step from times[k] to times[k+1]
  std::vector<double> tl_rates;      // a_j(x) * step length, J per tau-leap step

  StepCounts counts;
  std::int64_t firings = 0;
  bool exited = false;
  double t_end = 0.0;      // time reached (T unless exited)
  double cost = 0.0;       // modeled work, seconds
  double ssa_steps = 0.0;  // integral of a_0 along the path

  void start(double t, std::span<const std::int64_t> x, std::size_t species, std::size_t channels) {
    d = species;
    J = channels;
    times.assign(1, t);
    states.assign(x.begin(), x.end());
    kinds.clear();
    tl_rates.clear();
    t_end = t;
  }

  void push(double t, std::span<const std::int64_t> x, StepKind kind) {
    t_end = t;
    if (recording) {
      times.push_back(t);
      states.insert(states.end(), x.begin(), x.end());
      kinds.push_back(kind);
    } else {
      times.back() = t;
      std::copy(x.begin(), x.end(), states.begin());
    }
  }

  std::size_t points() const { return times.size(); }
  std::size_t steps() const { return kinds.size(); }
  std::span<const std::int64_t> state(std::size_t k) const { return {states.data() + k * d, d}; }
  std::span<const std::int64_t> final_state() const { return {states.data() + states.size() - d, d}; }
};

}  // namespace srn
