#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "robustq/scheduling.hpp"
#include "robustq/sim/point_process.hpp"

namespace robustq::sim {

struct PriorityConfig {
  SchedulingInstance instance;
  std::vector<std::size_t> priority;  // class indices, highest priority first
  double scaling = 1.0;               // n: A^n(t) = A(nt), S^n(u) = S(nu)
  double horizon = 1.0;               // T
  // Optional unscaled primitives per class; empty means Poisson at the instance rates.
  std::vector<PrimitiveProcessSpec> arrivals;
  std::vector<PrimitiveProcessSpec> services;
  std::uint64_t seed = 1;
  std::uint64_t replication = 0;
  bool assert_invariants = false;

  void validate() const;
};

struct PriorityOutcome {
  std::vector<long> queue;            // X^n_i(T)
  std::vector<double> busy_time;      // U^n_i(T)
  std::vector<long> arrivals;         // A^n_i(T)
  std::vector<long> departures;       // S^n_i(U^n_i(T))
  std::vector<double> time_average;   // (1/T) int_0^T X^n_i
  std::vector<double> mean_sojourn;   // over customers that departed by T (NaN when none)
};

// Work-conserving preemptive-resume priority from the empty state.
PriorityOutcome simulate_multiclass_priority(const PriorityConfig& cfg);

std::vector<PriorityOutcome> simulate_multiclass_priority_batch(const PriorityConfig& cfg, int reps,
                                                                unsigned threads = 1);

}  // namespace robustq::sim
