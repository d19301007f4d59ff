#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "robustq/renewal.hpp"
#include "robustq/sim/point_process.hpp"

namespace robustq::sim {

// Patience law: a renewal-style distribution, a constant, or infinite patience (the default).
struct PatienceSpec {
  std::optional<RenewalSpec> law;
  double constant = std::numeric_limits<double>::infinity();

  double draw(CounterRng& rng) const { return law ? law->sample(rng) : constant; }
};

struct RenegingConfig {
  int servers = 1;           // n
  double horizon = 1.0;      // t
  // Unscaled arrival primitive; the n-th system sees jump times divided by n.
  PrimitiveProcessSpec arrivals = PoissonProcess{1.0};
  PatienceSpec patience{};
  // One spec shared by every server, or exactly one per server.
  std::vector<PrimitiveProcessSpec> services{PoissonProcess{1.0}};
  int initial_customers = 0;  // X(0)
  std::uint64_t seed = 1;
  std::uint64_t replication = 0;
  bool assert_invariants = false;
  bool record_log = false;

  void validate() const;
  const PrimitiveProcessSpec& service_spec(int j) const;
};

enum class EventKind { arrival, departure, routing, reneging };
const char* to_string(EventKind k);

struct EventRecord {
  double t = 0.0;
  EventKind kind = EventKind::arrival;
  long customer = -1;  // -1 when not applicable
  int server = -1;
};

struct EventLog {
  std::vector<EventRecord> records;

  // Header "t,kind,customer_id,server_id"; times in shortest round-trip form.
  void write_csv(std::ostream& os) const;
  std::string to_csv() const;
};

struct SystemState {
  double clock = 0.0;
  // Per-customer flags, indexed by arrival order (customers with T_i = 0 first).
  std::vector<std::uint8_t> A, Q, K_cust, R;
  std::vector<double> arrival_time, deadline;
  // Per-server.
  std::vector<std::uint8_t> B;
  std::vector<long> K_serv, D;
  long A_total = 0, Q_total = 0, B_total = 0, D_total = 0, R_total = 0, K_total = 0;

  // Throws std::logic_error with a dump when a balance or consistency relation fails.
  void check(int servers) const;
  std::string dump() const;
};

struct RenegingOutcome {
  SystemState state;
  long reneging_count = 0;
  double reneging_rate = 0.0;  // R(t) / (t n)
  std::optional<EventLog> log;
};

RenegingOutcome simulate_reneging(const RenegingConfig& cfg);

// Replications cfg.replication + 0 .. reps-1, each on its own streams.
std::vector<RenegingOutcome> simulate_reneging_batch(const RenegingConfig& cfg, int reps, unsigned threads = 1);

// The Markovian M/M/n+M configuration: arrivals lambda, unit-count servers of rate mu, patience Exp(theta).
RenegingConfig markovian_reneging_config(int n, double horizon, double lambda, double mu, double theta,
                                         std::uint64_t seed = 1);

}  // namespace robustq::sim
