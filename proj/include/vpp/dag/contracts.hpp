// Demand-response contract data as agreed between the aggregator and its
// customers. Pure data; feasibility is validated by the block builders.
#pragma once

#include <string>
#include <vector>

#include "vpp/error.hpp"

namespace vpp::dag {

// Contract data that cannot be scheduled at all on the given horizon.
class UnschedulableContract : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

// Contract data that violates its own invariants regardless of horizon.
class MalformedContract : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

// Load curtailment: customers drop `quantity` MW for a contiguous run of
// hours, bounded in length and daily count.
struct LcContract {
    std::string name;
    double quantity = 0.0;          // MW dropped per scheduled hour
    double price = 0.0;             // $/MWh paid to the customer
    double initiation_cost = 0.0;   // $ per run start
    int min_duration = 1;           // hours, per run
    int max_duration = 1;           // hours, per run
    int max_daily_curtailments = 1; // run starts per day
};

// Load shifting: like curtailment but only available inside
// `reduction_window`, with a fraction of the dropped energy coming back
// during `recovery_window`.
struct LsContract {
    std::string name;
    double quantity = 0.0;
    double price = 0.0;
    double initiation_cost = 0.0;
    int min_duration = 1;
    int max_duration = 1;
    std::vector<int> reduction_window; // hours 1..H where the drop may run
    std::vector<int> recovery_window;  // hours 1..H where load returns
    double shift_fraction = 0.0;       // share of dropped energy recovered
};

// Onsite generation: a customer-side unit whose output substitutes for
// grid load, committed like a small thermal unit.
struct OgContract {
    std::string name;
    double p_min = 0.0;       // MW when committed
    double p_max = 0.0;       // MW
    double energy_price = 0.0; // $/MWh
    double startup_cost = 0.0; // $
    double startup_fuel = 0.0; // MBtu per start
    double fuel_factor = 0.0;  // MBtu per MWh generated
    double fuel_limit = 0.0;   // MBtu per day
    int min_on = 1;            // hours
    int min_off = 1;           // hours
    double ramp_up = 0.0;      // MW per hour
    double ramp_down = 0.0;    // MW per hour
};

// Energy storage offered for discharge only; charging is settled by the
// system operator outside this model.
struct EsContract {
    std::string name;
    double power_rating = 0.0;        // MW
    double energy_capacity = 0.0;     // MWh
    double discharge_efficiency = 1.0; // (0, 1]
    double discharge_price = 0.0;     // $/MWh
    double ramp_up = 0.0;             // MW per hour
    double ramp_down = 0.0;           // MW per hour
    int retention_time = 1;           // max hours per discharge episode
    int max_cycles = 1;               // discharge episodes per day
};

struct ContractSet {
    std::vector<LcContract> lc;
    std::vector<LsContract> ls;
    std::vector<OgContract> og;
    std::vector<EsContract> es;

    bool empty() const { return lc.empty() && ls.empty() && og.empty() && es.empty(); }
};

// How shifted load returns for LS contracts. `None` keeps the literal
// curtailment-only block; `Uniform` spreads the recovered energy evenly
// over the recovery window as negative reduction.
enum class LsRecovery { None, Uniform };

}  // namespace vpp::dag
