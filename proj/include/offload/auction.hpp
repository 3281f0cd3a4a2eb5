#pragma once

#include <span>
#include <vector>

#include "offload/types.hpp"

namespace offload {

struct UserBid {
  int unit = 0;  // 1..M
  double amount = 0;
};

// The bid an unassigned user places given only its own reward and bid
// vectors: target the unit with the highest net value, priced so the user is
// indifferent to its best alternative on another server, plus the increment.
UserBid compute_user_bid(std::span<const double> unit_rewards, std::span<const double> bids,
                         const UnitMap& units, double epsilon);

// Decentralized auction over resource units. Each round is one simultaneous
// bid-and-arbitrate pass over all unassigned users; servers keep, per unit,
// the highest bidder. Bid ties break toward the lowest user index and unit
// ties toward the lowest unit index.
class DAuction {
 public:
  DAuction(const Matrix& values /* N x K estimated rewards */,
           const std::vector<int>& capacities, double epsilon);

  // Runs one round; returns false (and does nothing) once all users hold a
  // unit. A displaced incumbent returns to the unassigned pool.
  bool round();

  bool all_assigned() const { return unassigned_count_ == 0; }
  int rounds_used() const { return rounds_used_; }

  // Winners of the just-executed round plus continuing holders, i.e. the
  // users whose offloaded task a server processes this slot.
  const std::vector<int>& held_units() const { return held_unit_; }  // 0 or 1..M
  // Unit each user bid on in the latest round (0 for non-bidders).
  const std::vector<int>& last_bid_units() const { return last_bid_unit_; }
  Assignment server_assignment() const;

  const Matrix& unit_rewards() const { return unit_rewards_; }
  const Matrix& bids() const { return bids_; }
  const UnitMap& units() const { return units_; }

  // Current highest bid per unit (0 where never bid).
  std::vector<double> unit_prices() const;
  // Per server, the minimum of its unit prices.
  std::vector<double> server_prices() const;

 private:
  UnitMap units_;
  double epsilon_;
  Matrix unit_rewards_;  // N x M, replicated per-server estimates
  Matrix bids_;          // N x M, each user's recorded bids
  std::vector<int> held_unit_;    // per user: 0 or 1..M
  std::vector<int> last_bid_unit_;
  std::vector<int> unit_holder_;  // per unit: -1 or user index (0-based)
  int unassigned_count_ = 0;
  int rounds_used_ = 0;
};

// Near-optimality certificate: every user's held unit is within epsilon of
// its best net value at the final server prices.
bool verify_eps_cs(const Matrix& unit_rewards, const Matrix& bids,
                   const std::vector<int>& held_units, const UnitMap& units, double epsilon);

}  // namespace offload
