#include "offload/auction.hpp"

#include <algorithm>
#include <limits>

namespace offload {

UserBid compute_user_bid(std::span<const double> unit_rewards, std::span<const double> bids,
                         const UnitMap& units, double epsilon) {
  const int m_total = units.total_units();
  int best = 1;
  double best_net = -std::numeric_limits<double>::infinity();
  for (int m = 1; m <= m_total; ++m) {
    const double net = unit_rewards[m - 1] - bids[m - 1];
    if (net > best_net) {
      best_net = net;
      best = m;
    }
  }
  const int own_server = units.server_of(best);
  double second_net = 0;  // no alternative server: bid the full net value
  bool has_alternative = false;
  for (int m = 1; m <= m_total; ++m) {
    if (units.server_of(m) == own_server) continue;
    const double net = unit_rewards[m - 1] - bids[m - 1];
    if (!has_alternative || net > second_net) {
      second_net = net;
      has_alternative = true;
    }
  }
  return {best, unit_rewards[best - 1] - second_net + epsilon};
}

DAuction::DAuction(const Matrix& values, const std::vector<int>& capacities, double epsilon)
    : units_(capacities), epsilon_(epsilon) {
  const int n = values.rows();
  const int m = units_.total_units();
  unit_rewards_ = Matrix(n, m);
  bids_ = Matrix(n, m, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int unit = 1; unit <= m; ++unit) {
      unit_rewards_(i, unit - 1) = values(i, units_.server_of(unit) - 1);
    }
  }
  held_unit_.assign(n, 0);
  last_bid_unit_.assign(n, 0);
  unit_holder_.assign(m, -1);
  unassigned_count_ = n;
}

bool DAuction::round() {
  if (all_assigned()) return false;
  ++rounds_used_;
  const int n = unit_rewards_.rows();
  std::fill(last_bid_unit_.begin(), last_bid_unit_.end(), 0);

  // Bid phase: every unassigned user computes its bid from local state only.
  struct Submitted {
    int user;
    int unit;
    double amount;
  };
  std::vector<Submitted> submissions;
  for (int i = 0; i < n; ++i) {
    if (held_unit_[i] != 0) continue;
    const UserBid b = compute_user_bid(unit_rewards_.row(i), bids_.row(i), units_, epsilon_);
    bids_(i, b.unit - 1) = b.amount;
    last_bid_unit_[i] = b.unit;
    submissions.push_back({i, b.unit, b.amount});
  }

  // Arbitration phase: per unit, the incumbent (at its recorded bid) competes
  // with this round's challengers; highest bid wins, lowest index on ties.
  for (int unit = 1; unit <= units_.total_units(); ++unit) {
    int winner = unit_holder_[unit - 1];
    double winning_bid =
        winner >= 0 ? bids_(winner, unit - 1) : -std::numeric_limits<double>::infinity();
    for (const auto& s : submissions) {
      if (s.unit != unit) continue;
      if (s.amount > winning_bid || (s.amount == winning_bid && s.user < winner)) {
        winner = s.user;
        winning_bid = s.amount;
      }
    }
    if (winner >= 0 && winner != unit_holder_[unit - 1]) {
      if (unit_holder_[unit - 1] >= 0) {
        held_unit_[unit_holder_[unit - 1]] = 0;  // displaced
        ++unassigned_count_;
      }
      unit_holder_[unit - 1] = winner;
      held_unit_[winner] = unit;
      --unassigned_count_;
    }
  }
  return true;
}

Assignment DAuction::server_assignment() const {
  Assignment a(held_unit_.size(), 0);
  for (size_t i = 0; i < held_unit_.size(); ++i) {
    if (held_unit_[i] > 0) a[i] = units_.server_of(held_unit_[i]);
  }
  return a;
}

std::vector<double> DAuction::unit_prices() const {
  std::vector<double> eta(units_.total_units(), 0.0);
  for (int m = 0; m < units_.total_units(); ++m) {
    for (int i = 0; i < bids_.rows(); ++i) eta[m] = std::max(eta[m], bids_(i, m));
  }
  return eta;
}

std::vector<double> DAuction::server_prices() const {
  const auto eta = unit_prices();
  std::vector<double> tilde(units_.num_servers(), 0.0);
  for (int j = 1; j <= units_.num_servers(); ++j) {
    auto [lo, hi] = units_.unit_range(j);
    double v = std::numeric_limits<double>::infinity();
    for (int m = lo; m <= hi; ++m) v = std::min(v, eta[m - 1]);
    tilde[j - 1] = v;
  }
  return tilde;
}

bool verify_eps_cs(const Matrix& unit_rewards, const Matrix& bids,
                   const std::vector<int>& held_units, const UnitMap& units, double epsilon) {
  const int m_total = units.total_units();
  std::vector<double> eta(m_total, 0.0);
  for (int m = 0; m < m_total; ++m) {
    for (int i = 0; i < bids.rows(); ++i) eta[m] = std::max(eta[m], bids(i, m));
  }
  std::vector<double> server_price(units.num_servers());
  for (int j = 1; j <= units.num_servers(); ++j) {
    auto [lo, hi] = units.unit_range(j);
    double v = std::numeric_limits<double>::infinity();
    for (int m = lo; m <= hi; ++m) v = std::min(v, eta[m - 1]);
    server_price[j - 1] = v;
  }
  for (int i = 0; i < unit_rewards.rows(); ++i) {
    const int a = held_units[i];
    if (a == 0) return false;  // certificate only defined for full assignments
    const double own = unit_rewards(i, a - 1) - server_price[units.server_of(a) - 1];
    for (int m = 1; m <= m_total; ++m) {
      const double other = unit_rewards(i, m - 1) - server_price[units.server_of(m) - 1];
      if (own < other - epsilon - 1e-9) return false;
    }
  }
  return true;
}

}  // namespace offload
