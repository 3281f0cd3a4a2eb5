#pragma once

#include "offload/matrix.hpp"

namespace offload {

// Cumulative successful-offload counts V and reward sums S across all
// exploration phases; the working estimate is the elementwise ratio S/V.
class EstimatorState {
 public:
  EstimatorState() = default;
  EstimatorState(int num_users, int num_servers)
      : v_(num_users, num_servers), s_(num_users, num_servers) {}

  void record(int user, int server, double reward) {
    v_(user, server) += 1;
    s_(user, server) += reward;
  }

  // Reshaped copy for population changes: row r of the result takes row
  // src_rows[r] of `prev`, or starts empty where src_rows[r] < 0.
  static EstimatorState remap(const EstimatorState& prev, const std::vector<int>& src_rows) {
    EstimatorState next(static_cast<int>(src_rows.size()), prev.num_servers());
    for (size_t r = 0; r < src_rows.size(); ++r) {
      if (src_rows[r] < 0) continue;
      for (int j = 0; j < prev.num_servers(); ++j) {
        next.v_(static_cast<int>(r), j) = prev.v_(src_rows[r], j);
        next.s_(static_cast<int>(r), j) = prev.s_(src_rows[r], j);
      }
    }
    return next;
  }

  const Matrix& success_counts() const { return v_; }
  const Matrix& reward_sums() const { return s_; }
  int num_users() const { return v_.rows(); }
  int num_servers() const { return v_.cols(); }

  // Estimates S/V; entries never explored fall back to `fallback` (the
  // pessimistic reward floor) and are counted in *holes when given.
  Matrix estimates(double fallback, int* holes = nullptr) const {
    Matrix r(v_.rows(), v_.cols());
    if (holes) *holes = 0;
    for (int i = 0; i < v_.rows(); ++i) {
      for (int j = 0; j < v_.cols(); ++j) {
        if (v_(i, j) > 0) {
          r(i, j) = s_(i, j) / v_(i, j);
        } else {
          r(i, j) = fallback;
          if (holes) ++*holes;
        }
      }
    }
    return r;
  }

 private:
  Matrix v_;
  Matrix s_;
};

}  // namespace offload
