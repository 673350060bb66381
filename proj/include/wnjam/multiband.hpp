// Copyright 2026 The wnjam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// RHS-multiband uncertainty over the SIR balances of the served testpoints.
//
// Band k in {K-, ..., K+} of testpoint t covers deviations (d_t^{k-1}, d_t^k]
// (the lowest band is the single value d_t^{K-}); an adversary placing t in
// band k can shift its balance by up to d_t^k. Global bounds l_k <= #t in
// band k <= u_k limit how many balances deviate in each band.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wnjam/common.hpp"
#include "wnjam/netmodel.hpp"

namespace wnjam {

class MultibandSet {
 public:
  MultibandSet() = default;
  MultibandSet(int k_minus, int k_plus, std::size_t num_tps)
      : k_minus_(k_minus),
        k_plus_(k_plus),
        offsets_(num_tps, static_cast<std::size_t>(k_plus - k_minus + 1)),
        lower_(static_cast<std::size_t>(k_plus - k_minus + 1), 0),
        upper_(static_cast<std::size_t>(k_plus - k_minus + 1), static_cast<int>(num_tps)) {
    require(k_minus <= 0 && k_plus >= 0, "multiband: need K- <= 0 <= K+");
  }

  int k_minus() const { return k_minus_; }
  int k_plus() const { return k_plus_; }
  int num_bands() const { return k_plus_ - k_minus_ + 1; }
  std::size_t num_tps() const { return offsets_.rows(); }
  std::size_t column(int k) const {
    require(k >= k_minus_ && k <= k_plus_, "multiband: band index out of range");
    return static_cast<std::size_t>(k - k_minus_);
  }

  double offset(std::size_t t, int k) const { return offsets_.at(t, column(k)); }
  void set_offset(std::size_t t, int k, double d) { offsets_.at(t, column(k)) = d; }
  double worst_positive(std::size_t t) const { return offset(t, k_plus_); }
  double worst_negative(std::size_t t) const { return offset(t, k_minus_); }

  int lower(int k) const { return lower_[column(k)]; }
  int upper(int k) const { return upper_[column(k)]; }
  void set_bounds(int k, int l, int u) {
    lower_[column(k)] = l;
    upper_[column(k)] = u;
  }

  const Matrix& offsets() const { return offsets_; }

  void validate() const {
    const int n = static_cast<int>(num_tps());
    for (std::size_t t = 0; t < num_tps(); ++t) {
      require(offset(t, 0) == 0.0, "multiband: d_t^0 must be 0");
      for (int k = k_minus_ + 1; k <= k_plus_; ++k) {
        require(offset(t, k - 1) < offset(t, k), "multiband: thresholds must be strictly increasing");
      }
    }
    int lsum = 0;
    for (int k = k_minus_; k <= k_plus_; ++k) {
      require(lower(k) >= 0 && lower(k) <= upper(k) && upper(k) <= n, "multiband: need 0 <= l_k <= u_k <= |T'|");
      lsum += lower(k);
    }
    require(upper(0) == n, "multiband: u_0 must equal |T'|");
    require(lsum <= n, "multiband: sum of lower bounds exceeds |T'|");
  }

  friend bool operator==(const MultibandSet&, const MultibandSet&) = default;

 private:
  int k_minus_ = 0;
  int k_plus_ = 0;
  Matrix offsets_;
  std::vector<int> lower_;
  std::vector<int> upper_;
};

enum class BandBounds {
  kSpread,     // u_k = ceil(|T'| / (K+ + |K-|)) for k != 0
  kUnlimited,  // u_k = |T'|
  kNone,       // u_k = 0: no deviation allowed outside band 0
};

// Bands whose edges sit at dB(balance) * (1 -+ f*i/h), i = 1..h, on either
// side of the nominal value; offsets are the linear distances to it.
inline MultibandSet make_bands(std::span<const double> balances, double fraction, int negative_bands = 2,
                               int positive_bands = 2, BandBounds policy = BandBounds::kSpread) {
  require(fraction > 0.0 && fraction < 1.0, "make_bands: fraction must lie in (0,1)");
  require(negative_bands >= 0 && positive_bands >= 0, "make_bands: band counts must be >= 0");
  const std::size_t n = balances.size();
  MultibandSet mb(-negative_bands, positive_bands, n);
  for (std::size_t t = 0; t < n; ++t) {
    if (!(balances[t] > 0.0)) throw ValidationError("make_bands: nominal balance must be > 0 mW");
    const double db = linear_to_db(balances[t]);
    if (db == 0.0) throw ValidationError("make_bands: a 0 dBmW balance gives degenerate dB-multiplicative bands");
    // Multipliers 1 - f*i/h raise the balance when dB < 0 and lower it when dB > 0.
    std::vector<double> up, down;
    for (int i = 1; i <= positive_bands; ++i) {
      const double step = fraction * i / positive_bands;
      up.push_back(db_to_linear(db + std::abs(db) * step) - balances[t]);
    }
    for (int i = 1; i <= negative_bands; ++i) {
      const double step = fraction * i / negative_bands;
      down.push_back(db_to_linear(db - std::abs(db) * step) - balances[t]);
    }
    for (int i = 0; i < positive_bands; ++i) mb.set_offset(t, i + 1, up[static_cast<std::size_t>(i)]);
    for (int i = 0; i < negative_bands; ++i) mb.set_offset(t, -(i + 1), down[static_cast<std::size_t>(i)]);
  }
  const int total = negative_bands + positive_bands;
  for (int k = -negative_bands; k <= positive_bands; ++k) {
    int u = static_cast<int>(n);
    if (k != 0) {
      switch (policy) {
        case BandBounds::kSpread: u = total == 0 ? 0 : (static_cast<int>(n) + total - 1) / total; break;
        case BandBounds::kUnlimited: break;
        case BandBounds::kNone: u = 0; break;
      }
    }
    mb.set_bounds(k, 0, u);
  }
  return mb;
}

inline std::string to_string(BandBounds b) {
  switch (b) {
    case BandBounds::kSpread: return "spread";
    case BandBounds::kUnlimited: return "unlimited";
    case BandBounds::kNone: return "none";
  }
  return "?";
}

}  // namespace wnjam
