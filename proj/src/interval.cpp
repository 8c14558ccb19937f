#include "jcasbeam/interval.hpp"

#include <algorithm>
#include <cmath>

namespace jcasbeam {

namespace {
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kFullTol = 1e-12;   // measure within this of 2*pi counts as full
constexpr double kMergeTol = 1e-14;  // gap below this merges adjacent arcs
}  // namespace

CyclicIntervalSet CyclicIntervalSet::arc(double start, double width) {
  if (width < 0.0) width = 0.0;
  if (width >= kTwoPi - kFullTol) return full();
  CyclicIntervalSet s;
  double lo = wrap_angle(start);
  double hi = lo + width;
  if (hi <= kPi) {
    s.arcs_ = {{lo, hi}};
  } else {
    s.arcs_ = {{-kPi, hi - kTwoPi}, {lo, kPi}};
  }
  s.canonicalize();
  return s;
}

CyclicIntervalSet CyclicIntervalSet::from_arcs(const std::vector<Arc>& raw) {
  CyclicIntervalSet acc;
  for (const auto& [start, width] : raw) {
    CyclicIntervalSet piece = arc(start, width);
    if (piece.is_full()) return full();
    acc.arcs_.insert(acc.arcs_.end(), piece.arcs_.begin(), piece.arcs_.end());
  }
  acc.canonicalize();
  return acc;
}

void CyclicIntervalSet::canonicalize() {
  if (full_) {
    arcs_ = {{-kPi, kPi}};
    return;
  }
  std::sort(arcs_.begin(), arcs_.end());
  std::vector<Arc> merged;
  for (const auto& a : arcs_) {
    if (!merged.empty() && a.first <= merged.back().second + kMergeTol) {
      merged.back().second = std::max(merged.back().second, a.second);
    } else {
      merged.push_back(a);
    }
  }
  arcs_ = std::move(merged);
  double total = 0.0;
  for (const auto& a : arcs_) total += a.second - a.first;
  if (total >= kTwoPi - kFullTol) {
    full_ = true;
    arcs_ = {{-kPi, kPi}};
  }
}

double CyclicIntervalSet::measure() const {
  if (full_) return kTwoPi;
  double total = 0.0;
  for (const auto& a : arcs_) total += a.second - a.first;
  return total;
}

bool CyclicIntervalSet::contains(double phi, double tol) const {
  if (full_) return true;
  if (arcs_.empty()) return false;
  double w = wrap_angle(phi);
  for (const auto& [lo, hi] : arcs_) {
    for (double cand : {w, w - kTwoPi, w + kTwoPi}) {
      if (cand >= lo - tol && cand <= hi + tol) return true;
    }
  }
  return false;
}

CyclicIntervalSet CyclicIntervalSet::intersect(const CyclicIntervalSet& other) const {
  if (full_) return other;
  if (other.full_) return *this;
  CyclicIntervalSet out;
  std::size_t i = 0, j = 0;
  while (i < arcs_.size() && j < other.arcs_.size()) {
    const auto& a = arcs_[i];
    const auto& b = other.arcs_[j];
    double lo = std::max(a.first, b.first);
    double hi = std::min(a.second, b.second);
    if (lo <= hi) out.arcs_.push_back({lo, hi});
    if (a.second < b.second) {
      ++i;
    } else {
      ++j;
    }
  }
  out.canonicalize();
  return out;
}

std::vector<double> CyclicIntervalSet::endpoints() const {
  std::vector<double> pts;
  pts.reserve(2 * arcs_.size());
  for (const auto& [lo, hi] : arcs_) {
    pts.push_back(lo);
    pts.push_back(hi);
  }
  return pts;
}

}  // namespace jcasbeam
