#pragma once

#include <utility>
#include <vector>

#include "jcasbeam/types.hpp"

namespace jcasbeam {

// Union of closed arcs on the phase circle (circumference 2*pi).
// Canonical form: pairwise-disjoint arcs [lo, hi], sorted by lo, all inside
// the base window [-pi, pi]. An arc crossing the -pi/pi seam is stored as
// two pieces. FULL and EMPTY are explicit states.
class CyclicIntervalSet {
 public:
  using Arc = std::pair<double, double>;

  CyclicIntervalSet() = default;

  static CyclicIntervalSet empty() { return {}; }

  static CyclicIntervalSet full() {
    CyclicIntervalSet s;
    s.full_ = true;
    s.arcs_ = {{-kPi, kPi}};
    return s;
  }

  /// Arc starting at `start`, extending counterclockwise by `width` >= 0.
  static CyclicIntervalSet arc(double start, double width);

  /// Builds the canonical form from raw arcs (each interpreted like arc()).
  static CyclicIntervalSet from_arcs(const std::vector<Arc>& raw);

  bool is_empty() const { return !full_ && arcs_.empty(); }
  bool is_full() const { return full_; }

  double measure() const;

  /// Closed membership test, optionally expanded by `tol` at arc boundaries.
  bool contains(double phi, double tol = 0.0) const;

  CyclicIntervalSet intersect(const CyclicIntervalSet& other) const;

  const std::vector<Arc>& arcs() const { return arcs_; }

  /// All arc endpoints in the base window (candidates for boundary optima).
  std::vector<double> endpoints() const;

  bool operator==(const CyclicIntervalSet& other) const {
    return full_ == other.full_ && arcs_ == other.arcs_;
  }

 private:
  void canonicalize();

  std::vector<Arc> arcs_;
  bool full_ = false;
};

}  // namespace jcasbeam
