#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualopt/polynomial.hpp"

namespace dualopt {

// A point mass of the preference weighting measure.
struct Atom {
  double location;  // in [0, 1]
  double mass;      // in (0, 1]
};

// One polynomial density segment, d(z) = coefficients evaluated at z for
// z in [lower, upper].  Degree at most 3 so tail integrals stay closed-form.
struct DensityPiece {
  double lower;
  double upper;
  std::vector<double> coefficients;
};

// Probability measure on [0,1] given as point atoms plus a piecewise
// polynomial density.  Immutable after construction; all queries are pure.
//
// The constructor stores the parts as given.  Use validate() to obtain a
// diagnostic list of invariant violations (mass normalization, ordering,
// nonnegativity); operations assume a measure that validates cleanly.
class MixedMeasure {
 public:
  MixedMeasure() = default;
  MixedMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces)
      : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {}

  // Point mass at `location`.
  static MixedMeasure dirac(double location) {
    return MixedMeasure({Atom{location, 1.0}}, {});
  }

  // Lebesgue measure on [0,1].
  static MixedMeasure uniform_density() {
    return MixedMeasure({}, {DensityPiece{0.0, 1.0, {1.0}}});
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }

  // Total mass: sum of atom masses plus the density integral.
  double total_mass() const {
    double total = 0.0;
    for (const auto& a : atoms_) total += a.mass;
    for (const auto& p : pieces_) total += poly::integrate(p.coefficients, p.lower, p.upper);
    return total;
  }

  // m([c, 1]).  Decreasing and left-continuous in c; an atom sitting
  // exactly at c is included.
  double tail_mass(double c) const {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw std::domain_error("tail_mass: c must lie in [0,1]");
    }
    double total = 0.0;
    for (const auto& a : atoms_) {
      if (a.location >= c) total += a.mass;
    }
    for (const auto& p : pieces_) {
      if (p.upper > c) {
        total += poly::integrate(p.coefficients, std::max(p.lower, c), p.upper);
      }
    }
    return total;
  }

  // m([1 - eps, 1]) evaluated without forming 1 - eps, so it stays exact
  // for eps far below machine epsilon.  Density segments are re-expanded
  // around z = 1 to avoid cancellation in the antiderivative difference.
  double tail_mass_near_one(double eps) const {
    if (!(eps >= 0.0 && eps <= 1.0)) {
      throw std::domain_error("tail_mass_near_one: eps must lie in [0,1]");
    }
    double total = 0.0;
    for (const auto& a : atoms_) {
      if (1.0 - a.location <= eps) total += a.mass;
    }
    for (const auto& p : pieces_) {
      const double w_hi = 1.0 - p.lower;   // distance of the piece ends from 1
      const double w_lo = 1.0 - p.upper;
      if (w_lo >= eps) continue;
      const std::vector<double> reflected = poly::reflect_about_one(p.coefficients);
      total += poly::integrate(reflected, std::max(w_lo, 0.0), std::min(w_hi, eps));
    }
    return total;
  }

  // Atom locations strictly inside (0,1), sorted.  Boundary masses are
  // reported by mass_at_zero() / mass_at_one().
  std::vector<double> atom_locations() const {
    std::vector<double> locs;
    for (const auto& a : atoms_) {
      if (a.location > 0.0 && a.location < 1.0) locs.push_back(a.location);
    }
    std::sort(locs.begin(), locs.end());
    return locs;
  }

  double mass_at_zero() const {
    double m = 0.0;
    for (const auto& a : atoms_) {
      if (a.location == 0.0) m += a.mass;
    }
    return m;
  }

  double mass_at_one() const {
    double m = 0.0;
    for (const auto& a : atoms_) {
      if (a.location == 1.0) m += a.mass;
    }
    return m;
  }

  // Density value at z = 1 from the left, zero when no piece reaches 1.
  // Together with the cost profile's lower bound this decides whether the
  // tail ratio diverges.
  double density_at_one() const {
    double d = 0.0;
    for (const auto& p : pieces_) {
      if (p.upper >= 1.0) d += poly::eval(p.coefficients, 1.0);
    }
    return d;
  }

  // First moment of the density part, sum of integrals of z * d(z).
  double density_first_moment() const {
    double m = 0.0;
    for (const auto& p : pieces_) {
      std::vector<double> zc(p.coefficients.size() + 1, 0.0);
      for (std::size_t i = 0; i < p.coefficients.size(); ++i) zc[i + 1] = p.coefficients[i];
      m += poly::integrate(zc, p.lower, p.upper);
    }
    return m;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> pieces_;
};

// Diagnostic validation.  Returns human-readable violations, one entry per
// problem, empty when the measure satisfies all invariants:
//   - total mass 1 within 1e-12,
//   - atom locations in [0,1], strictly increasing, masses >= 1e-14,
//   - pieces inside [0,1], non-overlapping, degree <= 3, density >= 0.
inline std::vector<std::string> validate(const MixedMeasure& m) {
  std::vector<std::string> issues;
  auto report = [&issues](const std::string& msg) { issues.push_back(msg); };
  std::ostringstream os;
  os.precision(12);

  const auto& atoms = m.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i].location >= 0.0 && atoms[i].location <= 1.0)) {
      os.str(""); os << "atom " << i << " location " << atoms[i].location << " outside [0,1]";
      report(os.str());
    }
    if (!(atoms[i].mass >= 1e-14)) {
      os.str(""); os << "atom " << i << " mass " << atoms[i].mass << " below 1e-14 (degenerate)";
      report(os.str());
    }
    if (i > 0 && !(atoms[i].location > atoms[i - 1].location)) {
      os.str(""); os << "atom locations not strictly increasing at index " << i
                     << " (" << atoms[i - 1].location << " then " << atoms[i].location << ")";
      report(os.str());
    }
  }

  const auto& pieces = m.pieces();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    if (!(p.lower >= 0.0 && p.upper <= 1.0 && p.lower < p.upper)) {
      os.str(""); os << "density piece " << i << " interval [" << p.lower << "," << p.upper
                     << "] invalid or outside [0,1]";
      report(os.str());
      continue;
    }
    if (p.coefficients.empty() || p.coefficients.size() > 4) {
      os.str(""); os << "density piece " << i << " must have 1..4 coefficients (degree <= 3)";
      report(os.str());
      continue;
    }
    if (i > 0 && p.lower < pieces[i - 1].upper - 1e-15) {
      os.str(""); os << "density pieces " << i - 1 << " and " << i << " overlap";
      report(os.str());
    }
    const auto [min_val, min_arg] = poly::min_on_interval(p.coefficients, p.lower, p.upper);
    if (min_val < -1e-12) {
      os.str(""); os << "density negative (" << min_val << ") at z = " << min_arg;
      report(os.str());
    }
  }

  const double total = m.total_mass();
  if (std::abs(total - 1.0) > 1e-12) {
    os.str(""); os << "total mass " << total << " differs from 1 by more than 1e-12";
    report(os.str());
  }
  return issues;
}

}  // namespace dualopt
