#pragma once

#include <algorithm>
#include <cmath>

#include "mclear/common.hpp"

namespace mclear {

// Linear marginal value curve: value of the next MW at consumption q is
// intercept - slope * q.
struct DemandCurve {
  double intercept = 0.0;  // $/MWh at q = 0
  double slope = 0.0;      // $/MWh per MW, > 0
};

// Two-point calibration: (qmin, price_high) and (qbar, price_low) lie on the
// marginal value line.
inline DemandCurve calibrate(double qmin, double qbar, double price_high,
                             double price_low) {
  if (!(qbar > qmin))
    throw validation_error("demand calibration needs qbar > qmin");
  if (!(price_high > price_low))
    throw validation_error("demand calibration needs ph > pl");
  DemandCurve c;
  c.slope = (price_high - price_low) / (qbar - qmin);
  c.intercept = price_high + c.slope * qmin;
  return c;
}

inline double marginal_value(const DemandCurve& c, double q) {
  return c.intercept - c.slope * q;
}

// Area under the marginal value curve from 0 to q.
inline double benefit(const DemandCurve& c, double q) {
  return c.intercept * q - 0.5 * c.slope * q * q;
}

struct ConsumerResponse {
  double q = 0.0;     // MW purchased
  double beta = 0.0;  // multiplier of the minimum-demand constraint, >= 0
  bool floor_binding = false;  // indicator u: 1 only when the floor binds with beta > 0
};

// Closed-form surplus-maximizing response to an energy price p and reserve
// price p_res, paying (p + phi p_res) per MW, with a hard floor on q. This
// is the oracle the big-M encoding is checked against.
inline ConsumerResponse optimal_demand(const DemandCurve& c, double p,
                                       double p_res, double phi, double floor) {
  if (!(c.slope > 0)) throw validation_error("optimal_demand needs slope > 0");
  ConsumerResponse r;
  const double paid = p + phi * p_res;
  const double interior = (c.intercept - paid) / c.slope;
  r.q = std::max(floor, interior);
  r.beta = std::max(0.0, paid - c.intercept + c.slope * floor);
  // Boundary touch with beta ~ 0 keeps the stationarity branch active.
  const double tie_tol = 1e-9 * std::max(1.0, std::abs(paid) + std::abs(c.intercept));
  r.floor_binding = (r.q == floor) && (r.beta > tie_tol);
  return r;
}

inline double consumer_surplus(const DemandCurve& c, double q, double p,
                               double p_res, double phi) {
  return benefit(c, q) - (p + phi * p_res) * q;
}

// The four linear rows of the complementarity linearization for one
// bus/period, expressed over the variables (q, p, p_res, u):
//   floor:    q >= floor
//   stat_lo:  p + phi p_res + slope q >= intercept
//   stat_hi:  p + phi p_res + slope q - m_price u <= intercept
//   gap_hi:   q + m_qty u <= floor + m_qty
struct FamRows {
  double floor = 0.0;
  double intercept = 0.0;
  double slope = 0.0;
  double phi = 0.0;
  double m_price = 0.0;
  double m_qty = 0.0;
};

// Validates the supplied constants against the certified minima before
// emitting the row description; an undersized constant would silently cut
// feasible responses.
inline FamRows fam_constraints(const DemandCurve& c, double floor, double phi,
                               double m_price, double m_qty,
                               double certified_m_price, double certified_m_qty) {
  if (!(m_price > 0) || !(m_qty > 0))
    throw validation_error("fam_constraints: big-M values must be positive");
  if (m_price < certified_m_price - 1e-9 || m_qty < certified_m_qty - 1e-9)
    throw validation_error("fam_constraints: big-M below the certified bound");
  return FamRows{floor, c.intercept, c.slope, phi, m_price, m_qty};
}

// Point check used by tests and report validation.
inline bool fam_satisfied(const FamRows& f, double q, double p, double p_res,
                          bool u, double tol = 1e-9) {
  const double stat = p + f.phi * p_res - f.intercept + f.slope * q;
  if (q < f.floor - tol) return false;
  if (stat < -tol) return false;
  if (stat > f.m_price * (u ? 1.0 : 0.0) + tol) return false;
  if (q - f.floor > f.m_qty * (u ? 0.0 : 1.0) + tol) return false;
  return true;
}

}  // namespace mclear
