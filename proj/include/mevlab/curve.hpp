#pragma once

#include <memory>
#include <string>

namespace mevlab {

// Relative tolerance for on-curve membership checks.
inline constexpr double kCurveTolerance = 1e-9;

// Pool reserves: x is the risky asset, y the numeraire.
struct PoolState {
  double x = 0.0;
  double y = 0.0;
};

bool approx_equal(PoolState a, PoolState b, double rel_tol = kCurveTolerance);

// A constant-function trading curve F(x, y) = const.
//
// Implementations provide the two inverse evaluations and the marginal
// exchange rate. Both evaluations may return a non-positive or non-finite
// value outside the curve's domain; callers treat that as "no such state".
class TradingCurve {
 public:
  virtual ~TradingCurve() = default;

  // y on the curve for a given x.
  virtual double y_given_x(double x) const = 0;
  // x on the curve for a given y.
  virtual double x_given_y(double y) const = 0;
  // Marginal exchange rate |dy/dx| at an on-curve state. No validation.
  virtual double marginal_rate(PoolState s) const = 0;

  // The on-curve state whose marginal rate equals v. The default solves by
  // bisection over x; closed-form curves override it.
  virtual PoolState state_at_price(double v) const;

  virtual std::string name() const = 0;

  bool contains(PoolState s, double rel_tol = kCurveTolerance) const;
};

class ConstantProduct final : public TradingCurve {
 public:
  explicit ConstantProduct(double k);

  double k() const noexcept { return k_; }

  double y_given_x(double x) const override { return k_ / x; }
  double x_given_y(double y) const override { return k_ / y; }
  double marginal_rate(PoolState s) const override { return s.y / s.x; }
  PoolState state_at_price(double v) const override;
  std::string name() const override { return "constant_product"; }

 private:
  double k_;
};

// Checked spot price; throws CurveViolation for off-curve states.
double spot_price(const TradingCurve& curve, PoolState s);

// Checked state-at-price; throws InvalidPrice for v <= 0 or non-finite v.
PoolState state_at_price(const TradingCurve& curve, double v);

// Throws CurveViolation (or NegativeReserve) unless s is a valid on-curve state.
void require_on_curve(const TradingCurve& curve, PoolState s);

}  // namespace mevlab
