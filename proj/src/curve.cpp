#include "mevlab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mevlab/error.hpp"
#include "solve.hpp"

namespace mevlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CurveViolation: return "CurveViolation";
    case ErrorCode::InvalidPrice: return "InvalidPrice";
    case ErrorCode::NegativeReserve: return "NegativeReserve";
    case ErrorCode::InvalidStep: return "InvalidStep";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::NoLimitState: return "NoLimitState";
    case ErrorCode::TooManyOrders: return "TooManyOrders";
    case ErrorCode::NoReports: return "NoReports";
    case ErrorCode::UnknownOrder: return "UnknownOrder";
    case ErrorCode::UnknownArbitrageur: return "UnknownArbitrageur";
    case ErrorCode::InvalidPrior: return "InvalidPrior";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Schema: return "Schema";
  }
  return "Unknown";
}

static bool rel_close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

bool approx_equal(PoolState a, PoolState b, double rel_tol) {
  return rel_close(a.x, b.x, rel_tol) && rel_close(a.y, b.y, rel_tol);
}

bool TradingCurve::contains(PoolState s, double rel_tol) const {
  if (!(s.x > 0.0) || !(s.y > 0.0) || !std::isfinite(s.x) || !std::isfinite(s.y)) return false;
  double fy = y_given_x(s.x);
  if (std::isfinite(fy) && rel_close(fy, s.y, rel_tol)) return true;
  double fx = x_given_y(s.y);
  return std::isfinite(fx) && rel_close(fx, s.x, rel_tol);
}

PoolState TradingCurve::state_at_price(double v) const {
  auto g = [&](double x) {
    double y = y_given_x(x);
    if (!(y > 0.0) || !std::isfinite(y)) return std::numeric_limits<double>::quiet_NaN();
    return marginal_rate({x, y}) - v;
  };
  auto root = detail::bisect_decreasing(g, 1.0);
  if (!root) throw Error(ErrorCode::InvalidPrice, "price not reachable on curve " + name());
  PoolState s{*root, y_given_x(*root)};
  if (!rel_close(marginal_rate(s), v, kCurveTolerance)) {
    throw Error(ErrorCode::InvalidPrice, "price not reachable on curve " + name());
  }
  return s;
}

ConstantProduct::ConstantProduct(double k) : k_(k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorCode::InvalidArgument, "k must be positive");
}

PoolState ConstantProduct::state_at_price(double v) const {
  return {std::sqrt(k_ / v), std::sqrt(k_ * v)};
}

void require_on_curve(const TradingCurve& curve, PoolState s) {
  if (!(s.x > 0.0) || !(s.y > 0.0)) {
    throw Error(ErrorCode::NegativeReserve, "reserves must be positive");
  }
  if (!curve.contains(s)) {
    throw Error(ErrorCode::CurveViolation, "state is off the " + curve.name() + " curve");
  }
}

double spot_price(const TradingCurve& curve, PoolState s) {
  if (!curve.contains(s)) {
    throw Error(ErrorCode::CurveViolation, "state is off the " + curve.name() + " curve");
  }
  return curve.marginal_rate(s);
}

PoolState state_at_price(const TradingCurve& curve, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidPrice, "price must be positive");
  return curve.state_at_price(v);
}

}  // namespace mevlab
