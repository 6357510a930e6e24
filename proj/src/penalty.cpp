#include "algossip/penalty.hpp"

#include <cmath>

#include "algossip/errors.hpp"

namespace algossip {

PenaltySchedule PenaltySchedule::fixed(double rho) {
  PenaltySchedule s;
  s.kind = PenaltyKind::Fixed;
  s.rho = rho;
  s.validate();
  return s;
}

PenaltySchedule PenaltySchedule::power(double a, double b) {
  PenaltySchedule s;
  s.kind = PenaltyKind::Power;
  s.a = a;
  s.b = b;
  s.validate();
  return s;
}

PenaltySchedule PenaltySchedule::geometric(double k, double a, double c) {
  PenaltySchedule s;
  s.kind = PenaltyKind::Geometric;
  s.k = k;
  s.a = a;
  s.c = c;
  s.validate();
  return s;
}

PenaltySchedule PenaltySchedule::adaptive(double rho0, double kappa, double sigma) {
  PenaltySchedule s;
  s.kind = PenaltyKind::Adaptive;
  s.rho = rho0;
  s.kappa = kappa;
  s.sigma = sigma;
  s.validate();
  return s;
}

void PenaltySchedule::validate() const {
  switch (kind) {
    case PenaltyKind::Fixed:
      if (!(rho > 0.0)) throw DomainError("fixed penalty must be positive");
      break;
    case PenaltyKind::Power:
      if (!(a >= 0.0)) throw DomainError("power penalty exponent must be >= 0");
      if (!(b > 0.0) && !(a == 0.0 && b > -1.0))
        throw DomainError("power penalty must be positive at t = 0");
      break;
    case PenaltyKind::Geometric:
      if (!(k >= 0.0 && a >= 1.0)) throw DomainError("geometric penalty needs k >= 0, a >= 1");
      if (!(k + c > 0.0)) throw DomainError("geometric penalty must be positive at t = 0");
      break;
    case PenaltyKind::Adaptive:
      if (!(rho > 0.0)) throw DomainError("adaptive penalty: rho0 must be positive");
      if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("adaptive penalty: kappa in (0, 1)");
      if (!(sigma > 1.0)) throw DomainError("adaptive penalty: sigma must exceed 1");
      break;
  }
}

double PenaltySchedule::initial() const {
  return kind == PenaltyKind::Adaptive ? rho : penalty_at(*this, 0);
}

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::Fixed: return "fixed";
    case PenaltyKind::Power: return "power";
    case PenaltyKind::Geometric: return "geometric";
    case PenaltyKind::Adaptive: return "adaptive";
  }
  return "?";
}

double penalty_at(const PenaltySchedule& s, int t) {
  if (t < 0) throw DomainError("penalty_at: t must be >= 0");
  switch (s.kind) {
    case PenaltyKind::Fixed: return s.rho;
    case PenaltyKind::Power: return std::pow(static_cast<double>(t), s.a) + s.b;
    case PenaltyKind::Geometric: return s.k * std::pow(s.a, t) + s.c;
    case PenaltyKind::Adaptive:
      throw KindError("adaptive penalties are per dual variable; use update_adaptive");
  }
  return s.rho;
}

double update_adaptive(double rho_prev, std::optional<double> eps_prev, double eps_cur,
                       double kappa, double sigma) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("update_adaptive: kappa in (0, 1)");
  if (!(sigma > 1.0)) throw DomainError("update_adaptive: sigma must exceed 1");
  if (!(rho_prev > 0.0)) throw DomainError("update_adaptive: rho must be positive");
  if (!eps_prev) return rho_prev;
  if (!(*eps_prev >= 0.0)) throw DomainError("update_adaptive: previous violation must be >= 0");
  return eps_cur <= kappa * *eps_prev ? rho_prev : sigma * rho_prev;
}

}  // namespace algossip
