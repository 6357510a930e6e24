#pragma once

#include <optional>
#include <string>

namespace algossip {

enum class PenaltyKind { Fixed, Power, Geometric, Adaptive };

/// Augmented-Lagrangian penalty rule over outer iterations t = 0, 1, ...
///   fixed:     rho
///   power:     t^a + b
///   geometric: k * a^t + c
///   adaptive:  per-dual, starts at rho and grows by sigma whenever the
///              constraint violation fails to shrink by kappa
struct PenaltySchedule {
  PenaltyKind kind = PenaltyKind::Fixed;
  double rho = 1.0;
  double a = 1.3;
  double b = 1.0;
  double k = 1.0;
  double c = 3.0;
  double kappa = 0.3;
  double sigma = 1.2;

  static PenaltySchedule fixed(double rho);
  static PenaltySchedule power(double a, double b);
  static PenaltySchedule geometric(double k, double a, double c);
  static PenaltySchedule adaptive(double rho0, double kappa, double sigma);

  /// Throws DomainError when the rule is not positive and nondecreasing.
  void validate() const;
  /// Penalty used for the first outer slot (all kinds).
  double initial() const;
};

std::string to_string(PenaltyKind kind);

/// rho_t; throws KindError for the adaptive kind, which is tracked per dual.
double penalty_at(const PenaltySchedule& schedule, int t);

/// Keeps rho when eps_cur <= kappa * eps_prev, otherwise multiplies it by
/// sigma. With no previous violation the penalty is unchanged.
double update_adaptive(double rho_prev, std::optional<double> eps_prev, double eps_cur,
                       double kappa, double sigma);

}  // namespace algossip
