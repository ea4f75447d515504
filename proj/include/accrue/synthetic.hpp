#pragma once

#include <cstdint>
#include <string>

#include "accrue/dataset.hpp"
#include "accrue/distributions.hpp"

namespace accrue {

/// The six named calibration scenarios plus the gamma misspecification study.
enum class ScenarioId { A, B, C, D, E, F, GammaMisspec };

/// Parameter functions of the scalar input x in [0, 1]:
///   Lin1  0.5x + 0.5        Lin2  -2x + 2.5
///   Trig1 exp(sin(2 pi x))/3  Trig2 cos(2 pi x) + 2
enum class ParamFn { Lin1, Lin2, Trig1, Trig2 };

struct Scenario {
  ScenarioId id;
  Family family;
  ParamFn fn1;
  ParamFn fn2;
};

Scenario scenario_info(ScenarioId id);
std::string scenario_name(ScenarioId id);
ScenarioId scenario_from_name(const std::string& name);

/// Evaluates the named parameter function; x must lie in [0, 1]. All four
/// functions are strictly positive there.
double param_function(ParamFn kind, double x);

/// The true error distribution at input x for scenarios A-F. The asymmetric
/// Laplace scenarios read theta1 as kappa and theta2 as 1/lambda. Rejected
/// for GammaMisspec, whose error is a negated gamma draw, not a member of
/// the learnable families.
DistributionParams true_params(ScenarioId id, double x);

/// n pairs with x uniform on [0, 1], m = 0, and y drawn from the scenario's
/// error distribution (GammaMisspec: y = -Gamma(trig1(x), trig2(x))).
/// Pure in (id, n, seed).
Dataset generate(ScenarioId id, std::size_t n, std::uint64_t seed);

}  // namespace accrue
