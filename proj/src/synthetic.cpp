#include "accrue/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "accrue/rng.hpp"

namespace accrue {

namespace {

constexpr double kTwoPi = 6.2831853071795864769;

}  // namespace

Scenario scenario_info(ScenarioId id) {
  switch (id) {
    case ScenarioId::A:
      return {id, Family::TwoPieceGaussian, ParamFn::Lin1, ParamFn::Lin2};
    case ScenarioId::B:
      return {id, Family::TwoPieceGaussian, ParamFn::Trig1, ParamFn::Trig2};
    case ScenarioId::C:
      return {id, Family::TwoPieceGaussian, ParamFn::Lin1, ParamFn::Trig2};
    case ScenarioId::D:
      return {id, Family::AsymmetricLaplace, ParamFn::Lin1, ParamFn::Lin2};
    case ScenarioId::E:
      return {id, Family::AsymmetricLaplace, ParamFn::Trig1, ParamFn::Trig2};
    case ScenarioId::F:
      return {id, Family::AsymmetricLaplace, ParamFn::Lin1, ParamFn::Trig2};
    case ScenarioId::GammaMisspec:
      return {id, Family::Gamma, ParamFn::Trig1, ParamFn::Trig2};
  }
  throw std::invalid_argument("scenario_info: unknown scenario");
}

std::string scenario_name(ScenarioId id) {
  switch (id) {
    case ScenarioId::A: return "A";
    case ScenarioId::B: return "B";
    case ScenarioId::C: return "C";
    case ScenarioId::D: return "D";
    case ScenarioId::E: return "E";
    case ScenarioId::F: return "F";
    case ScenarioId::GammaMisspec: return "GammaMisspec";
  }
  throw std::invalid_argument("scenario_name: unknown scenario");
}

ScenarioId scenario_from_name(const std::string& name) {
  if (name == "A") return ScenarioId::A;
  if (name == "B") return ScenarioId::B;
  if (name == "C") return ScenarioId::C;
  if (name == "D") return ScenarioId::D;
  if (name == "E") return ScenarioId::E;
  if (name == "F") return ScenarioId::F;
  if (name == "GammaMisspec") return ScenarioId::GammaMisspec;
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

double param_function(ParamFn kind, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("param_function: x must lie in [0, 1]");
  }
  switch (kind) {
    case ParamFn::Lin1: return 0.5 * x + 0.5;
    case ParamFn::Lin2: return -2.0 * x + 2.5;
    case ParamFn::Trig1: return std::exp(std::sin(kTwoPi * x)) / 3.0;
    case ParamFn::Trig2: return std::cos(kTwoPi * x) + 2.0;
  }
  throw std::invalid_argument("param_function: unknown kind");
}

DistributionParams true_params(ScenarioId id, double x) {
  const Scenario sc = scenario_info(id);
  const double theta1 = param_function(sc.fn1, x);
  const double theta2 = param_function(sc.fn2, x);
  switch (sc.family) {
    case Family::TwoPieceGaussian:
      return tpg_params(theta1, theta2);
    case Family::AsymmetricLaplace:
      // theta2 parameterizes the scale as 1/lambda.
      return al_params(1.0 / theta2, theta1);
    default:
      throw std::invalid_argument(
          "true_params: scenario has no learnable error distribution");
  }
}

Dataset generate(ScenarioId id, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate: n must be positive");
  const Scenario sc = scenario_info(id);
  Rng rng(seed);
  Dataset out;
  out.records.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    PairRecord rec;
    rec.x = {rng.uniform01()};
    rec.m = 0.0;
    if (sc.family == Family::Gamma) {
      const double alpha = param_function(sc.fn1, rec.x[0]);
      const double beta = param_function(sc.fn2, rec.x[0]);
      rec.y = rec.m - gamma_sample(alpha, beta, rng);
    } else {
      rec.y = rec.m + sample(true_params(id, rec.x[0]), rng);
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace accrue
