#include "least_squares.hpp"

#include <Eigen/Core>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace agni::detail {

namespace {

struct Functor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const ResidualFn* fn;
  int n_inputs;
  int n_values;

  int inputs() const { return n_inputs; }
  int values() const { return n_values; }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    (*fn)(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
          std::span<double>(fvec.data(), static_cast<std::size_t>(fvec.size())));
    return 0;
  }
};

}  // namespace

LsqResult least_squares(const ResidualFn& fn, std::vector<double> x0, std::size_t num_residuals,
                        int max_evaluations) {
  Functor f{&fn, static_cast<int>(x0.size()), static_cast<int>(num_residuals)};
  Eigen::NumericalDiff<Functor> diff(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Functor>> lm(diff);
  lm.parameters.maxfev = max_evaluations;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-12;

  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  const auto status = lm.minimize(x);

  LsqResult out;
  out.x.assign(x.data(), x.data() + x.size());
  out.residuals.resize(num_residuals);
  fn(out.x, out.residuals);
  out.status = static_cast<int>(status);
  out.evaluations = static_cast<int>(lm.nfev);
  using S = Eigen::LevenbergMarquardtSpace::Status;
  out.converged = status == S::RelativeReductionTooSmall || status == S::RelativeErrorTooSmall ||
                  status == S::RelativeErrorAndReductionTooSmall || status == S::CosinusTooSmall ||
                  status == S::XtolTooSmall || status == S::FtolTooSmall || status == S::GtolTooSmall;
  return out;
}

}  // namespace agni::detail
