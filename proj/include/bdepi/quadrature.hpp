#ifndef BDEPI_QUADRATURE_HPP_
#define BDEPI_QUADRATURE_HPP_

#include <functional>
#include <stdexcept>

namespace bdepi {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
};

/// Thrown when the adaptive scheme cannot reach the requested tolerance;
/// carries the best value and the achieved error estimate.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadratureResult best)
      : std::runtime_error(what), best_(best) {}
  const QuadratureResult& best() const { return best_; }

 private:
  QuadratureResult best_;
};

/// Adaptive integration of f over [a, b] (GSL QAGS; handles integrable
/// endpoint singularities such as the Burr density with shape a < 1).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-10, double rel_tol = 1e-8);

}  // namespace bdepi

#endif  // BDEPI_QUADRATURE_HPP_
