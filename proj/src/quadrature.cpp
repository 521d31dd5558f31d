#include "bdepi/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <memory>
#include <mutex>
#include <string>

namespace bdepi {

namespace {

double trampoline(double x, void* params) {
  return (*static_cast<const std::function<double(double)>*>(params))(x);
}

void disable_gsl_abort() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol) {
  disable_gsl_abort();
  constexpr size_t kLimit = 1024;
  std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
      gsl_integration_workspace_alloc(kLimit), gsl_integration_workspace_free);
  if (!ws) throw std::bad_alloc();

  gsl_function gf;
  gf.function = &trampoline;
  gf.params = const_cast<std::function<double(double)>*>(&f);

  QuadratureResult out;
  const int status =
      gsl_integration_qags(&gf, a, b, abs_tol, rel_tol, kLimit, ws.get(), &out.value, &out.abs_error);
  if (status != GSL_SUCCESS) {
    throw QuadratureError("quadrature did not converge (" + std::string(gsl_strerror(status)) +
                              "), achieved error estimate " + std::to_string(out.abs_error),
                          out);
  }
  return out;
}

}  // namespace bdepi
