#include "mcarl/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace mcarl {

double finite_diff_check(ParamStore& store,
                         const std::function<double()>& loss,
                         const std::function<void()>& analytic, double h,
                         double floor) {
  store.zero_grad();
  analytic();
  const Eigen::VectorXd g_analytic = store.flatten_grads();
  store.zero_grad();

  const Eigen::VectorXd base = store.flatten_values();
  Eigen::VectorXd perturbed = base;
  double max_err = 0.0;
  for (Eigen::Index k = 0; k < base.size(); ++k) {
    perturbed(k) = base(k) + h;
    store.unflatten_values(perturbed);
    const double up = loss();
    perturbed(k) = base(k) - h;
    store.unflatten_values(perturbed);
    const double down = loss();
    perturbed(k) = base(k);
    const double g_fd = (up - down) / (2.0 * h);
    const double denom =
        std::max(floor, std::abs(g_analytic(k)) + std::abs(g_fd));
    max_err = std::max(max_err, std::abs(g_analytic(k) - g_fd) / denom);
  }
  store.unflatten_values(base);
  return max_err;
}

}  // namespace mcarl
