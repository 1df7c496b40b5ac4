#pragma once

#include <functional>

#include "mcarl/param_store.hpp"

namespace mcarl {

// Central finite differences against analytic gradients.
//
// `loss` evaluates the scalar loss at the store's current parameter values
// (pure forward, no side effects on the store). `analytic` populates
// store.grad for the same loss (it is invoked once, after zeroing grads).
// Returns max over parameters of |g_a - g_fd| / max(floor, |g_a| + |g_fd|).
// Intended for networks up to ~1e4 parameters.
double finite_diff_check(ParamStore& store,
                         const std::function<double()>& loss,
                         const std::function<void()>& analytic,
                         double h = 1e-5, double floor = 1e-8);

}  // namespace mcarl
