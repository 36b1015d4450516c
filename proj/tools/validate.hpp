#pragma once

#include <ostream>

namespace qsl {

// Prints one PASS/FAIL/INFO line per check and returns the failure count.
// `oracle_tol` bounds the closed-form vs integrator disagreement.
int run_validation_suite(double oracle_tol, std::ostream& os);

}  // namespace qsl
