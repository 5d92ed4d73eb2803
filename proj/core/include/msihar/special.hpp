#pragma once

namespace msihar {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation to
// 1e-12 relative tolerance. a, b > 0; x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided tail probability of Student's t with nu degrees of freedom:
// P(|T| >= |t|) = I_{nu/(nu+t^2)}(nu/2, 1/2).
double student_t_two_sided_p(double t, double nu);

}  // namespace msihar
