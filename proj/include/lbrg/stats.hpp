#pragma once

namespace lbrg {

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction,
// targeting ~1e-12 accuracy. Requires a, b > 0 and x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p-value of a Student-t statistic with `dof` degrees of freedom:
// p = I_{dof/(dof + t^2)}(dof/2, 1/2).
double student_t_two_sided_p(double t, double dof);

}  // namespace lbrg
