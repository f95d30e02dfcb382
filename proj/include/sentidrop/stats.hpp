#pragma once

namespace sentidrop::stats {

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
// Continued-fraction evaluation, absolute accuracy well below 1e-10.
double incomplete_beta(double a, double b, double x);

// Two-sided p-value of the Student-t distribution: P(|T| >= |t|) with df
// degrees of freedom, via I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

double sigmoid(double z);

}  // namespace sentidrop::stats
