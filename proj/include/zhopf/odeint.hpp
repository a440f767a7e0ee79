#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "zhopf/perturbed_system.hpp"

namespace zhopf {

// Right-hand side wrapper for numeric integration.
struct FlowSpec {
    int dim = 0;
    std::function<void(double, const std::vector<double>&, std::vector<double>&)> rhs;
    double rtol = 1e-12;
    double atol = 1e-12;
};

// Instantiates the polynomial vector field at numeric parameter values and a
// numeric perturbation size.
FlowSpec compile_flow(const PerturbedSystem& sys, const std::vector<Rat>& param_values,
                      double eps);

// Adaptive Dormand-Prince 5(4) integration from t0 to t1.
std::vector<double> integrate_to(const FlowSpec& flow, std::vector<double> x, double t0, double t1);

// Fixed-step variant of the same tableau (for convergence studies).
std::vector<double> integrate_fixed(const FlowSpec& flow, std::vector<double> x, double t0,
                                    double t1, long steps);

// Oriented hyperplane section: crossings with normal.x == offset and
// d(normal.x)/dt of the requested sign.
struct Section {
    std::vector<double> normal;
    double offset = 0;
    int direction = +1;
};

struct PoincareResult {
    std::vector<double> point;
    double return_time = 0;
};

// First return to the section (event detection with bisection refinement of
// the crossing time). Throws when no crossing happens within t_max.
PoincareResult poincare_map(const FlowSpec& flow, const Section& section,
                            const std::vector<double>& x0, double t_max,
                            double min_time = 1e-6);

struct PeriodicOrbit {
    std::vector<double> fixed_point;  // on the section
    double period = 0;
    double residual = 0;              // displacement norm at the fixed point
    std::vector<std::complex<double>> floquet;  // map-Jacobian eigenvalues (diagnostic)
    int newton_iterations = 0;
};

// Damped Newton on the Poincare displacement, seeded at guess (a full state
// on the section). Throws on Newton divergence, reporting the last iterate
// in the message.
PeriodicOrbit find_periodic(const FlowSpec& flow, const Section& section,
                            std::vector<double> guess, double t_max,
                            double residual_tol = 1e-8, int max_newton = 60);

}  // namespace zhopf
