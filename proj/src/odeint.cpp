#include "zhopf/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace zhopf {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,     0.0,  500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct Stepper {
    const FlowSpec& flow;
    std::vector<std::vector<double>> k;
    std::vector<double> tmp, x5, x4;

    explicit Stepper(const FlowSpec& f)
        : flow(f), k(7, std::vector<double>(f.dim)), tmp(f.dim), x5(f.dim), x4(f.dim) {}

    // one embedded step; returns the scaled error estimate
    double step(double t, const std::vector<double>& x, double h, std::vector<double>& out) {
        for (int s = 0; s < 7; ++s) {
            tmp = x;
            for (int j = 0; j < s; ++j) {
                if (kA[s][j] == 0.0) continue;
                for (int i = 0; i < flow.dim; ++i) tmp[i] += h * kA[s][j] * k[j][i];
            }
            flow.rhs(t + kC[s] * h, tmp, k[s]);
        }
        double err = 0;
        for (int i = 0; i < flow.dim; ++i) {
            double acc5 = 0, acc4 = 0;
            for (int s = 0; s < 7; ++s) {
                acc5 += kB5[s] * k[s][i];
                acc4 += kB4[s] * k[s][i];
            }
            x5[i] = x[i] + h * acc5;
            x4[i] = x[i] + h * acc4;
            double sc = flow.atol + flow.rtol * std::max(std::abs(x[i]), std::abs(x5[i]));
            double e = (x5[i] - x4[i]) / sc;
            err += e * e;
        }
        out = x5;
        return std::sqrt(err / flow.dim);
    }
};

// integrates with adaptive steps, invoking the callback after every accepted
// step with (t_prev, x_prev, t_new, x_new). The callback may shorten the
// remaining horizon by returning a positive resume time.
void integrate_adaptive(const FlowSpec& flow, std::vector<double>& x, double t0, double t1,
                        const std::function<bool(double, const std::vector<double>&, double,
                                                 const std::vector<double>&)>& on_step) {
    Stepper st(flow);
    double t = t0;
    double h = (t1 - t0) * 1e-3;
    if (h == 0) return;
    const double hmin = std::abs(t1 - t0) * 1e-15;
    std::vector<double> xn(flow.dim);
    long guard = 0;
    while (t < t1) {
        if (++guard > 50'000'000) throw std::runtime_error("integrate: step budget exhausted");
        h = std::min(h, t1 - t);
        double err = st.step(t, x, h, xn);
        for (double v : xn)
            if (!std::isfinite(v)) throw std::runtime_error("integrate: state overflow");
        if (err <= 1.0) {
            double tprev = t;
            std::vector<double> xprev = x;
            t += h;
            x = xn;
            if (on_step && !on_step(tprev, xprev, t, x)) return;
        }
        double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
        if (h < hmin) throw std::runtime_error("integrate: step size underflow");
    }
}

}  // namespace

FlowSpec compile_flow(const PerturbedSystem& sys, const std::vector<Rat>& param_values,
                      double eps) {
    const int n = sys.n();
    // dense linear matrix: rotation + sum eps^j L_j
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    double b = sys.frequency().evaluate(param_values).get_d();
    A[0][1] = -b;
    A[1][0] = b;
    double ej = 1;
    for (int j = 1; j <= sys.k(); ++j) {
        ej *= eps;
        const auto& L = sys.linear(j);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (!L[r][c].is_zero()) A[r][c] += ej * L[r][c].evaluate(param_values).get_d();
    }
    // homogeneous terms: coefficient tables (s, exponents, value)
    struct Mono {
        int row;
        ExpVec e;
        double c;
    };
    std::vector<Mono> monos;
    double ejm = 1;  // eps^j for coefficient slot j
    for (int j = 0; j <= sys.k() - 1; ++j) {
        for (const auto& [idx, coeffs] : sys.homogeneous(j)) {
            for (int s = 0; s < n; ++s) {
                if (coeffs[s].is_zero()) continue;
                monos.push_back({s, idx, ejm * coeffs[s].evaluate(param_values).get_d()});
            }
        }
        ejm *= eps;
    }

    FlowSpec flow;
    flow.dim = n;
    flow.rhs = [n, A, monos](double, const std::vector<double>& x, std::vector<double>& dx) {
        for (int r = 0; r < n; ++r) {
            double acc = 0;
            for (int c = 0; c < n; ++c) acc += A[r][c] * x[c];
            dx[r] = acc;
        }
        for (const auto& m : monos) {
            double t = m.c;
            for (int i = 0; i < n; ++i)
                for (int p = 0; p < m.e[i]; ++p) t *= x[i];
            dx[m.row] += t;
        }
    };
    return flow;
}

std::vector<double> integrate_to(const FlowSpec& flow, std::vector<double> x, double t0,
                                 double t1) {
    integrate_adaptive(flow, x, t0, t1, nullptr);
    return x;
}

std::vector<double> integrate_fixed(const FlowSpec& flow, std::vector<double> x, double t0,
                                    double t1, long steps) {
    Stepper st(flow);
    double h = (t1 - t0) / static_cast<double>(steps);
    std::vector<double> xn(flow.dim);
    for (long i = 0; i < steps; ++i) {
        st.step(t0 + i * h, x, h, xn);
        x = xn;
    }
    return x;
}

PoincareResult poincare_map(const FlowSpec& flow, const Section& section,
                            const std::vector<double>& x0, double t_max, double min_time) {
    auto s_of = [&](const std::vector<double>& x) {
        double v = -section.offset;
        for (int i = 0; i < flow.dim; ++i) v += section.normal[i] * x[i];
        return v;
    };
    std::vector<double> x = x0;
    double t_hit = -1;
    std::vector<double> x_hit;
    integrate_adaptive(
        flow, x, 0.0, t_max,
        [&](double tp, const std::vector<double>& xp, double tn, const std::vector<double>& xn) {
            if (tn < min_time) return true;
            double sp = s_of(xp), sn = s_of(xn);
            bool crossing = section.direction > 0 ? (sp < 0 && sn >= 0) : (sp > 0 && sn <= 0);
            if (!crossing) return true;
            // bisection on the substep time for the crossing instant
            double lo = 0, hi = tn - tp;
            std::vector<double> xs;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                xs = integrate_to(flow, xp, tp, tp + mid);
                double sm = s_of(xs);
                bool before = section.direction > 0 ? sm < 0 : sm > 0;
                if (before)
                    lo = mid;
                else
                    hi = mid;
                if (hi - lo < 1e-10 * std::max(1.0, std::abs(tn))) break;
            }
            t_hit = tp + 0.5 * (lo + hi);
            x_hit = integrate_to(flow, xp, tp, t_hit);
            return false;
        });
    if (t_hit < 0) throw std::runtime_error("poincare_map: no return within the time budget");
    return {x_hit, t_hit};
}

PeriodicOrbit find_periodic(const FlowSpec& flow, const Section& section,
                            std::vector<double> guess, double t_max, double residual_tol,
                            int max_newton) {
    const int n = flow.dim;
    // section-local coordinates: all indices except the dominant normal axis
    int drop = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(section.normal[i]) > std::abs(section.normal[drop])) drop = i;
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
        if (i != drop) keep.push_back(i);
    const int d = static_cast<int>(keep.size());

    auto embed = [&](const std::vector<double>& u) {
        std::vector<double> x(n, 0.0);
        double acc = section.offset;
        for (int i = 0; i < d; ++i) {
            x[keep[i]] = u[i];
            acc -= section.normal[keep[i]] * u[i];
        }
        x[drop] = acc / section.normal[drop];
        return x;
    };
    auto project = [&](const std::vector<double>& x) {
        std::vector<double> u(d);
        for (int i = 0; i < d; ++i) u[i] = x[keep[i]];
        return u;
    };

    double period = 0;
    auto displacement = [&](const std::vector<double>& u) {
        PoincareResult pr = poincare_map(flow, section, embed(u), t_max);
        period = pr.return_time;
        std::vector<double> g = project(pr.point);
        for (int i = 0; i < d; ++i) g[i] -= u[i];
        return g;
    };
    auto norm = [&](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };

    std::vector<double> u = project(guess);
    std::vector<double> g = displacement(u);
    int iterations = 0;
    while (norm(g) > residual_tol) {
        if (++iterations > max_newton) {
            std::ostringstream msg;
            msg << "find_periodic: Newton diverged; last iterate (";
            for (int i = 0; i < d; ++i) msg << (i ? ", " : "") << u[i];
            msg << "), residual " << norm(g);
            throw std::runtime_error(msg.str());
        }
        // forward-difference Jacobian of the displacement
        std::vector<std::vector<double>> J(d, std::vector<double>(d));
        for (int j = 0; j < d; ++j) {
            double h = 1e-7 * std::max(1.0, std::abs(u[j]));
            std::vector<double> up = u;
            up[j] += h;
            std::vector<double> gp = displacement(up);
            for (int i = 0; i < d; ++i) J[i][j] = (gp[i] - g[i]) / h;
        }
        // solve J s = -g
        std::vector<double> s(g);
        for (double& v : s) v = -v;
        {
            std::vector<std::vector<double>> M = J;
            std::vector<int> piv(d);
            for (int i = 0; i < d; ++i) piv[i] = i;
            for (int col = 0; col < d; ++col) {
                int p = col;
                for (int r = col + 1; r < d; ++r)
                    if (std::abs(M[r][col]) > std::abs(M[p][col])) p = r;
                if (M[p][col] == 0) throw std::runtime_error("find_periodic: singular map Jacobian");
                std::swap(M[p], M[col]);
                std::swap(s[p], s[col]);
                for (int r = col + 1; r < d; ++r) {
                    double f = M[r][col] / M[col][col];
                    for (int c = col; c < d; ++c) M[r][c] -= f * M[col][c];
                    s[r] -= f * s[col];
                }
            }
            for (int r = d - 1; r >= 0; --r) {
                for (int c = r + 1; c < d; ++c) s[r] -= M[r][c] * s[c];
                s[r] /= M[r][r];
            }
        }
        // damped update
        double g0 = norm(g);
        double lambda = 1.0;
        std::vector<double> un(d), gn;
        for (int halvings = 0; halvings < 12; ++halvings) {
            for (int i = 0; i < d; ++i) un[i] = u[i] + lambda * s[i];
            gn = displacement(un);
            if (norm(gn) < g0) break;
            lambda *= 0.5;
        }
        u = un;
        g = gn;
    }

    PeriodicOrbit orbit;
    orbit.fixed_point = embed(u);
    orbit.residual = norm(g);
    orbit.newton_iterations = iterations;
    // final period at the fixed point
    PoincareResult pr = poincare_map(flow, section, orbit.fixed_point, t_max);
    orbit.period = pr.return_time;

    // Floquet estimates: eigenvalues of the finite-difference map Jacobian
    std::vector<std::vector<double>> J(d, std::vector<double>(d));
    std::vector<double> base = project(pr.point);
    for (int j = 0; j < d; ++j) {
        double h = 1e-6 * std::max(1.0, std::abs(u[j]));
        std::vector<double> up = u;
        up[j] += h;
        PoincareResult pp = poincare_map(flow, section, embed(up), t_max);
        std::vector<double> mapped = project(pp.point);
        for (int i = 0; i < d; ++i) J[i][j] = (mapped[i] - base[i]) / h;
    }
    if (d == 1) {
        orbit.floquet = {std::complex<double>(J[0][0], 0)};
    } else if (d == 2) {
        double tr = J[0][0] + J[1][1];
        double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4 * det, 0));
        orbit.floquet = {(tr + disc) / 2.0, (tr - disc) / 2.0};
    } else if (d == 3) {
        // characteristic polynomial x^3 - c2 x^2 + c1 x - c0
        double c2 = J[0][0] + J[1][1] + J[2][2];
        double c1 = J[0][0] * J[1][1] - J[0][1] * J[1][0] + J[0][0] * J[2][2] -
                    J[0][2] * J[2][0] + J[1][1] * J[2][2] - J[1][2] * J[2][1];
        double c0 = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                    J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                    J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
        // Durand-Kerner on the cubic
        std::vector<std::complex<double>> r = {{0.4, 0.9}, {-0.8, 0.4}, {0.3, -0.8}};
        auto p = [&](std::complex<double> x) { return ((x - c2) * x + c1) * x - c0; };
        for (int it = 0; it < 200; ++it) {
            for (int i = 0; i < 3; ++i) {
                std::complex<double> denom = 1;
                for (int j = 0; j < 3; ++j)
                    if (j != i) denom *= r[i] - r[j];
                r[i] -= p(r[i]) / denom;
            }
        }
        orbit.floquet = r;
    }
    return orbit;
}

}  // namespace zhopf
