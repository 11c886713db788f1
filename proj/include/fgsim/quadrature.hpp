#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "fgsim/errors.hpp"

namespace fgsim {

struct GaussLegendre {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre rule by Newton iteration on the Legendre polynomial,
// seeded with the Chebyshev-like asymptotic roots. Deterministic and exact
// to machine precision for the modest orders used here.
inline GaussLegendre gauss_legendre(int n) {
    if (n < 1 || n > 512) throw ParameterError("gauss_legendre: order must be in [1, 512]");
    GaussLegendre q;
    q.x.resize(n);
    q.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Recurrence for P_n(x) and its derivative.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        q.x[i] = -x;
        q.x[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        q.w[i] = w;
        q.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) q.x[n / 2] = 0.0;
    return q;
}

// Map a [-1,1] rule onto [a,b].
inline GaussLegendre gauss_legendre_on(int n, double a, double b) {
    GaussLegendre q = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        q.x[i] = mid + half * q.x[i];
        q.w[i] *= half;
    }
    return q;
}

}  // namespace fgsim
