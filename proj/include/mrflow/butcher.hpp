#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrflow {

/// Coefficients (a, b, c) of one explicit Runge-Kutta method or of one
/// partition of a multirate scheme. `a` is strictly lower triangular,
/// `b` the quadrature weights, `c` the stage abscissae (fractions of dt).
/// Immutable by convention after construction; safe to share across threads.
struct ButcherTableau {
    int stages = 0;
    std::vector<double> a;  // stages x stages, row-major
    std::vector<double> b;
    std::vector<double> c;

    static ButcherTableau zeros(int s) {
        ButcherTableau t;
        t.stages = s;
        t.a.assign(static_cast<std::size_t>(s) * s, 0.0);
        t.b.assign(s, 0.0);
        t.c.assign(s, 0.0);
        return t;
    }

    double& aref(int i, int j) { return a[static_cast<std::size_t>(i) * stages + j]; }
    double aat(int i, int j) const { return a[static_cast<std::size_t>(i) * stages + j]; }

    bool strictly_lower_triangular() const {
        for (int i = 0; i < stages; ++i)
            for (int j = i; j < stages; ++j)
                if (aat(i, j) != 0.0) return false;
        return true;
    }

    double row_sum(int i) const {
        double s = 0.0;
        for (int j = 0; j < stages; ++j) s += aat(i, j);
        return s;
    }

    /// Largest |c_i - sum_j a_ij| over all rows.
    double row_sum_defect() const {
        double d = 0.0;
        for (int i = 0; i < stages; ++i) d = std::max(d, std::fabs(c[i] - row_sum(i)));
        return d;
    }

    double weight_sum() const {
        double s = 0.0;
        for (double bi : b) s += bi;
        return s;
    }

    /// b . c, equal to 1/2 for second-order methods.
    double weighted_abscissa() const {
        double s = 0.0;
        for (int i = 0; i < stages; ++i) s += b[i] * c[i];
        return s;
    }
};

/// Two-stage explicit trapezoidal method: a21 = 1, b = (1/2, 1/2), c = (0, 1).
inline ButcherTableau base_rk2() {
    ButcherTableau t = ButcherTableau::zeros(2);
    t.aref(1, 0) = 1.0;
    t.b = {0.5, 0.5};
    t.c = {0.0, 1.0};
    return t;
}

/// Classical four-stage fourth-order method, used as the reference integrator.
inline ButcherTableau classic_rk4() {
    ButcherTableau t = ButcherTableau::zeros(4);
    t.aref(1, 0) = 0.5;
    t.aref(2, 1) = 0.5;
    t.aref(3, 2) = 1.0;
    t.b = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
    t.c = {0.0, 0.5, 0.5, 1.0};
    return t;
}

/// The fast / slow-buffer / slow partition tableaus of a multirate
/// partitioned RK scheme with rate ratio m. All three have m*s stages.
struct MprkTableauSet {
    ButcherTableau fast;
    ButcherTableau buffer;
    ButcherTableau slow;
    int m = 1;  // rate ratio (slow step = m * fast step)
    int s = 0;  // stage count of the base method
};

/// Builds the three partition tableaus from an explicit base method.
///
/// fast:   m subcycles of the base method scaled by 1/m; completed subcycles
///         enter later ones through their weights (strictly-lower blocks are
///         ones*b^T/m).
/// buffer: block diagonal with m unscaled copies of the base a-matrix.
/// slow:   the base rows zero-padded to m*s columns; rows beyond s repeat
///         row ((i-1) mod s)+1, so only the first s stage values are distinct.
inline MprkTableauSet generate_mprk(const ButcherTableau& base, int m) {
    if (m < 1) throw std::invalid_argument("generate_mprk: rate ratio m must be >= 1");
    if (base.stages < 1) throw std::invalid_argument("generate_mprk: empty base tableau");
    if (!base.strictly_lower_triangular())
        throw std::invalid_argument("generate_mprk: base method must be explicit "
                                    "(strictly lower triangular a)");

    const int s = base.stages;
    const int n = m * s;
    MprkTableauSet set;
    set.m = m;
    set.s = s;

    ButcherTableau fast = ButcherTableau::zeros(n);
    ButcherTableau buffer = ButcherTableau::zeros(n);
    ButcherTableau slow = ButcherTableau::zeros(n);

    for (int kb = 0; kb < m; ++kb) {
        for (int i = 0; i < s; ++i) {
            const int row = kb * s + i;
            for (int lb = 0; lb <= kb; ++lb) {
                for (int j = 0; j < s; ++j) {
                    const int col = lb * s + j;
                    if (col >= row) continue;
                    fast.aref(row, col) = (lb == kb) ? base.aat(i, j) / m : base.b[j] / m;
                    if (lb == kb) buffer.aref(row, col) = base.aat(i, j);
                }
            }
            fast.b[row] = base.b[i] / m;
            fast.c[row] = (kb + base.c[i]) / m;
            buffer.b[row] = base.b[i] / m;
            buffer.c[row] = base.c[i];
            slow.c[row] = base.c[i];
            slow.b[row] = (kb == 0) ? base.b[i] : 0.0;
            const int src = i;  // row (row mod s) of the base method
            for (int j = 0; j < s; ++j) slow.aref(row, j) = base.aat(src, j);
        }
    }

    set.fast = std::move(fast);
    set.buffer = std::move(buffer);
    set.slow = std::move(slow);
    return set;
}

/// Coefficients p_0..p_stages of the stability polynomial R(z) = sum p_k z^k
/// obtained by applying the tableau to y' = lambda*y, z = lambda*dt.
inline std::vector<double> stability_polynomial(const ButcherTableau& t) {
    const int s = t.stages;
    std::vector<std::vector<double>> k(s, std::vector<double>(s + 1, 0.0));
    for (int i = 0; i < s; ++i) {
        k[i][0] = 1.0;
        for (int j = 0; j < i; ++j) {
            const double a = t.aat(i, j);
            if (a == 0.0) continue;
            for (int d = 0; d < s; ++d) k[i][d + 1] += a * k[j][d];
        }
    }
    std::vector<double> r(s + 1, 0.0);
    r[0] = 1.0;
    for (int i = 0; i < s; ++i) {
        if (t.b[i] == 0.0) continue;
        for (int d = 0; d < s; ++d) r[d + 1] += t.b[i] * k[i][d];
    }
    return r;
}

inline std::vector<double> poly_multiply(const std::vector<double>& a,
                                         const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

inline std::vector<double> poly_power(const std::vector<double>& p, int n) {
    std::vector<double> r{1.0};
    for (int i = 0; i < n; ++i) r = poly_multiply(r, p);
    return r;
}

/// Aligned plain-text Butcher array (c | a rows, rule, b row) for debugging.
inline std::string format_tableau(const ButcherTableau& t) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%10.6g", v);
        return std::string(buf);
    };
    std::string out;
    for (int i = 0; i < t.stages; ++i) {
        out += fmt(t.c[i]) + " |";
        for (int j = 0; j < t.stages; ++j) out += fmt(t.aat(i, j));
        out += '\n';
    }
    out += std::string(10, '-') + " +" + std::string(10 * static_cast<std::size_t>(t.stages), '-') + '\n';
    out += std::string(10, ' ') + " |";
    for (int j = 0; j < t.stages; ++j) out += fmt(t.b[j]);
    out += '\n';
    return out;
}

}  // namespace mrflow
