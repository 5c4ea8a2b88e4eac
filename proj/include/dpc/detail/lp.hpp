#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace dpc::detail {

enum class lp_status { optimal, infeasible, unbounded };

struct lp_result {
    lp_status status = lp_status::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    /// Multipliers of the <= rows (nonnegative at an optimum).
    std::vector<double> duals;
    /// Largest violation among primal feasibility, dual feasibility and complementary slackness.
    double kkt_residual = 0.0;
    /// Phase-one optimum (sum of artificials); positive when infeasible.
    double infeasibility = 0.0;
};

using matrix = std::vector<std::vector<double>>;

/// Solves M y = r by Gaussian elimination with partial pivoting. M is consumed.
inline bool solve_dense(matrix m, std::vector<double> r, std::vector<double>& y) {
    const std::size_t n = r.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(m[i][col]) > std::abs(m[piv][col])) piv = i;
        if (std::abs(m[piv][col]) < 1e-300) return false;
        std::swap(m[piv], m[col]);
        std::swap(r[piv], r[col]);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double f = m[i][col] / m[col][col];
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) m[i][j] -= f * m[col][j];
            r[i] -= f * r[col];
        }
    }
    y.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = r[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= m[i][j] * y[j];
        y[i] = acc / m[i][i];
    }
    return true;
}

/// Dense two-phase tableau simplex with Bland's rule for
///   min c'x  s.t.  A x <= b,  x >= 0.
/// Sized for the handful of variables in the power-design problems.
class simplex {
public:
    simplex(std::vector<double> c, matrix a, std::vector<double> b)
        : c_(std::move(c)), a_(std::move(a)), b_(std::move(b)) {}

    lp_result solve(double tol = 1e-11) {
        const std::size_t m = a_.size();
        const std::size_t n = c_.size();
        // Columns: n structural, m slacks, m artificials, then the rhs.
        n_cols_ = n + 2 * m;
        t_.assign(m, std::vector<double>(n_cols_ + 1, 0.0));
        basis_.assign(m, 0);
        sign_.assign(m, 1.0);
        for (std::size_t i = 0; i < m; ++i) {
            sign_[i] = b_[i] < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n; ++j) t_[i][j] = sign_[i] * a_[i][j];
            t_[i][n + i] = sign_[i];
            t_[i][n + m + i] = 1.0;
            t_[i][n_cols_] = sign_[i] * b_[i];
            basis_[i] = n + m + i;
        }

        std::vector<double> phase1(n_cols_, 0.0);
        for (std::size_t i = 0; i < m; ++i) phase1[n + m + i] = 1.0;
        allowed_ = n_cols_;
        run(phase1, tol);

        lp_result out;
        out.infeasibility = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (basis_[i] >= n + m) out.infeasibility += t_[i][n_cols_];
        if (out.infeasibility > 1e-9 * (1.0 + max_abs_rhs())) {
            out.status = lp_status::infeasible;
            return out;
        }
        // Pivot zero-level artificials out where possible.
        for (std::size_t i = 0; i < m; ++i) {
            if (basis_[i] < n + m) continue;
            for (std::size_t j = 0; j < n + m; ++j) {
                if (std::abs(t_[i][j]) > tol) {
                    pivot(i, j);
                    break;
                }
            }
        }

        std::vector<double> phase2(n_cols_, 0.0);
        for (std::size_t j = 0; j < n; ++j) phase2[j] = c_[j];
        allowed_ = n + m;
        if (!run(phase2, tol)) {
            out.status = lp_status::unbounded;
            return out;
        }

        out.status = lp_status::optimal;
        out.x.assign(n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            if (basis_[i] < n) out.x[basis_[i]] = t_[i][n_cols_];
        out.objective = 0.0;
        for (std::size_t j = 0; j < n; ++j) out.objective += c_[j] * out.x[j];
        kkt(out);
        return out;
    }

private:
    double max_abs_rhs() const {
        double mx = 0.0;
        for (double v : b_) mx = std::max(mx, std::abs(v));
        return mx;
    }

    void pivot(std::size_t row, std::size_t col) {
        auto& pr = t_[row];
        const double p = pr[col];
        for (double& v : pr) v /= p;
        for (std::size_t i = 0; i < t_.size(); ++i) {
            if (i == row) continue;
            const double f = t_[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_cols_; ++j) t_[i][j] -= f * pr[j];
        }
        basis_[row] = col;
    }

    /// Returns false on unboundedness.
    bool run(const std::vector<double>& cost, double tol) {
        const std::size_t m = t_.size();
        for (std::size_t iter = 0; iter < 100000; ++iter) {
            // Reduced costs d_j = c_j - c_B' B^-1 A_j, read off the tableau.
            std::size_t enter = n_cols_;
            for (std::size_t j = 0; j < allowed_; ++j) {
                if (std::find(basis_.begin(), basis_.end(), j) != basis_.end()) continue;
                double d = cost[j];
                for (std::size_t i = 0; i < m; ++i) d -= cost[basis_[i]] * t_[i][j];
                if (d < -tol) {
                    enter = j;
                    break;
                }
            }
            if (enter == n_cols_) return true;
            std::size_t leave = m;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                if (t_[i][enter] <= tol) continue;
                const double ratio = t_[i][n_cols_] / t_[i][enter];
                if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis_[i] < basis_[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == m) return false;
            pivot(leave, enter);
        }
        return false;
    }

    /// Recomputes multipliers from the final basis and measures the KKT residual
    /// of the original inequality problem.
    void kkt(lp_result& out) const {
        const std::size_t m = a_.size();
        const std::size_t n = c_.size();
        auto column = [&](std::size_t j) {
            std::vector<double> col(m, 0.0);
            if (j < n) {
                for (std::size_t i = 0; i < m; ++i) col[i] = a_[i][j];
            } else if (j < n + m) {
                col[j - n] = 1.0;
            } else {
                col[j - n - m] = sign_[j - n - m];
            }
            return col;
        };
        auto cost = [&](std::size_t j) { return j < n ? c_[j] : 0.0; };
        // B' y = c_B
        matrix bt(m, std::vector<double>(m, 0.0));
        std::vector<double> cb(m, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            const auto col = column(basis_[r]);
            for (std::size_t i = 0; i < m; ++i) bt[r][i] = col[i];
            cb[r] = cost(basis_[r]);
        }
        std::vector<double> y;
        if (!solve_dense(bt, cb, y)) {
            out.kkt_residual = std::numeric_limits<double>::infinity();
            return;
        }
        // Full primal point including slacks.
        std::vector<double> slack(m, 0.0);
        double resid = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double ax = 0.0;
            for (std::size_t j = 0; j < n; ++j) ax += a_[i][j] * out.x[j];
            slack[i] = b_[i] - ax;
            resid = std::max(resid, -slack[i]);
        }
        for (double v : out.x) resid = std::max(resid, -v);
        out.duals.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) out.duals[i] = -y[i];
        for (std::size_t j = 0; j < n + m; ++j) {
            const auto col = column(j);
            double d = cost(j);
            for (std::size_t i = 0; i < m; ++i) d -= col[i] * y[i];
            const double xj = j < n ? out.x[j] : slack[j - n];
            resid = std::max(resid, -d);
            resid = std::max(resid, std::abs(d * xj));
        }
        out.kkt_residual = resid;
    }

    std::vector<double> c_;
    matrix a_;
    std::vector<double> b_;
    matrix t_;
    std::vector<std::size_t> basis_;
    std::vector<double> sign_;
    std::size_t n_cols_ = 0;
    std::size_t allowed_ = 0;
};

inline lp_result solve_lp(std::vector<double> c, matrix a, std::vector<double> b) {
    return simplex(std::move(c), std::move(a), std::move(b)).solve();
}

} // namespace dpc::detail
