#include "d2d/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace d2d::oracle {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_eigen(const SquareMatrix& m)
{
    MatrixXd out(m.size(), m.size());
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < m.size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
    return out;
}

std::vector<double> to_vector(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void check_sizes(std::span<const double> gamma_tgt, const Instance& inst)
{
    if (inst.gain.size() != inst.size() || gamma_tgt.size() != inst.size())
        throw std::invalid_argument("oracle: dimension mismatch");
}

/// (I - diag(gamma) F) and diag(gamma) eta' in Eigen form.
std::pair<MatrixXd, VectorXd> power_system(std::span<const double> gamma_tgt, const Instance& inst)
{
    const auto n = static_cast<Eigen::Index>(inst.size());
    MatrixXd a = MatrixXd::Identity(n, n);
    VectorXd b(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        const double gll = inst.gain(ul, ul);
        for (Eigen::Index m = 0; m < n; ++m)
            if (m != l)
                a(l, m) = -gamma_tgt[ul] * inst.gain(ul, static_cast<std::size_t>(m)) / gll;
        b(l) = gamma_tgt[ul] * inst.noise[ul] / gll;
    }
    return {a, b};
}

bool all_positive(const VectorXd& v)
{
    return (v.array() > 0.0).all() && v.allFinite();
}

} // namespace

double spectral_radius(const SquareMatrix& a)
{
    const std::size_t n = a.size();
    if (n == 0)
        return 0.0;
    // B = A + I is primitive when A is nonnegative, so the iteration converges
    // and the Collatz-Wielandt ratios bracket rho(B) = rho(A) + 1.
    std::vector<double> x(n, 1.0), y(n);
    double lo = 0.0, hi = 0.0;
    for (int it = 0; it < 200; ++it) {
        for (std::size_t r = 0; r < n; ++r) {
            double s = x[r];
            for (std::size_t c = 0; c < n; ++c)
                s += a(r, c) * x[c];
            y[r] = s;
        }
        lo = std::numeric_limits<double>::infinity();
        hi = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double ratio = y[r] / x[r];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        const double norm = *std::max_element(y.begin(), y.end());
        for (std::size_t r = 0; r < n; ++r)
            x[r] = y[r] / norm;
        if (hi - lo < 1e-10)
            return 0.5 * (lo + hi) - 1.0;
    }
    // Slow separation between the leading eigenvalues: fall back to a dense
    // eigenvalue solve.
    Eigen::EigenSolver<MatrixXd> es(to_eigen(a), false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

SquareMatrix normalized_gain(std::span<const double> gamma_tgt, const Instance& inst)
{
    check_sizes(gamma_tgt, inst);
    const std::size_t n = inst.size();
    SquareMatrix out(n);
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t m = 0; m < n; ++m)
            if (m != l)
                out(l, m) = gamma_tgt[l] * inst.gain(l, m) / inst.gain(l, l);
    return out;
}

FeasibilityReport check_feasibility(std::span<const double> gamma_tgt, const Instance& inst)
{
    FeasibilityReport rep;
    rep.spectral_radius = spectral_radius(normalized_gain(gamma_tgt, inst));
    if (rep.spectral_radius >= 1.0)
        return rep;
    const auto [a, b] = power_system(gamma_tgt, inst);
    const VectorXd p = a.partialPivLu().solve(b);
    if (!all_positive(p))
        return rep;
    rep.feasible = true;
    rep.power = to_vector(p);
    return rep;
}

std::vector<double> solve_power_fixed_point(std::span<const double> gamma_tgt, const Instance& inst)
{
    auto rep = check_feasibility(gamma_tgt, inst);
    if (!rep.feasible)
        throw InfeasibleError("SINR targets infeasible (spectral radius " + std::to_string(rep.spectral_radius) + ")");
    return rep.power;
}

std::vector<double> solve_mu_fixed_point(std::span<const double> gamma_tgt, const Instance& inst)
{
    check_sizes(gamma_tgt, inst);
    const auto n = static_cast<Eigen::Index>(inst.size());
    // mu_l G_ll = gamma_l (sigma_l + sum_k G_kl sigma_l / sigma_k mu_k); with
    // nu = mu / sigma: G_ll nu_l - gamma_l sum_k G_kl nu_k = gamma_l.
    MatrixXd a = MatrixXd::Zero(n, n);
    VectorXd b(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        a(l, l) = inst.gain(ul, ul);
        for (Eigen::Index k = 0; k < n; ++k)
            if (k != l)
                a(l, k) = -gamma_tgt[ul] * inst.gain(static_cast<std::size_t>(k), ul);
        b(l) = gamma_tgt[ul];
    }
    const double radius = spectral_radius(normalized_gain(gamma_tgt, inst));
    const VectorXd nu = a.partialPivLu().solve(b);
    if (radius >= 1.0 || !all_positive(nu))
        throw InfeasibleError("reverse-link targets infeasible (spectral radius " + std::to_string(radius) + ")");
    std::vector<double> mu(inst.size());
    for (std::size_t l = 0; l < mu.size(); ++l)
        mu[l] = nu(static_cast<Eigen::Index>(l)) * inst.noise[l];
    return mu;
}

LpData build_lp(std::span<const double> gamma_tgt, const Instance& inst, double omega)
{
    check_sizes(gamma_tgt, inst);
    const std::size_t n = inst.size();
    LpData lp;
    lp.h = SquareMatrix(n);
    lp.eta.resize(n);
    lp.omega = omega;
    for (std::size_t l = 0; l < n; ++l) {
        const double gll = inst.gain(l, l);
        for (std::size_t m = 0; m < n; ++m)
            lp.h(l, m) = m == l ? -1.0 : gamma_tgt[l] * inst.gain(l, m) / gll;
        lp.eta[l] = gamma_tgt[l] * inst.noise[l] / gll;
    }
    return lp;
}

DualityReport lp_duality_check(std::span<const double> p, std::span<const double> lambda_lp, const LpData& lp, double tol)
{
    const std::size_t n = lp.eta.size();
    if (p.size() != n || lambda_lp.size() != n)
        throw std::invalid_argument("lp_duality_check: dimension mismatch");
    DualityReport rep;
    const double primal = lp.omega * std::accumulate(p.begin(), p.end(), 0.0);
    double dual = 0.0;
    for (std::size_t l = 0; l < n; ++l)
        dual += lp.eta[l] * lambda_lp[l];
    rep.gap = std::abs(primal - dual) / std::max(1.0, primal);
    rep.relative_gap = primal > 0.0 ? std::abs(primal - dual) / primal : std::abs(primal - dual);

    // Primal rows are compared relative to eta, which carries the scale of p.
    for (std::size_t l = 0; l < n; ++l) {
        double row = lp.eta[l];
        for (std::size_t m = 0; m < n; ++m)
            row += lp.h(l, m) * p[m];
        rep.max_primal_violation = std::max(rep.max_primal_violation, row / lp.eta[l]);
        rep.max_primal_violation = std::max(rep.max_primal_violation, -p[l] / lp.eta[l]);
    }
    // Dual rows in the normalized form lambda_l/omega - sum_k H_kl lambda_k/omega <= 1.
    for (std::size_t l = 0; l < n; ++l) {
        double row = lambda_lp[l] / lp.omega;
        for (std::size_t k = 0; k < n; ++k)
            if (k != l)
                row -= lp.h(k, l) * lambda_lp[k] / lp.omega;
        rep.max_dual_violation = std::max(rep.max_dual_violation, row - 1.0);
        rep.max_dual_violation = std::max(rep.max_dual_violation, -lambda_lp[l] / lp.omega);
    }
    rep.primal_feasible = rep.max_primal_violation <= tol;
    rep.dual_feasible = rep.max_dual_violation <= tol;
    return rep;
}

std::vector<double> lp_dual_equality(const LpData& lp)
{
    const MatrixXd h = to_eigen(lp.h);
    const VectorXd rhs = VectorXd::Constant(h.rows(), -lp.omega);
    return to_vector(h.transpose().partialPivLu().solve(rhs));
}

namespace {

/// max c'x s.t. A x <= b over all vertices given by n active rows.
std::pair<VectorXd, double> enumerate_vertices(const MatrixXd& a, const VectorXd& b, const VectorXd& c)
{
    const auto rows = a.rows();
    const auto n = a.cols();
    if (n > 3)
        throw std::length_error("vertex enumeration limited to 3 variables");
    const double scale = std::max(1e-300, b.cwiseAbs().maxCoeff());
    std::vector<int> pick(static_cast<std::size_t>(n));
    VectorXd best;
    double best_val = -std::numeric_limits<double>::infinity();

    std::function<void(Eigen::Index, Eigen::Index)> rec = [&](Eigen::Index start, Eigen::Index depth) {
        if (depth == n) {
            MatrixXd m(n, n);
            VectorXd r(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                m.row(i) = a.row(pick[static_cast<std::size_t>(i)]);
                r(i) = b(pick[static_cast<std::size_t>(i)]);
            }
            Eigen::FullPivLU<MatrixXd> lu(m);
            if (!lu.isInvertible())
                return;
            const VectorXd x = lu.solve(r);
            if (((a * x - b).array() > 1e-9 * scale).any())
                return;
            const double v = c.dot(x);
            if (v > best_val) {
                best_val = v;
                best = x;
            }
            return;
        }
        for (Eigen::Index i = start; i < rows; ++i) {
            pick[static_cast<std::size_t>(depth)] = static_cast<int>(i);
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    if (best.size() == 0)
        throw InfeasibleError("LP has no feasible vertex");
    return {best, best_val};
}

} // namespace

LpSolution lp_enumerate(const LpData& lp)
{
    const auto n = static_cast<Eigen::Index>(lp.eta.size());
    const MatrixXd h = to_eigen(lp.h);
    const VectorXd eta = Eigen::Map<const VectorXd>(lp.eta.data(), n);

    // Primal: min omega 1'p s.t. H p <= -eta, -p <= 0.
    MatrixXd ap(2 * n, n);
    ap << h, -MatrixXd::Identity(n, n);
    VectorXd bp(2 * n);
    bp << -eta, VectorXd::Zero(n);
    const auto [p, neg_primal] = enumerate_vertices(ap, bp, VectorXd::Constant(n, -lp.omega));

    // Dual: max eta'lambda s.t. -H' lambda <= omega 1, -lambda <= 0.
    MatrixXd ad(2 * n, n);
    ad << -h.transpose(), -MatrixXd::Identity(n, n);
    VectorXd bd(2 * n);
    bd << VectorXd::Constant(n, lp.omega), VectorXd::Zero(n);
    const auto [lambda, dual_val] = enumerate_vertices(ad, bd, eta);

    LpSolution sol;
    sol.primal = to_vector(p);
    sol.dual = to_vector(lambda);
    sol.primal_objective = -neg_primal;
    sol.dual_objective = dual_val;
    const VectorXd slack = h * p + eta;
    sol.all_constraints_active = (slack.array().abs() <= 1e-9 * eta.cwiseAbs().maxCoeff()).all();
    return sol;
}

double optimal_power_cost(std::span<const double> log_rate, const Instance& inst, double omega)
{
    std::vector<double> gamma(log_rate.size());
    for (std::size_t l = 0; l < gamma.size(); ++l)
        gamma[l] = std::exp2(std::exp(log_rate[l]) / inst.bandwidth) - 1.0;
    const auto p = solve_power_fixed_point(gamma, inst);
    return omega * std::accumulate(p.begin(), p.end(), 0.0);
}

std::vector<double> finite_diff_envelope(std::span<const double> log_rate, const Instance& inst, double omega, double h)
{
    std::vector<double> grad(log_rate.size());
    std::vector<double> x(log_rate.begin(), log_rate.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double rel = h;
        for (int attempt = 0;; ++attempt) {
            const double step = rel * std::max(1.0, std::abs(log_rate[i]));
            try {
                x[i] = log_rate[i] + step;
                const double up = optimal_power_cost(x, inst, omega);
                x[i] = log_rate[i] - step;
                const double down = optimal_power_cost(x, inst, omega);
                grad[i] = (up - down) / (2.0 * step);
                break;
            } catch (const InfeasibleError&) {
                if (attempt == 1)
                    throw;
                rel /= 10.0;
            }
        }
        x[i] = log_rate[i];
    }
    return grad;
}

GridOptimum grid_search_optimum(const Instance& inst, double omega, const GridSpec& spec)
{
    const std::size_t n = inst.size();
    if (n == 0 || n > 3)
        throw std::length_error("grid search supports 1 to 3 links");
    if (spec.points < 2)
        throw std::invalid_argument("grid needs at least 2 points");
    std::vector<double> axis(static_cast<std::size_t>(spec.points));
    const double lmin = std::log(spec.gamma_min), lmax = std::log(spec.gamma_max);
    for (std::size_t i = 0; i < axis.size(); ++i)
        axis[i] = std::exp(lmin + (lmax - lmin) * static_cast<double>(i) / static_cast<double>(axis.size() - 1));

    GridOptimum best;
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> gamma(n);
    for (;;) {
        for (std::size_t l = 0; l < n; ++l)
            gamma[l] = axis[idx[l]];
        // A positive solution of (I - A) p = b with b > 0 exists iff rho(A) < 1.
        const auto [a, b] = power_system(gamma, inst);
        const VectorXd p = a.partialPivLu().solve(b);
        if (all_positive(p) && p.maxCoeff() <= spec.p_max) {
            double obj = -omega * p.sum();
            for (std::size_t l = 0; l < n; ++l)
                obj += std::log(inst.bandwidth * std::log2(1.0 + gamma[l]));
            if (obj > best.objective) {
                best.objective = obj;
                best.gamma = gamma;
                best.power = to_vector(p);
            }
        }
        std::size_t d = 0;
        while (d < n && ++idx[d] == axis.size())
            idx[d++] = 0;
        if (d == n)
            break;
    }
    if (!best.gamma.empty()) {
        best.rate.resize(n);
        for (std::size_t l = 0; l < n; ++l)
            best.rate[l] = inst.bandwidth * std::log2(1.0 + best.gamma[l]);
    }
    return best;
}

GridOptimum single_link_optimum(double gain, double noise, double bandwidth, double omega, double p_max)
{
    if (!(gain > 0.0) || !(noise > 0.0) || !(bandwidth > 0.0) || !(omega > 0.0))
        throw std::invalid_argument("single_link_optimum: parameters must be positive");
    const double target = omega * noise / gain;
    auto f = [&](double g) { return 1.0 / ((1.0 + g) * std::log1p(g)) - target; };
    double lo = std::log(1e-12), hi = std::log(1e12);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(std::exp(mid)) > 0.0 ? lo : hi) = mid;
    }
    double g = std::exp(0.5 * (lo + hi));
    g = std::min(g, gain * p_max / noise);
    GridOptimum out;
    out.gamma = {g};
    out.power = {g * noise / gain};
    out.rate = {bandwidth * std::log2(1.0 + g)};
    out.objective = std::log(out.rate[0]) - omega * out.power[0];
    return out;
}

double problem3_objective(const Scenario& scenario, const Allocation& allocation, std::span<const double> power)
{
    double total = 0.0;
    for (std::size_t l = 0; l < scenario.num_links(); ++l) {
        const auto& a = allocation.links[l];
        if (a.rb < 0)
            continue;
        const std::size_t rx = scenario.receiver_of(l, a.mode);
        double interference = 0.0;
        for (std::size_t k = 0; k < scenario.num_links(); ++k)
            if (k != l && allocation.links[k].rb == a.rb && scenario.link(k).cell == scenario.link(l).cell)
                interference += scenario.gain(k, rx) * power[k];
        total += std::log2(1.0 + scenario.gain(l, rx) * power[l] / (scenario.noise_watts() + interference));
    }
    return total;
}

Problem3Solution exhaustive_problem3(const Scenario& scenario, std::span<const double> power)
{
    const std::size_t n = scenario.num_links();
    const int rbs = scenario.num_rbs();
    if (n > 4 || rbs > 3)
        throw std::length_error("exhaustive_problem3 handles at most 4 links and 3 RBs");
    if (power.size() != n)
        throw std::invalid_argument("exhaustive_problem3: one power per link required");

    Problem3Solution best;
    best.objective = -1.0;
    Allocation cur(n, scenario.num_cells(), rbs);
    std::function<void(std::size_t)> rec = [&](std::size_t l) {
        if (l == n) {
            // C1: at most one cellular-mode link per cell and RB.
            std::vector<int> cellular(static_cast<std::size_t>(scenario.num_cells() * rbs), 0);
            for (std::size_t k = 0; k < n; ++k) {
                const auto& a = cur.links[k];
                if (a.rb >= 0 && a.mode == Mode::Cellular
                    && ++cellular[static_cast<std::size_t>(scenario.link(k).cell * rbs + a.rb)] > 1)
                    return;
            }
            ++best.evaluated;
            const double obj = problem3_objective(scenario, cur, power);
            if (obj > best.objective) {
                best.objective = obj;
                best.allocation = cur;
            }
            return;
        }
        cur.links[l] = LinkAssignment{};
        rec(l + 1);
        const bool d2d = scenario.link(l).is_d2d();
        for (int j = 0; j < rbs; ++j)
            for (Mode m : {Mode::Cellular, Mode::Direct}) {
                if (m == Mode::Direct && !d2d)
                    continue;
                cur.links[l] = LinkAssignment{j, m, true};
                rec(l + 1);
            }
        cur.links[l] = LinkAssignment{};
    };
    rec(0);

    // Fill in counters and dedicated flags of the winner.
    auto& alloc = best.allocation;
    for (std::size_t l = 0; l < n; ++l) {
        const auto& a = alloc.links[l];
        if (a.rb >= 0)
            ++alloc.reuse[static_cast<std::size_t>(scenario.link(l).cell)][static_cast<std::size_t>(a.rb)];
    }
    for (std::size_t l = 0; l < n; ++l) {
        auto& a = alloc.links[l];
        if (a.rb >= 0)
            a.dedicated = alloc.reuse[static_cast<std::size_t>(scenario.link(l).cell)][static_cast<std::size_t>(a.rb)] == 1;
    }
    return best;
}

} // namespace d2d::oracle
