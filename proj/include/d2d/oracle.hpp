#pragma once

// Reference computations for tests. Nothing here calls into utility_pc or ra
// update routines; every result is obtained by direct linear algebra, LP
// enumeration or brute force.

#include "d2d/allocation.hpp"
#include "d2d/common.hpp"
#include "d2d/topology.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace d2d::oracle {

/// Link gains on one RB: gain(a, b) is from transmitter b to the receiver of
/// link a, noise[a] is the receiver noise of link a.
struct Instance {
    SquareMatrix gain;
    std::vector<double> noise;
    double bandwidth = 1.0;

    std::size_t size() const { return noise.size(); }
};

struct FeasibilityReport {
    double spectral_radius = 0.0;  ///< of diag(gamma_tgt) F
    bool feasible = false;
    std::vector<double> power;     ///< empty when infeasible
};

/// Perron root of a nonnegative matrix by power iteration on A + I
/// (Collatz-Wielandt bounds, 200 iterations, tolerance 1e-10); a dense
/// eigenvalue solve takes over when the bounds have not closed by then.
double spectral_radius(const SquareMatrix& a);

/// diag(gamma_tgt) F with F_lm = G_lm / G_ll off the diagonal.
SquareMatrix normalized_gain(std::span<const double> gamma_tgt, const Instance& inst);

FeasibilityReport check_feasibility(std::span<const double> gamma_tgt, const Instance& inst);

/// Dense solve of (I - diag(gamma) F) p = diag(gamma) eta'. Throws
/// InfeasibleError when the radius is >= 1 or the solution is not positive.
std::vector<double> solve_power_fixed_point(std::span<const double> gamma_tgt, const Instance& inst);

/// Solves gamma_cc(mu) = gamma_tgt as a linear system in nu = mu / sigma.
std::vector<double> solve_mu_fixed_point(std::span<const double> gamma_tgt, const Instance& inst);

/// LP data of the fixed-target power problem: minimize omega 1'p subject to
/// H p <= -eta, p >= 0.
struct LpData {
    SquareMatrix h;
    std::vector<double> eta;
    double omega = 1.0;
};

LpData build_lp(std::span<const double> gamma_tgt, const Instance& inst, double omega);

struct DualityReport {
    double gap = 0.0;               ///< |omega 1'p - eta'lambda| / max(1, omega 1'p)
    double relative_gap = 0.0;      ///< |omega 1'p - eta'lambda| / (omega 1'p)
    double max_primal_violation = 0.0;
    double max_dual_violation = 0.0; ///< of lambda_l/omega - sum_k G_kl/G_kk gamma_k lambda_k/omega <= 1 and lambda >= 0
    bool primal_feasible = false;
    bool dual_feasible = false;
};

DualityReport lp_duality_check(std::span<const double> p, std::span<const double> lambda_lp, const LpData& lp,
                               double tol = 1e-9);

/// Dual solution assuming every primal constraint is active: H' lambda = -omega 1.
std::vector<double> lp_dual_equality(const LpData& lp);

struct LpSolution {
    std::vector<double> primal;
    std::vector<double> dual;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    bool all_constraints_active = false;
};

/// Exact primal and dual LP optima by vertex enumeration (L <= 3).
LpSolution lp_enumerate(const LpData& lp);

/// Optimal sum power cost phi(s~) = omega sum P*(s~) where s = exp(s~) and
/// the targets are 2^(s/W) - 1.
double optimal_power_cost(std::span<const double> log_rate, const Instance& inst, double omega);

/// Central differences of optimal_power_cost w.r.t. each log-rate. The step is
/// h * max(1, |s~_i|); an infeasible perturbation retries once with h / 10.
std::vector<double> finite_diff_envelope(std::span<const double> log_rate, const Instance& inst, double omega,
                                         double h = 1e-5);

struct GridSpec {
    int points = 200;
    double gamma_min = 1e-3;
    double gamma_max = 1e4;
    double p_max = std::numeric_limits<double>::infinity();
};

struct GridOptimum {
    std::vector<double> rate;
    std::vector<double> power;
    std::vector<double> gamma;
    double objective = -std::numeric_limits<double>::infinity();
};

/// Exhaustive grid over log-spaced per-link SINR targets (L <= 3) maximizing
/// sum ln s - omega sum P with powers from solve_power_fixed_point.
GridOptimum grid_search_optimum(const Instance& inst, double omega, const GridSpec& spec = {});

/// Single link optimum by bisection on the stationarity condition
/// 1 / ((1 + g) ln(1 + g)) = omega sigma / G.
GridOptimum single_link_optimum(double gain, double noise, double bandwidth, double omega,
                                double p_max = std::numeric_limits<double>::infinity());

struct Problem3Solution {
    Allocation allocation;
    double objective = 0.0;   ///< sum over links of log2(1 + SINR) with intracell interference
    std::size_t evaluated = 0;
};

/// Spectral efficiency sum of an allocation with the given powers, counting
/// only interference from same-cell links on the same RB.
double problem3_objective(const Scenario& scenario, const Allocation& allocation, std::span<const double> power);

/// Enumerates every assignment satisfying C1-C4 (each link off or on one RB in
/// one admissible mode). Throws std::length_error above 4 links or 3 RBs.
Problem3Solution exhaustive_problem3(const Scenario& scenario, std::span<const double> power);

} // namespace d2d::oracle
