#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "travelers/types.hpp"

namespace travelers::analysis {

/// Gap exponent between the honest and corrupted hub probabilities:
/// rho = log(1/p_h) / log(1/p_d), base independent. Requires
/// 0 < p_d < p_h < 1; throws std::domain_error otherwise.
double rho(double p_h, double p_d);

/// KL divergence D(a || p) between Bernoulli(a) and Bernoulli(p),
/// natural log. Both arguments must lie strictly inside (0, 1).
double kl_divergence(double a, double p);

/// Chernoff upper bound for the binomial tail P(Bin(q, p) >= t_fraction*q):
/// exp(-q * D(t_fraction || p)). Requires t_fraction > p; q = 0 yields 1.
double chernoff_pd_bound(std::uint32_t q, double t_fraction, double p);

/// Exact binomial tail P(Bin(q, p) >= t). Binomial coefficients are
/// computed exactly as big integers; only the final per-term product is
/// floating point. Boundary convention: t = 0 yields 1, t > q yields 0.
double binomial_pass_prob(std::uint32_t q, std::uint32_t t, double p);

/// Exact-rational binomial tail for p = num/den. Returns the tail as a
/// long double after exact integer numerator/denominator accumulation;
/// num_out/den_out (when non-null) receive the exact fraction in decimal
/// string form for audit.
long double binomial_pass_prob_rational(std::uint32_t q, std::uint32_t t,
                                        std::uint64_t num, std::uint64_t den,
                                        std::string* fraction_out = nullptr);

/// 1 - (1 - g_h)^L: probability that at least one of L independent paths
/// is regular.
double success_probability(double g_h, std::uint64_t L);

/// Closed-form plan for singleton hubs (q = 1).
struct SingletonPlan {
    double rho = 0.0;         // gap exponent
    std::uint32_t k = 0;      // path length, ceil(tau*ln n / ln(1/p_d))
    double g_h = 0.0;         // regular-path probability p_h^k
    double g_d = 0.0;         // corrupted-path probability p_d^k
    std::uint64_t L = 0;      // client retries, floor(n^(rho*tau))
    double success = 0.0;     // 1 - (1-g_h)^L
    double adversary_union_bound = 0.0;  // n * g_d, must be <= n^-c
    double tau = 0.0;
    double epsilon_target = 0.0;  // n^-c
};

/// tau = c + 1; k rounds up so the adversary bound never weakens; L
/// rounds down so the client never exceeds the admissible path budget.
/// Throws std::domain_error on invalid inputs and std::runtime_error when
/// L would exceed paths_per_block (when a positive budget is given).
SingletonPlan singleton_plan(std::uint32_t n, double c, double p_h, double p_d,
                             std::uint64_t paths_per_block = 0);

/// Evaluated plan for non-singleton hubs of size q with threshold t.
struct HubPlan {
    std::uint32_t q = 0;
    std::uint32_t t = 0;
    std::uint32_t k = 0;
    double p_h_exact = 0.0;    // exact tail at the honest fraction
    double p_d_exact = 0.0;    // exact tail at the corrupted fraction
    double p_d_chernoff = 0.0; // Chernoff bound on p_d_exact
    double g_h = 0.0;
    double g_d = 0.0;
    std::uint64_t L = 0;
    double success = 0.0;
    double epsilon_bound = 0.0;  // paths_per_block * g_d (union bound)
};

HubPlan hub_plan(std::uint32_t q, std::uint32_t t, std::uint32_t k, std::uint64_t L,
                 double p_honest_node, double p_corrupt_node,
                 std::uint64_t paths_per_block);

/// One protocol row of the communication-complexity comparison, evaluated
/// at a concrete operating point with unit constants.
struct ComplexityEstimate {
    std::string protocol;
    double submission_per_tx = 0.0;  // bytes
    double total = 0.0;              // bytes for T transactions
};

/// Evaluates every comparison row at (n, T, L, lambda, c). log_base 2
/// reproduces the headline numbers; natural log is also accepted.
std::vector<ComplexityEstimate> complexity_estimates(std::uint32_t n, std::uint64_t T,
                                                     std::uint64_t L, std::uint32_t lambda,
                                                     double c, double log_base = 2.0);

}  // namespace travelers::analysis
