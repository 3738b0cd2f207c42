#include "travelers/analysis.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>

namespace travelers::analysis {

namespace mp = boost::multiprecision;

double rho(double p_h, double p_d) {
    if (!(p_h > 0.0 && p_h < 1.0) || !(p_d > 0.0 && p_d < 1.0))
        throw std::domain_error("rho: probabilities must lie in (0,1)");
    if (p_h <= p_d) throw std::domain_error("rho: requires p_d < p_h");
    return std::log(1.0 / p_h) / std::log(1.0 / p_d);
}

double kl_divergence(double a, double p) {
    if (!(a > 0.0 && a < 1.0) || !(p > 0.0 && p < 1.0))
        throw std::domain_error("kl_divergence: arguments must lie in (0,1)");
    return a * std::log(a / p) + (1.0 - a) * std::log((1.0 - a) / (1.0 - p));
}

double chernoff_pd_bound(std::uint32_t q, double t_fraction, double p) {
    if (q == 0) return 1.0;  // empty product
    if (!(t_fraction > p)) throw std::domain_error("chernoff_pd_bound: t_fraction must exceed p");
    return std::exp(-static_cast<double>(q) * kl_divergence(t_fraction, p));
}

namespace {

mp::cpp_int binomial_coefficient(std::uint32_t n, std::uint32_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    mp::cpp_int r = 1;
    for (std::uint32_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

}  // namespace

double binomial_pass_prob(std::uint32_t q, std::uint32_t t, double p) {
    if (p < 0.0 || p > 1.0) throw std::domain_error("binomial_pass_prob: p in [0,1]");
    if (t == 0) return 1.0;  // survival-function convention at the boundary
    if (t > q) return 0.0;
    long double sum = 0.0L;
    const long double pl = p, ql = 1.0L - static_cast<long double>(p);
    for (std::uint32_t i = t; i <= q; ++i) {
        long double coeff = binomial_coefficient(q, i).convert_to<long double>();
        sum += coeff * std::pow(pl, static_cast<long double>(i)) *
               std::pow(ql, static_cast<long double>(q - i));
    }
    return static_cast<double>(sum);
}

long double binomial_pass_prob_rational(std::uint32_t q, std::uint32_t t,
                                        std::uint64_t num, std::uint64_t den,
                                        std::string* fraction_out) {
    if (t == 0 || t > q) throw std::domain_error("binomial_pass_prob_rational: t in [1, q]");
    if (den == 0 || num > den) throw std::domain_error("binomial_pass_prob_rational: p in [0,1]");
    mp::cpp_int numer = 0;
    const mp::cpp_int a = num, b = mp::cpp_int(den) - num;
    for (std::uint32_t i = t; i <= q; ++i) {
        numer += binomial_coefficient(q, i) * mp::pow(a, i) * mp::pow(b, q - i);
    }
    mp::cpp_int denom = mp::pow(mp::cpp_int(den), q);
    if (fraction_out) *fraction_out = numer.str() + "/" + denom.str();
    return numer.convert_to<long double>() / denom.convert_to<long double>();
}

double success_probability(double g_h, std::uint64_t L) {
    if (g_h < 0.0 || g_h > 1.0) throw std::domain_error("success_probability: g_h in [0,1]");
    if (L == 0) return 0.0;
    return 1.0 - std::pow(1.0 - g_h, static_cast<double>(L));
}

SingletonPlan singleton_plan(std::uint32_t n, double c, double p_h, double p_d,
                             std::uint64_t paths_per_block) {
    if (n < 2) throw std::domain_error("singleton_plan: n >= 2");
    if (c < 1.0) throw std::domain_error("singleton_plan: c >= 1");
    SingletonPlan plan;
    plan.rho = rho(p_h, p_d);  // validates (p_h, p_d)
    plan.tau = c + 1.0;
    const double ln_n = std::log(static_cast<double>(n));
    plan.k = static_cast<std::uint32_t>(std::ceil(plan.tau * ln_n / std::log(1.0 / p_d)));
    plan.g_h = std::pow(p_h, static_cast<double>(plan.k));
    plan.g_d = std::pow(p_d, static_cast<double>(plan.k));
    plan.L = static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(n), plan.rho * plan.tau)));
    plan.success = success_probability(plan.g_h, plan.L);
    plan.adversary_union_bound = static_cast<double>(n) * plan.g_d;
    plan.epsilon_target = std::pow(static_cast<double>(n), -c);
    if (paths_per_block > 0 && plan.L > paths_per_block)
        throw std::runtime_error("singleton_plan: L exceeds paths_per_block budget");
    return plan;
}

HubPlan hub_plan(std::uint32_t q, std::uint32_t t, std::uint32_t k, std::uint64_t L,
                 double p_honest_node, double p_corrupt_node,
                 std::uint64_t paths_per_block) {
    if (q == 0 || t == 0 || t > q || k == 0) throw std::domain_error("hub_plan: bad (q, t, k)");
    HubPlan plan;
    plan.q = q;
    plan.t = t;
    plan.k = k;
    plan.L = L;
    plan.p_h_exact = binomial_pass_prob(q, t, p_honest_node);
    plan.p_d_exact = binomial_pass_prob(q, t, p_corrupt_node);
    const double t_fraction = static_cast<double>(t) / static_cast<double>(q);
    plan.p_d_chernoff =
        t_fraction > p_corrupt_node ? chernoff_pd_bound(q, t_fraction, p_corrupt_node) : 1.0;
    plan.g_h = std::pow(plan.p_h_exact, static_cast<double>(k));
    plan.g_d = std::pow(plan.p_d_exact, static_cast<double>(k));
    plan.success = success_probability(plan.g_h, L);
    plan.epsilon_bound = static_cast<double>(paths_per_block) * plan.g_d;
    return plan;
}

std::vector<ComplexityEstimate> complexity_estimates(std::uint32_t n, std::uint64_t T,
                                                     std::uint64_t L, std::uint32_t lambda,
                                                     double c, double log_base) {
    if (n == 0 || log_base <= 1.0) throw std::domain_error("complexity_estimates: bad inputs");
    const double nd = n, Td = static_cast<double>(T), Ld = static_cast<double>(L),
                 lam = lambda;
    const double logn = n == 1 ? 0.0 : std::log(nd) / std::log(log_base);

    std::vector<ComplexityEstimate> rows;
    rows.push_back({"themis", nd * Ld, nd * Td * Ld + nd * nd * Td * lam});
    rows.push_back({"quick-of", nd * nd * Ld + nd * nd * nd * lam,
                    nd * nd * Td * Ld + nd * nd * nd * Td * lam});
    rows.push_back({"pompe", nd * Ld + nd * nd * lam,
                    nd * Td * Ld + nd * nd * Td * lam + nd * lam});
    rows.push_back({"travelers-speed", c * logn * logn * Ld,
                    c * logn * logn * Td * Ld + nd * nd * lam});
    rows.push_back({"travelers-light", c * logn * lam + Ld,
                    (c * logn * lam + Ld) * Td + logn * nd * lam});
    return rows;
}

}  // namespace travelers::analysis
