#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include "loglab/error.hpp"
#include "loglab/expansion.hpp"
#include "loglab/rng.hpp"

namespace loglab {

struct MarketParams {
    double mu;
    double r;
    double sigma;
    double T;
    double x0;

    MarketParams(double mu_, double r_, double sigma_, double T_, double x0_)
        : mu(mu_), r(r_), sigma(sigma_), T(T_), x0(x0_) {
        if (!std::isfinite(mu) || !std::isfinite(r))
            fail(ErrorCode::InvalidConstants, "mu and r must be finite");
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            fail(ErrorCode::InvalidConstants,
                 "sigma must be positive and finite, got " + std::to_string(sigma));
        if (!(T > 0.0) || !std::isfinite(T))
            fail(ErrorCode::InvalidConstants,
                 "horizon T must be positive and finite, got " + std::to_string(T));
        if (!(x0 > 0.0) || !std::isfinite(x0))
            fail(ErrorCode::InvalidConstants,
                 "initial wealth x0 must be positive and finite, got " + std::to_string(x0));
    }
};

// Candidate rule read off the tied family's first-order condition:
//   pi*(x) = -(mu - r) * (x + a3) * (2 + ln(x + a3)) / sigma^2.
// a2 cancels between V_x and V_xx, but a2 = 0 still invalidates the rule
// (no curvature to trade against) and a2 > 0 flips it into a minimizer.
struct AnsatzPolicy {
    TiedLogExpansion2D e;
    explicit AnsatzPolicy(const TiedLogExpansion2D& e_) : e(e_) {}
};

struct MertonPolicy {
    double gamma;
    explicit MertonPolicy(double gamma_) : gamma(gamma_) {
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            fail(ErrorCode::InvalidConstants,
                 "gamma must be positive and finite, got " + std::to_string(gamma));
    }
};

// Fixed currency amount in the risky asset, independent of wealth.
struct ConstantPolicy {
    double pi;
    explicit ConstantPolicy(double pi_) : pi(pi_) {
        if (!std::isfinite(pi))
            fail(ErrorCode::InvalidConstants, "pi must be finite");
    }
};

using Policy = std::variant<AnsatzPolicy, MertonPolicy, ConstantPolicy>;

struct MCEstimate {
    double mean_utility = 0.0;
    double std_err = 0.0;
    int n_paths = 0;
    std::uint64_t seed = 0;
    int bankrupt_paths = 0;
    int domain_violation_paths = 0;
};

enum class UtilityKind { Log, CappedLog };

struct SimOptions {
    double wealth_floor = 1e-12;
    // Utility credited to absorbed (bankrupt or domain-violating) paths.
    double floor_utility = -27.631021115928547;  // ln(1e-12)
    UtilityKind utility = UtilityKind::Log;
    double cap = 1e6;
};

inline double ansatz_optimal_pi(const TiedLogExpansion2D& e, const MarketParams& m,
                                double x) {
    const double arg = detail::require_log_arg(x, e.a3, "ansatz_optimal_pi");
    if (e.a2 == 0.0)
        fail(ErrorCode::DegenerateAnsatz,
             "a2 = 0 gives V_xx = 0; the first-order rule is undefined");
    return -(m.mu - m.r) * arg * (2.0 + std::log(arg)) / (m.sigma * m.sigma);
}

// Pointwise Hamiltonian of the tied family at allocation pi:
//   a3 + a2*(r*x + pi*(mu - r))*(2 + ln(x+a3)) + 0.5*a2*pi^2*sigma^2/(x+a3).
// Stationary in pi exactly at ansatz_optimal_pi when a2 < 0.
inline double hjb_residual(const TiedLogExpansion2D& e, const MarketParams& m,
                           double pi, double x, double /*t*/) {
    const double arg = detail::require_log_arg(x, e.a3, "hjb_residual");
    return e.a3 +
           e.a2 * (m.r * x + pi * (m.mu - m.r)) * (2.0 + std::log(arg)) +
           0.5 * e.a2 * pi * pi * m.sigma * m.sigma / arg;
}

namespace detail {

// Fixed-order pairwise summation; the reduction tree depends only on the
// length, never on chunking or thread count, so sums are bit-reproducible.
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo,
                           std::size_t hi) {
    const std::size_t n = hi - lo;
    if (n <= 8) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += v[i];
        return acc;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return v.empty() ? 0.0 : pairwise_sum(v, 0, v.size());
}

}  // namespace detail

inline std::string policy_label(const Policy& policy);

// Euler-Maruyama march of controlled wealth
//   dX = (r*X + (mu - r)*pi) dt + pi * sigma dW
// under the given policy, scoring terminal log utility (optionally capped).
// Increments are counter-based functions of (seed, path, step), so two
// policies simulated with the same seed face identical noise. Paths touching
// the wealth floor are absorbed there and scored at floor_utility, as are
// ansatz-policy paths that wander out of the log domain.
inline MCEstimate simulate_wealth(const MarketParams& m, const Policy& policy,
                                  int n_paths, int n_steps, std::uint64_t seed,
                                  const SimOptions& opt = SimOptions{}) {
    if (n_paths < 1)
        fail(ErrorCode::ParamDomain, "n_paths must be at least 1, got " + std::to_string(n_paths));
    if (n_steps < 1)
        fail(ErrorCode::ParamDomain, "n_steps must be at least 1, got " + std::to_string(n_steps));
    if (const auto* ap = std::get_if<AnsatzPolicy>(&policy)) {
        if (ap->e.a2 > 0.0)
            fail(ErrorCode::Concavity,
                 "refusing to simulate the first-order rule of a convex value "
                 "function (a2 = " + std::to_string(ap->e.a2) + " > 0)");
        if (ap->e.a2 == 0.0)
            fail(ErrorCode::DegenerateAnsatz,
                 "a2 = 0 gives V_xx = 0; the first-order rule is undefined");
    }

    const double dt = m.T / n_steps;
    const double sdt = std::sqrt(dt);
    std::vector<double> utilities(static_cast<std::size_t>(n_paths));
    int bankrupt = 0;
    int violations = 0;

    for (int p = 0; p < n_paths; ++p) {
        double x = m.x0;
        bool absorbed = false;
        for (int k = 0; k < n_steps; ++k) {
            double pi = 0.0;
            if (const auto* ap = std::get_if<AnsatzPolicy>(&policy)) {
                if (!(x + ap->e.a3 > 0.0)) {
                    ++violations;
                    absorbed = true;
                    break;
                }
                pi = ansatz_optimal_pi(ap->e, m, x);
            } else if (const auto* mp = std::get_if<MertonPolicy>(&policy)) {
                pi = (m.mu - m.r) * x / (mp->gamma * m.sigma * m.sigma);
            } else {
                pi = std::get<ConstantPolicy>(policy).pi;
            }
            const double z = normal_draw(seed, static_cast<std::uint64_t>(p),
                                         static_cast<std::uint64_t>(k));
            x += (m.r * x + (m.mu - m.r) * pi) * dt + pi * m.sigma * sdt * z;
            if (x <= opt.wealth_floor) {
                ++bankrupt;
                absorbed = true;
                break;
            }
        }
        double u;
        if (absorbed) {
            u = opt.floor_utility;
        } else {
            u = std::log(x);
            if (opt.utility == UtilityKind::CappedLog)
                u = std::min(u, std::log(opt.cap));
        }
        utilities[static_cast<std::size_t>(p)] = u;
    }

    MCEstimate est;
    est.n_paths = n_paths;
    est.seed = seed;
    est.bankrupt_paths = bankrupt;
    est.domain_violation_paths = violations;
    est.mean_utility = detail::pairwise_sum(utilities) / n_paths;
    if (n_paths > 1) {
        std::vector<double> sq(utilities.size());
        for (std::size_t i = 0; i < utilities.size(); ++i) {
            const double d = utilities[i] - est.mean_utility;
            sq[i] = d * d;
        }
        const double var = detail::pairwise_sum(sq) / (n_paths - 1);
        est.std_err = std::sqrt(var / n_paths);
    }
    return est;
}

// Same seed for every entrant: the comparison is under common random numbers.
inline std::vector<MCEstimate> policy_tournament(const MarketParams& m,
                                                 const std::vector<Policy>& policies,
                                                 int n_paths, int n_steps,
                                                 std::uint64_t seed,
                                                 const SimOptions& opt = SimOptions{}) {
    std::vector<MCEstimate> out;
    out.reserve(policies.size());
    for (const auto& p : policies)
        out.push_back(simulate_wealth(m, p, n_paths, n_steps, seed, opt));
    return out;
}

namespace detail {

inline std::string short_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// Human-readable, comma-free label (labels land in CSV cells).
inline std::string policy_label(const Policy& policy) {
    if (const auto* ap = std::get_if<AnsatzPolicy>(&policy))
        return "ansatz(a1=" + detail::short_num(ap->e.a1) +
               ";a2=" + detail::short_num(ap->e.a2) +
               ";a3=" + detail::short_num(ap->e.a3) + ")";
    if (const auto* mp = std::get_if<MertonPolicy>(&policy))
        return "merton(gamma=" + detail::short_num(mp->gamma) + ")";
    return "constant(pi=" + detail::short_num(std::get<ConstantPolicy>(policy).pi) + ")";
}

}  // namespace loglab
