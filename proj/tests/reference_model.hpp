// Straight-line reference implementation of the per-timestep rules, kept
// deliberately independent of the engines in src/: array-of-structs agents,
// naive loops, formulas written out in place. Only the RandomStream API is
// shared, since the draw sequence itself is part of the contract under test.
#pragma once

#include "herdsim/model.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace refmodel {

struct RefMarket {
    double price = 1.0;
    double log_price = 0.0;
    double sigma = 0.0;
    std::vector<herdsim::Agent> agents;
};

struct RefOutcome {
    double price = 0.0;
    double sigma = 0.0;
    unsigned switches = 0;
    unsigned iterations = 0;
};

inline double ref_sigma(const std::vector<herdsim::Agent>& agents) {
    double total = 0.0, held = 0.0;
    for (const auto& a : agents) {
        total += a.weight;
        if (a.state == 1) held += a.weight;
    }
    return 2.0 * (held / total) - 1.0;
}

inline RefOutcome ref_step(RefMarket& m, double eta, const herdsim::ModelParams& p,
                           herdsim::RandomStream& stream) {
    const double price0 = m.price;
    const double sigma0 = m.sigma;
    const double shock = std::sqrt(p.h) * eta - p.h / 2.0;
    const double f = 1.0 + p.alpha * std::abs(sigma0);

    for (auto& a : m.agents) {
        const double z_lower = stream.gaussian();
        const double z_upper = stream.gaussian();
        const bool minority =
            (a.state == 1 && sigma0 < 0.0) || (a.state == 0 && sigma0 > 0.0);
        const double drift = price0 * p.h * std::abs(sigma0) * a.herding;
        const double noise = price0 * std::sqrt(p.h * a.threshold_volatility);
        if (minority) {
            a.lower += drift + noise * z_lower;
            a.upper -= drift + noise * z_upper;
        } else {
            a.lower += noise * z_lower;
            a.upper += noise * z_upper;
        }
    }

    double price = price0 * std::exp(shock * f + p.kappa * 0.0);
    double sigma = sigma0;
    std::vector<char> switched(m.agents.size(), 0);
    RefOutcome out;
    while (true) {
        std::vector<std::size_t> batch;
        for (std::size_t i = 0; i < m.agents.size(); ++i) {
            const auto& a = m.agents[i];
            if (!switched[i] && !(a.lower <= price && price <= a.upper)) batch.push_back(i);
        }
        if (batch.empty()) break;
        for (std::size_t i : batch) {
            m.agents[i].state ^= 1;
            switched[i] = 1;
        }
        sigma = ref_sigma(m.agents);
        price = price0 * std::exp(shock * f + p.kappa * (sigma - sigma0));
        for (std::size_t i : batch) {
            const double z_lower = stream.uniform(p.reset_lo, p.reset_hi);
            const double z_upper = stream.uniform(p.reset_lo, p.reset_hi);
            m.agents[i].lower = price / (1.0 + z_lower);
            m.agents[i].upper = price * (1.0 + z_upper);
        }
        out.switches += static_cast<unsigned>(batch.size());
        ++out.iterations;
    }

    m.price = price;
    m.log_price += shock * f + p.kappa * (sigma - sigma0);
    m.sigma = sigma;
    out.price = price;
    out.sigma = sigma;
    return out;
}

}  // namespace refmodel
