#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sgl/errors.hpp"

namespace sgl {

enum class Monotonicity { Increasing, Decreasing, None };

inline std::string monotonicity_name(Monotonicity m) {
    switch (m) {
        case Monotonicity::Increasing: return "increasing";
        case Monotonicity::Decreasing: return "decreasing";
        default: return "none";
    }
}

// A per-level numeric series collected along an exhaustion, tagged with the
// direction the theory guarantees. The slack covers roundoff only; a genuine
// violation means the solve (or the theory's precondition) is wrong.
struct EvidenceSeries {
    std::string name;
    std::vector<int> levels;
    std::vector<double> values;
    Monotonicity expected = Monotonicity::None;

    bool is_monotone(double slack = 1e-10) const {
        if (expected == Monotonicity::None) return true;
        for (std::size_t i = 1; i < values.size(); ++i) {
            double a = values[i - 1], b = values[i];
            double tol = slack * std::max({1.0, std::abs(a), std::abs(b)});
            if (expected == Monotonicity::Increasing && b < a - tol) return false;
            if (expected == Monotonicity::Decreasing && b > a + tol) return false;
        }
        return true;
    }

    void require_monotone(double slack = 1e-10) const {
        if (!is_monotone(slack))
            throw DomainError("series '" + name + "': declared monotonicity violated");
    }

    double front() const { return values.front(); }
    double back() const { return values.back(); }
    bool empty() const { return values.empty(); }
};

// Aitken delta-squared applied to the last three entries. Advisory output
// only: verdicts and acceptance checks always use the raw series.
inline std::vector<double> aitken_extrapolant(const std::vector<double>& v) {
    std::vector<double> out;
    for (std::size_t i = 2; i < v.size(); ++i) {
        double denom = v[i] - 2.0 * v[i - 1] + v[i - 2];
        if (denom == 0.0) continue;
        double d = v[i] - v[i - 1];
        out.push_back(v[i] - d * d / denom);
    }
    return out;
}

} // namespace sgl
