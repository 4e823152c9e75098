#pragma once

#include <vector>

#include "provi/dual.hpp"

namespace provi {

/// Nonnegative weight kept in log space, with an explicit flag for exact
/// zero instead of -inf arithmetic.
struct LogWeight {
    Dual log{};
    bool zero = false;

    static LogWeight one() { return LogWeight{}; }
    static LogWeight none() { return LogWeight{Dual{}, true}; }
    static LogWeight from_log(Dual l) { return LogWeight{l, false}; }

    bool is_zero() const { return zero; }

    /// Linear-scale weight with tangent; (0,0) when zero.
    Dual linear() const { return zero ? Dual{} : dexp(log); }

    LogWeight& operator*=(const LogWeight& o) {
        if (zero || o.zero) {
            zero = true;
            log = Dual{};
        } else {
            log = log + o.log;
        }
        return *this;
    }
    friend LogWeight operator*(LogWeight a, const LogWeight& b) { return a *= b; }

    LogWeight operator/(const LogWeight& o) const {
        if (zero) return none();
        return LogWeight{log - o.log, false};  // caller guarantees o > 0
    }
};

/// log(sum_i exp(x_i)) with max-subtraction, in dual arithmetic.
inline Dual dual_logsumexp(const std::vector<Dual>& xs) {
    double m = xs.front().val;
    for (const auto& x : xs)
        if (x.val > m) m = x.val;
    Dual acc{};
    for (const auto& x : xs) acc = acc + dexp(x - m);
    return dlog(acc) + m;
}

/// log((1/N) * sum_i w_i) with max-subtraction, in dual arithmetic so
/// tangents flow through the softmax weights. Zero terms are skipped; all
/// zero yields the zero weight.
inline LogWeight lse_mean(const std::vector<LogWeight>& ws) {
    double m = 0.0;
    bool any = false;
    for (const auto& w : ws)
        if (!w.zero && (!any || w.log.val > m)) {
            m = w.log.val;
            any = true;
        }
    if (!any) return LogWeight::none();
    Dual acc{};
    for (const auto& w : ws)
        if (!w.zero) acc = acc + dexp(w.log - m);
    return LogWeight::from_log(dlog(acc) + m - std::log(static_cast<double>(ws.size())));
}

}  // namespace provi
