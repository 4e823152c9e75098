#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace provi {

/// Dual number: value plus directional tangent. When a Tape is active the
/// `node` field links the value into the recorded graph (-1 = constant).
struct Dual {
    double val = 0.0;
    double tan = 0.0;
    std::int32_t node = -1;
};

inline Dual make_dual(double v, double t = 0.0) { return Dual{v, t, -1}; }

/// Append-only record of deterministic scalar operations, used by the
/// reverse-mode pass. Each node keeps at most two input indices with the
/// local partial derivatives. Stochastic estimators inject their score and
/// weak-derivative terms as phantom summands in the value graph
/// (x - detach(x) times a detached multiplier), so the backward sweep picks
/// them up already scaled by whatever weights enclose them.
class Tape {
  public:
    struct Node {
        std::int32_t a = -1;
        std::int32_t b = -1;
        double da = 0.0;
        double db = 0.0;
    };

    std::int32_t leaf() {
        nodes_.push_back(Node{});
        return static_cast<std::int32_t>(nodes_.size() - 1);
    }

    std::int32_t unary(std::int32_t a, double da) {
        nodes_.push_back(Node{a, -1, da, 0.0});
        return static_cast<std::int32_t>(nodes_.size() - 1);
    }

    std::int32_t binary(std::int32_t a, double da, std::int32_t b, double db) {
        nodes_.push_back(Node{a, b, da, db});
        return static_cast<std::int32_t>(nodes_.size() - 1);
    }

    /// Reverse sweep: seeds the loss node with 1 and accumulates adjoints in
    /// reverse creation order. Returns one adjoint per recorded node.
    std::vector<double> backward(std::int32_t loss_node) const {
        std::vector<double> adj(nodes_.size(), 0.0);
        if (loss_node >= 0) adj[static_cast<std::size_t>(loss_node)] += 1.0;
        for (std::size_t i = nodes_.size(); i-- > 0;) {
            const Node& nd = nodes_[i];
            const double a = adj[i];
            if (a == 0.0) continue;
            if (nd.a >= 0) adj[static_cast<std::size_t>(nd.a)] += a * nd.da;
            if (nd.b >= 0) adj[static_cast<std::size_t>(nd.b)] += a * nd.db;
        }
        return adj;
    }

    std::size_t size() const { return nodes_.size(); }

  private:
    std::vector<Node> nodes_;
};

Tape* active_tape();

/// RAII activation of a fresh tape on the current thread.
class TapeScope {
  public:
    TapeScope();
    ~TapeScope();
    TapeScope(const TapeScope&) = delete;
    TapeScope& operator=(const TapeScope&) = delete;
    Tape& tape() { return tape_; }

  private:
    Tape tape_;
    Tape* prev_;
};

/// Fresh tape leaf seeded with value v (an independent variable).
Dual tape_leaf(double v);

namespace detail {
inline std::int32_t rec2(double da, std::int32_t na, double db, std::int32_t nb) {
    Tape* t = active_tape();
    if (t == nullptr || (na < 0 && nb < 0)) return -1;
    return t->binary(na, da, nb, db);
}
inline std::int32_t rec1(double da, std::int32_t na) {
    Tape* t = active_tape();
    if (t == nullptr || na < 0) return -1;
    return t->unary(na, da);
}
}  // namespace detail

inline Dual operator+(const Dual& x, const Dual& y) {
    return Dual{x.val + y.val, x.tan + y.tan, detail::rec2(1.0, x.node, 1.0, y.node)};
}

inline Dual operator-(const Dual& x, const Dual& y) {
    return Dual{x.val - y.val, x.tan - y.tan, detail::rec2(1.0, x.node, -1.0, y.node)};
}

inline Dual operator-(const Dual& x) {
    return Dual{-x.val, -x.tan, detail::rec1(-1.0, x.node)};
}

inline Dual operator*(const Dual& x, const Dual& y) {
    return Dual{x.val * y.val, x.val * y.tan + x.tan * y.val,
                detail::rec2(y.val, x.node, x.val, y.node)};
}

inline Dual operator/(const Dual& x, const Dual& y) {
    const double inv = 1.0 / y.val;
    return Dual{x.val * inv, (x.tan - x.val * inv * y.tan) * inv,
                detail::rec2(inv, x.node, -x.val * inv * inv, y.node)};
}

inline Dual operator+(const Dual& x, double c) { return x + make_dual(c); }
inline Dual operator+(double c, const Dual& x) { return make_dual(c) + x; }
inline Dual operator-(const Dual& x, double c) { return x - make_dual(c); }
inline Dual operator-(double c, const Dual& x) { return make_dual(c) - x; }
inline Dual operator*(const Dual& x, double c) { return x * make_dual(c); }
inline Dual operator*(double c, const Dual& x) { return make_dual(c) * x; }
inline Dual operator/(const Dual& x, double c) { return x / make_dual(c); }
inline Dual operator/(double c, const Dual& x) { return make_dual(c) / x; }

inline Dual dlog(const Dual& x) {
    const double inv = 1.0 / x.val;
    return Dual{std::log(x.val), x.tan * inv, detail::rec1(inv, x.node)};
}

inline Dual dexp(const Dual& x) {
    const double e = std::exp(x.val);
    return Dual{e, x.tan * e, detail::rec1(e, x.node)};
}

inline Dual dsqrt(const Dual& x) {
    const double s = std::sqrt(x.val);
    const double d = 0.5 / s;
    return Dual{s, x.tan * d, detail::rec1(d, x.node)};
}

inline Dual dsin(const Dual& x) {
    const double c = std::cos(x.val);
    return Dual{std::sin(x.val), x.tan * c, detail::rec1(c, x.node)};
}

inline Dual dcos(const Dual& x) {
    const double s = -std::sin(x.val);
    return Dual{std::cos(x.val), x.tan * s, detail::rec1(s, x.node)};
}

/// Copy of x cut off from both the tangent and the tape.
inline Dual detach(const Dual& x) { return Dual{x.val, 0.0, -1}; }

inline bool dual_finite(const Dual& x) { return std::isfinite(x.val) && std::isfinite(x.tan); }

}  // namespace provi
