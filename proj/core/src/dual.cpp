#include "provi/dual.hpp"

namespace provi {

namespace {
thread_local Tape* g_tape = nullptr;
}

Tape* active_tape() { return g_tape; }

TapeScope::TapeScope() : prev_(g_tape) { g_tape = &tape_; }
TapeScope::~TapeScope() { g_tape = prev_; }

Dual tape_leaf(double v) {
    Tape* t = active_tape();
    return Dual{v, 0.0, t != nullptr ? t->leaf() : -1};
}

}  // namespace provi
