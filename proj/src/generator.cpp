#include "bdk/generator.hpp"

#include <algorithm>
#include <cmath>

#include "bdk/errors.hpp"

namespace bdk {

Generator::Builder::Builder(State lo, State hi, bool cemetery) : g_(new Generator()) {
    if (hi < lo) throw RangeError("empty state range");
    g_->lo_ = lo;
    g_->hi_ = hi;
    g_->cemetery_ = cemetery;
    const std::size_t n = g_->size();
    g_->rows_.resize(n);
    g_->runs_.resize(n);
    pending_.resize(n);
}

Generator::Builder& Generator::Builder::add(State from, State to, double rate) {
    if (rate == 0.0 || from == to) return *this;
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw ValidationError("rate(" + std::to_string(from) + "," + std::to_string(to) + ")",
                              "must be positive and finite");
    if (!g_->contains(to)) throw RangeError("target state " + std::to_string(to) + " out of range");
    pending_[g_->index(from)][to] += rate;
    return *this;
}

Generator::Builder& Generator::Builder::add_run(State from, State first, State last,
                                                double rate) {
    if (last < first || rate == 0.0) return *this;
    if (!g_->contains(first) || !g_->contains(last) || last == kCemetery)
        throw RangeError("run out of range");
    if (from >= first && from <= last) throw RangeError("run covers its own source");
    auto& slot = g_->runs_[g_->index(from)];
    if (slot) throw RangeError("one run per row");
    slot = UniformRun{first, last, rate};
    return *this;
}

Generator::Builder& Generator::Builder::label(std::string text) {
    g_->label_ = std::move(text);
    return *this;
}

Generator Generator::Builder::build() {
    Generator& g = *g_;
    g.out_.assign(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto& row = g.rows_[k];
        for (const auto& [to, r] : pending_[k]) row.push_back({to, r});
        double total = 0.0;
        for (const auto& t : row) total += t.rate;
        if (g.runs_[k]) total += g.runs_[k]->total();
        g.out_[k] = total;
    }
    if (g.cemetery_ && g.out_.back() != 0.0)
        throw ValidationError("cemetery", "must have no outgoing rate");
    Generator out = std::move(g);
    g_.reset();
    return out;
}

std::size_t Generator::index(State s) const {
    if (s >= lo_ && s <= hi_) return static_cast<std::size_t>(s - lo_);
    if (cemetery_ && s == kCemetery) return static_cast<std::size_t>(hi_ - lo_ + 1);
    throw RangeError("state " + std::to_string(s) + " not in generator");
}

State Generator::state_at(std::size_t k) const {
    const auto interior = static_cast<std::size_t>(hi_ - lo_ + 1);
    if (k < interior) return lo_ + static_cast<State>(k);
    if (cemetery_ && k == interior) return kCemetery;
    throw RangeError("position out of range");
}

std::vector<State> Generator::states() const {
    std::vector<State> out;
    out.reserve(size());
    for (State s = lo_; s <= hi_; ++s) out.push_back(s);
    if (cemetery_) out.push_back(kCemetery);
    return out;
}

double Generator::rate(State i, State j) const {
    if (i == j) return 0.0;
    const std::size_t k = index(i);
    double r = 0.0;
    const auto& row = rows_[k];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const Transition& t, State s) { return t.to < s; });
    if (it != row.end() && it->to == j) r += it->rate;
    if (runs_[k] && runs_[k]->contains(j)) r += runs_[k]->rate;
    return r;
}

double Generator::out_rate(State i) const { return out_[index(i)]; }

std::vector<State> Generator::absorbing_states() const {
    std::vector<State> out;
    for (std::size_t k = 0; k < size(); ++k)
        if (out_[k] == 0.0) out.push_back(state_at(k));
    return out;
}

Eigen::MatrixXd Generator::dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const State i = state_at(static_cast<std::size_t>(k));
        for_each(i, [&](State j, double r) { q(k, static_cast<Eigen::Index>(index(j))) += r; });
        q(k, k) = -out_[static_cast<std::size_t>(k)];
    }
    return q;
}

// ---------------------------------------------------------------------------

ProcessKind parse_process_kind(const std::string& name) {
    if (name == "X") return ProcessKind::X;
    if (name == "Z") return ProcessKind::Z;
    if (name == "Xstar") return ProcessKind::Xstar;
    if (name == "Zstar") return ProcessKind::Zstar;
    if (name == "Xn") return ProcessKind::Xn;
    if (name == "Zn") return ProcessKind::Zn;
    if (name == "ZnMarked") return ProcessKind::ZnMarked;
    if (name == "Zn_cut") return ProcessKind::Zn_cut;
    throw ValidationError("process", "unknown process kind '" + name + "'");
}

std::string to_string(ProcessKind kind) {
    switch (kind) {
    case ProcessKind::X: return "X";
    case ProcessKind::Z: return "Z";
    case ProcessKind::Xstar: return "Xstar";
    case ProcessKind::Zstar: return "Zstar";
    case ProcessKind::Xn: return "Xn";
    case ProcessKind::Zn: return "Zn";
    case ProcessKind::ZnMarked: return "ZnMarked";
    case ProcessKind::Zn_cut: return "Zn_cut";
    }
    return "?";
}

namespace {

double d(State i) { return static_cast<double>(i); }

State require_level(const std::optional<State>& n, State lo, State hi, ProcessKind kind) {
    if (!n) throw RangeError(to_string(kind) + " needs a level n");
    if (*n < lo || *n > hi)
        throw RangeError("level n = " + std::to_string(*n) + " outside [" + std::to_string(lo) +
                         ":" + std::to_string(hi) + "]");
    return *n;
}

// Birth rate with the schedule cut at the working extent.
double lam(const RateSchedule& s, State top, State i) { return i < top ? s.lambda(i) : 0.0; }

Generator build_x(const RateSchedule& s, State top) {
    Generator::Builder b(0, top, true);
    for (State i = 1; i <= top; ++i) {
        b.add(i, i + 1, d(i) * lam(s, top, i));
        b.add(i, i - 1, d(i) * s.mu(i));
        b.add(i, kCemetery, d(i) * s.kappa());
    }
    return b.label("X").build();
}

Generator build_z(const RateSchedule& s, State top) {
    Generator::Builder b(1, top, false);
    for (State i = 1; i <= top; ++i) {
        b.add(i, i + 1, d(i) * lam(s, top, i));
        if (i >= 2) b.add(i, i - 1, d(i - 1) * s.mu(i) + s.kappa());
        if (i >= 3) b.add_run(i, 1, i - 2, s.kappa());
    }
    return b.label("Z").build();
}

Generator build_xstar(const RateSchedule& s, State top) {
    Generator::Builder b(1, top + 1, false);
    for (State i = 1; i <= top + 1; ++i) {
        if (i <= top) b.add(i, i + 1, d(i) * s.mu(i));
        if (i >= 2) b.add(i, i - 1, d(i - 1) * lam(s, top, i - 1) + s.kappa());
        if (i >= 3) b.add_run(i, 1, i - 2, s.kappa());
    }
    return b.label("Xstar").build();
}

Generator build_zstar(const RateSchedule& s, State top) {
    Generator::Builder b(1, top, true);
    for (State i = 2; i <= top; ++i) {
        if (i <= top - 1) b.add(i, i + 1, d(i - 1) * s.mu(i));
        b.add(i, i - 1, d(i - 1) * lam(s, top, i - 1));
        b.add(i, kCemetery, d(i - 1) * (s.kappa() + (i == top ? s.mu(i) : 0.0)));
    }
    return b.label("Zstar").build();
}

Generator build_xn(const RateSchedule& s, State top, State n) {
    Generator::Builder b(n - 1, top, true);
    for (State i = n; i <= top; ++i) {
        b.add(i, i + 1, lam(s, top, i));
        b.add(i, i - 1, s.mu(i));
        b.add(i, kCemetery, s.kappa());
    }
    return b.label("Xn").build();
}

// Z^(n); with `cut` the catastrophe arrows into n go to the cemetery instead.
Generator build_zn(const RateSchedule& s, State top, State n, bool cut) {
    Generator::Builder b(n, top, cut);
    for (State i = n; i <= top; ++i) {
        b.add(i, i + 1, lam(s, top, i));
        if (i >= n + 2) b.add(i, i - 1, s.mu(i));
        if (i >= n + 1) {
            if (i == n + 1) b.add(i, n, s.mu(i));
            b.add(i, cut ? kCemetery : n, s.kappa());
        }
    }
    return b.label(cut ? "Zn_cut" : "Zn").build();
}

} // namespace

Generator build_generator(ProcessKind kind, const RateSchedule& sched, std::optional<State> n) {
    const State top = sched.working_extent();
    switch (kind) {
    case ProcessKind::X: return build_x(sched, top);
    case ProcessKind::Z: return build_z(sched, top);
    case ProcessKind::Xstar: return build_xstar(sched, top);
    case ProcessKind::Zstar: return build_zstar(sched, top);
    case ProcessKind::Xn: return build_xn(sched, top, require_level(n, 1, top, kind));
    case ProcessKind::Zn: return build_zn(sched, top, require_level(n, 1, top, kind), false);
    case ProcessKind::Zn_cut: return build_zn(sched, top, require_level(n, 1, top, kind), true);
    case ProcessKind::ZnMarked:
        return build_marked_generator(sched, require_level(n, 1, top, kind)).generator();
    }
    throw RangeError("unknown process kind");
}

MarkedGenerator build_marked_generator(const RateSchedule& sched, State n) {
    const State top = sched.working_extent();
    if (n < 1 || n > top) throw RangeError("level n outside [1:" + std::to_string(top) + "]");
    const State width = top - n + 1;
    const Generator zn = build_zn(sched, top, n, false);
    Generator::Builder b(n, n + 2 * width - 1, false);
    for (State i = n; i <= top; ++i) {
        zn.for_each(i, [&](State j, double r) {
            b.add(i + width, j + width, r);
            if (j > n) b.add(i, j, r);
        });
        if (i == n + 1) b.add(i, n, sched.mu(i));
        if (i >= n + 1) b.add(i, n + width, sched.kappa());
    }
    return MarkedGenerator(b.label("ZnMarked").build(), n, width);
}

} // namespace bdk
