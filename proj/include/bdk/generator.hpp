#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bdk/schedule.hpp"

namespace bdk {

/// Rate `rate` to every state of [first:last]. Catastrophe rows of the Z
/// family are stored this way so that rows stay O(1) in memory.
struct UniformRun {
    State first = 0;
    State last = -1;
    double rate = 0.0;
    double total() const { return last >= first ? rate * static_cast<double>(last - first + 1) : 0.0; }
    bool contains(State j) const { return j >= first && j <= last; }
};

struct Transition {
    State to;
    double rate;
};

/// Sparse CTMC generator on the contiguous range [lo:hi], plus an optional
/// cemetery state kCemetery. The diagonal is implicit.
class Generator {
  public:
    class Builder {
      public:
        Builder(State lo, State hi, bool cemetery);
        /// Accumulates; zero rates and self-loops are ignored.
        Builder& add(State from, State to, double rate);
        Builder& add_run(State from, State first, State last, double rate);
        Builder& label(std::string text);
        Generator build();

      private:
        std::unique_ptr<Generator> g_;
        std::vector<std::map<State, double>> pending_;
    };

    State lo() const noexcept { return lo_; }
    State hi() const noexcept { return hi_; }
    bool has_cemetery() const noexcept { return cemetery_; }
    std::size_t size() const noexcept {
        return static_cast<std::size_t>(hi_ - lo_ + 1) + (cemetery_ ? 1 : 0);
    }
    const std::string& label() const noexcept { return label_; }

    bool contains(State s) const noexcept {
        return (s >= lo_ && s <= hi_) || (cemetery_ && s == kCemetery);
    }
    /// Dense position of a state: [lo:hi] in order, cemetery last.
    std::size_t index(State s) const;
    State state_at(std::size_t k) const;
    std::vector<State> states() const;

    /// Off-diagonal rate q(i, j); 0 for i == j.
    double rate(State i, State j) const;
    double out_rate(State i) const;
    bool is_absorbing(State i) const { return out_rate(i) == 0.0; }
    std::vector<State> absorbing_states() const;

    const std::vector<Transition>& transitions(State i) const { return rows_[index(i)]; }
    const std::optional<UniformRun>& run(State i) const { return runs_[index(i)]; }

    /// Calls f(to, rate) for every positive off-diagonal entry of row i,
    /// runs expanded, in increasing target order with the cemetery last.
    template <class F>
    void for_each(State i, F&& f) const {
        const std::size_t k = index(i);
        const auto& row = rows_[k];
        const auto& run = runs_[k];
        std::size_t p = 0;
        if (run) {
            for (State j = run->first; j <= run->last; ++j) {
                double r = run->rate;
                while (p < row.size() && row[p].to < j) {
                    f(row[p].to, row[p].rate);
                    ++p;
                }
                if (p < row.size() && row[p].to == j) {
                    r += row[p].rate;
                    ++p;
                }
                f(j, r);
            }
        }
        for (; p < row.size(); ++p) f(row[p].to, row[p].rate);
    }

    /// Full generator including the diagonal, in index() order.
    Eigen::MatrixXd dense() const;

  private:
    Generator() = default;

    State lo_ = 0, hi_ = -1;
    bool cemetery_ = false;
    std::string label_;
    std::vector<std::vector<Transition>> rows_; // sorted by target
    std::vector<std::optional<UniformRun>> runs_;
    std::vector<double> out_;
};

/// Generator over (i, flag) pairs, flag in {star, circ}; (i, star) is stored
/// as state i and (i, circ) as i + width.
class MarkedGenerator {
  public:
    MarkedGenerator(Generator g, State level, State width)
        : gen_(std::move(g)), level_(level), width_(width) {}

    const Generator& generator() const noexcept { return gen_; }
    State level() const noexcept { return level_; }
    State width() const noexcept { return width_; }
    State star(State i) const noexcept { return i; }
    State circ(State i) const noexcept { return i + width_; }
    bool is_circ(State s) const noexcept { return s >= level_ + width_; }
    State base(State s) const noexcept { return is_circ(s) ? s - width_ : s; }

  private:
    Generator gen_;
    State level_;
    State width_;
};

enum class ProcessKind { X, Z, Xstar, Zstar, Xn, Zn, ZnMarked, Zn_cut };

ProcessKind parse_process_kind(const std::string& name);
std::string to_string(ProcessKind kind);

/// Generator of the given family. `n` is the level for Xn, Zn and Zn_cut.
/// Infinite schedules are cut at their truncation hint.
Generator build_generator(ProcessKind kind, const RateSchedule& sched,
                          std::optional<State> n = std::nullopt);

MarkedGenerator build_marked_generator(const RateSchedule& sched, State n);

} // namespace bdk
