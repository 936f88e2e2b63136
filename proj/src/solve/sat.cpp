#include "equivfuse/solve/sat.h"

#include <algorithm>
#include <cstdlib>

namespace equivfuse::solve {
namespace {

// Literal encoding: 2*v for v, 2*v+1 for -v.
using Lit = uint32_t;
inline Lit mkLit(int dimacs) { return dimacs > 0 ? 2u * static_cast<Lit>(dimacs) : 2u * static_cast<Lit>(-dimacs) + 1; }
inline Lit neg(Lit l) { return l ^ 1u; }
inline uint32_t var(Lit l) { return l >> 1; }

constexpr int8_t kUndef = -1;
constexpr int kNoReason = -1;

struct Clause {
  std::vector<Lit> lits;
  bool learnt = false;
  bool deleted = false;
  double activity = 0;
};

// Indexed max-heap of variables keyed by activity.
class VarHeap {
 public:
  explicit VarHeap(const std::vector<double> &act) : act_(act) {}
  void resize(std::size_t n) { pos_.assign(n, -1); }
  bool contains(uint32_t v) const { return pos_[v] >= 0; }
  bool empty() const { return heap_.empty(); }
  void insert(uint32_t v) {
    if (contains(v))
      return;
    pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    up(heap_.size() - 1);
  }
  void increased(uint32_t v) {
    if (contains(v))
      up(static_cast<std::size_t>(pos_[v]));
  }
  uint32_t pop() {
    uint32_t top = heap_[0];
    heap_[0] = heap_.back();
    pos_[heap_[0]] = 0;
    heap_.pop_back();
    pos_[top] = -1;
    if (!heap_.empty())
      down(0);
    return top;
  }

 private:
  bool less(uint32_t a, uint32_t b) const { return act_[a] > act_[b] || (act_[a] == act_[b] && a < b); }
  void up(std::size_t i) {
    uint32_t v = heap_[i];
    while (i > 0) {
      std::size_t p = (i - 1) / 2;
      if (!less(v, heap_[p]))
        break;
      heap_[i] = heap_[p];
      pos_[heap_[i]] = static_cast<int>(i);
      i = p;
    }
    heap_[i] = v;
    pos_[v] = static_cast<int>(i);
  }
  void down(std::size_t i) {
    uint32_t v = heap_[i];
    for (;;) {
      std::size_t c = 2 * i + 1;
      if (c >= heap_.size())
        break;
      if (c + 1 < heap_.size() && less(heap_[c + 1], heap_[c]))
        ++c;
      if (!less(heap_[c], v))
        break;
      heap_[i] = heap_[c];
      pos_[heap_[i]] = static_cast<int>(i);
      i = c;
    }
    heap_[i] = v;
    pos_[v] = static_cast<int>(i);
  }

  const std::vector<double> &act_;
  std::vector<uint32_t> heap_;
  std::vector<int> pos_;
};

uint64_t luby(uint64_t i) {
  // Finite subsequence containing index i, then the position within it.
  uint64_t size = 1, seq = 0;
  while (size < i + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != i) {
    size = (size - 1) >> 1;
    --seq;
    i = i % size;
  }
  return uint64_t{1} << seq;
}

class Solver {
 public:
  Solver(const backends::Cnf &cnf, const SatOptions &opts) : opts_(opts), heap_(activity_) {
    n_ = static_cast<uint32_t>(std::max(cnf.numVars, 0));
    for (const auto &cl : cnf.clauses)
      for (int l : cl)
        n_ = std::max(n_, static_cast<uint32_t>(std::abs(l)));
    value_.assign(n_ + 1, kUndef);
    level_.assign(n_ + 1, 0);
    reason_.assign(n_ + 1, kNoReason);
    phase_.assign(n_ + 1, 0);
    seen_.assign(n_ + 1, 0);
    activity_.assign(n_ + 1, 0);
    watches_.assign(2 * (n_ + 1), {});
    heap_.resize(n_ + 1);
    for (uint32_t v = 1; v <= n_; ++v)
      heap_.insert(v);
    for (const auto &cl : cnf.clauses)
      if (!addInput(cl))
        ok_ = false;
  }

  SatResult run() {
    SatResult r;
    if (!ok_ || propagate() != kNoReason) {
      r.status = SatStatus::Unsat;
      return r;
    }
    SatStatus st = opts_.algorithm == SatAlgorithm::Cdcl ? cdcl() : dpll();
    r.status = st;
    r.conflicts = conflicts_;
    r.decisions = decisions_;
    if (st == SatStatus::Sat) {
      r.model.assign(n_ + 1, false);
      for (uint32_t v = 1; v <= n_; ++v)
        r.model[v] = value_[v] == 1;
    }
    return r;
  }

 private:
  int8_t litValue(Lit l) const {
    int8_t v = value_[var(l)];
    return v == kUndef ? kUndef : static_cast<int8_t>(v ^ static_cast<int8_t>(l & 1));
  }
  int decisionLevel() const { return static_cast<int>(trailLim_.size()); }

  void assign(Lit l, int reason) {
    uint32_t v = var(l);
    value_[v] = static_cast<int8_t>((l & 1) ^ 1);
    level_[v] = decisionLevel();
    reason_[v] = reason;
    trail_.push_back(l);
  }

  bool addInput(const std::vector<int> &cl) {
    std::vector<Lit> lits;
    for (int d : cl)
      lits.push_back(mkLit(d));
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 0; i + 1 < lits.size(); ++i)
      if (lits[i + 1] == neg(lits[i]))
        return true;  // tautology
    // Drop literals already false at level 0; skip satisfied clauses.
    std::vector<Lit> kept;
    for (Lit l : lits) {
      int8_t v = litValue(l);
      if (v == 1)
        return true;
      if (v == kUndef)
        kept.push_back(l);
    }
    if (kept.empty())
      return false;
    if (kept.size() == 1) {
      assign(kept[0], kNoReason);
      return true;
    }
    attach(addClause(std::move(kept), false));
    return true;
  }

  int addClause(std::vector<Lit> lits, bool learnt) {
    clauses_.push_back({std::move(lits), learnt, false, 0});
    return static_cast<int>(clauses_.size() - 1);
  }
  void attach(int ci) {
    const auto &c = clauses_[static_cast<std::size_t>(ci)];
    watches_[c.lits[0]].push_back(ci);
    watches_[c.lits[1]].push_back(ci);
  }

  // Returns the conflicting clause or kNoReason.
  int propagate() {
    while (qhead_ < trail_.size()) {
      Lit falseLit = neg(trail_[qhead_++]);
      auto &ws = watches_[falseLit];
      std::size_t keep = 0;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        int ci = ws[i];
        Clause &c = clauses_[static_cast<std::size_t>(ci)];
        if (c.deleted)
          continue;
        if (c.lits[0] == falseLit)
          std::swap(c.lits[0], c.lits[1]);
        if (litValue(c.lits[0]) == 1) {
          ws[keep++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k) {
          if (litValue(c.lits[k]) != 0) {
            std::swap(c.lits[1], c.lits[k]);
            watches_[c.lits[1]].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved)
          continue;
        ws[keep++] = ci;
        if (litValue(c.lits[0]) == 0) {
          for (std::size_t j = i + 1; j < ws.size(); ++j)
            ws[keep++] = ws[j];
          ws.resize(keep);
          qhead_ = trail_.size();
          return ci;
        }
        assign(c.lits[0], ci);
      }
      ws.resize(keep);
    }
    return kNoReason;
  }

  void backtrack(int level) {
    if (decisionLevel() <= level)
      return;
    std::size_t stop = trailLim_[static_cast<std::size_t>(level)];
    for (std::size_t i = trail_.size(); i-- > stop;) {
      uint32_t v = var(trail_[i]);
      phase_[v] = value_[v];
      value_[v] = kUndef;
      reason_[v] = kNoReason;
      heap_.insert(v);
    }
    trail_.resize(stop);
    trailLim_.resize(static_cast<std::size_t>(level));
    qhead_ = trail_.size();
  }

  void bumpVar(uint32_t v) {
    if ((activity_[v] += varInc_) > 1e100) {
      for (auto &a : activity_)
        a *= 1e-100;
      varInc_ *= 1e-100;
    }
    heap_.increased(v);
  }
  void bumpClause(Clause &c) {
    if ((c.activity += claInc_) > 1e20) {
      for (auto &k : clauses_)
        if (k.learnt)
          k.activity *= 1e-20;
      claInc_ *= 1e-20;
    }
  }

  // First-UIP conflict analysis. Returns the learnt clause (asserting
  // literal first) and the backjump level.
  std::pair<std::vector<Lit>, int> analyze(int confl) {
    std::vector<Lit> learnt{0};
    int pathCount = 0;
    Lit p = 0;
    bool first = true;
    std::size_t idx = trail_.size();
    do {
      Clause &c = clauses_[static_cast<std::size_t>(confl)];
      if (c.learnt)
        bumpClause(c);
      for (std::size_t j = first ? 0 : 1; j < c.lits.size(); ++j) {
        Lit q = c.lits[j];
        uint32_t v = var(q);
        if (seen_[v] || level_[v] == 0)
          continue;
        seen_[v] = 1;
        bumpVar(v);
        if (level_[v] >= decisionLevel())
          ++pathCount;
        else
          learnt.push_back(q);
      }
      first = false;
      while (!seen_[var(trail_[--idx])]) {
      }
      p = trail_[idx];
      confl = reason_[var(p)];
      seen_[var(p)] = 0;
      --pathCount;
    } while (pathCount > 0);
    learnt[0] = neg(p);

    // Drop literals implied by the rest of the clause (local minimization).
    std::vector<Lit> analyzed = learnt;
    std::size_t keep = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
      uint32_t v = var(learnt[i]);
      int r = reason_[v];
      bool redundant = r != kNoReason;
      if (redundant) {
        const auto &rc = clauses_[static_cast<std::size_t>(r)].lits;
        for (std::size_t k = 1; k < rc.size() && redundant; ++k)
          redundant = seen_[var(rc[k])] || level_[var(rc[k])] == 0;
      }
      if (!redundant)
        learnt[keep++] = learnt[i];
    }
    learnt.resize(keep);
    for (Lit l : analyzed)
      seen_[var(l)] = 0;

    int back = 0;
    if (learnt.size() > 1) {
      std::size_t maxI = 1;
      for (std::size_t i = 2; i < learnt.size(); ++i)
        if (level_[var(learnt[i])] > level_[var(learnt[maxI])])
          maxI = i;
      std::swap(learnt[1], learnt[maxI]);
      back = level_[var(learnt[1])];
    }
    return {learnt, back};
  }

  bool locked(int ci) const {
    const Clause &c = clauses_[static_cast<std::size_t>(ci)];
    uint32_t v = var(c.lits[0]);
    return reason_[v] == ci && litValue(c.lits[0]) == 1;
  }

  // Deletes the less active half of the learnt clauses; called at level 0.
  void reduceDb() {
    std::vector<int> learnts;
    for (std::size_t i = 0; i < clauses_.size(); ++i)
      if (clauses_[i].learnt && !clauses_[i].deleted && clauses_[i].lits.size() > 2)
        learnts.push_back(static_cast<int>(i));
    std::sort(learnts.begin(), learnts.end(), [&](int a, int b) {
      return clauses_[static_cast<std::size_t>(a)].activity < clauses_[static_cast<std::size_t>(b)].activity;
    });
    for (std::size_t i = 0; i < learnts.size() / 2; ++i)
      if (!locked(learnts[i]))
        clauses_[static_cast<std::size_t>(learnts[i])].deleted = true;
    for (auto &ws : watches_)
      ws.erase(std::remove_if(ws.begin(), ws.end(),
                              [&](int ci) { return clauses_[static_cast<std::size_t>(ci)].deleted; }),
               ws.end());
  }

  bool pickBranch(Lit &out) {
    while (!heap_.empty()) {
      uint32_t v = heap_.pop();
      if (value_[v] == kUndef) {
        out = 2 * v + (phase_[v] == 1 ? 0u : 1u);
        return true;
      }
    }
    return false;
  }

  SatStatus cdcl() {
    uint64_t restarts = 0, untilRestart = 100 * luby(0), learntsCap = clauses_.size() / 3 + 1000;
    std::size_t liveLearnts = 0;
    for (;;) {
      int confl = propagate();
      if (confl != kNoReason) {
        ++conflicts_;
        if (decisionLevel() == 0)
          return SatStatus::Unsat;
        auto [learnt, back] = analyze(confl);
        backtrack(back);
        if (learnt.size() == 1) {
          assign(learnt[0], kNoReason);
        } else {
          int ci = addClause(learnt, true);
          attach(ci);
          bumpClause(clauses_[static_cast<std::size_t>(ci)]);
          assign(learnt[0], ci);
          ++liveLearnts;
        }
        varInc_ /= 0.95;
        claInc_ /= 0.999;
        if (opts_.conflictLimit && conflicts_ >= opts_.conflictLimit)
          return SatStatus::Unknown;
        if (untilRestart > 0)
          --untilRestart;
        continue;
      }
      if (untilRestart == 0) {
        backtrack(0);
        untilRestart = 100 * luby(++restarts);
        if (liveLearnts > learntsCap) {
          reduceDb();
          liveLearnts /= 2;
          learntsCap += learntsCap / 10;
        }
        continue;
      }
      Lit next;
      if (!pickBranch(next))
        return SatStatus::Sat;
      ++decisions_;
      trailLim_.push_back(trail_.size());
      assign(next, kNoReason);
    }
  }

  // Chronological backtracking: flip the most recent unflipped decision.
  SatStatus dpll() {
    std::vector<bool> flipped;
    for (;;) {
      int confl = propagate();
      if (confl != kNoReason) {
        ++conflicts_;
        if (opts_.conflictLimit && conflicts_ >= opts_.conflictLimit)
          return SatStatus::Unknown;
        while (!flipped.empty() && flipped.back()) {
          flipped.pop_back();
          backtrack(decisionLevel() - 1);
        }
        if (flipped.empty())
          return SatStatus::Unsat;
        Lit d = trail_[trailLim_.back()];
        backtrack(decisionLevel() - 1);
        flipped.back() = true;
        trailLim_.push_back(trail_.size());
        assign(neg(d), kNoReason);
        continue;
      }
      Lit next = 0;
      uint32_t v = 1;
      while (v <= n_ && value_[v] != kUndef)
        ++v;
      if (v > n_)
        return SatStatus::Sat;
      next = 2 * v + 1;  // try false first
      ++decisions_;
      flipped.push_back(false);
      trailLim_.push_back(trail_.size());
      assign(next, kNoReason);
    }
  }

  SatOptions opts_;
  uint32_t n_ = 0;
  bool ok_ = true;
  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<int8_t> value_, phase_;
  std::vector<char> seen_;
  std::vector<int> level_, reason_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trailLim_;
  std::size_t qhead_ = 0;
  std::vector<double> activity_;
  VarHeap heap_;
  double varInc_ = 1, claInc_ = 1;
  uint64_t conflicts_ = 0, decisions_ = 0;
};

} // namespace

SatResult solveCnf(const backends::Cnf &cnf, const SatOptions &opts) { return Solver(cnf, opts).run(); }

} // namespace equivfuse::solve
