#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "wassinc/errors.hpp"
#include "wassinc/measure.hpp"

namespace wassinc::assignment {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct DualSolution {
  std::vector<std::size_t> row_to_col;
  std::vector<double> u;  // row potentials
  std::vector<double> v;  // column potentials
};

// Shortest augmenting path Hungarian method with potentials, O(n^3).
DualSolution hungarian(std::span<const double> cost, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based internally; index 0 is the virtual source column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> col_owner(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    col_owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = col_owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[col_owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (col_owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      col_owner[j0] = col_owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  DualSolution out;
  out.row_to_col.assign(n, kNone);
  for (std::size_t j = 1; j <= n; ++j) out.row_to_col[col_owner[j] - 1] = j - 1;
  out.u.assign(u.begin() + 1, u.end());
  out.v.assign(v.begin() + 1, v.end());
  return out;
}

// Any optimal permutation uses only edges that are tight for an optimal dual
// pair, so the lexicographically smallest optimum is the lexicographically
// smallest perfect matching of the tight subgraph.  Rows are fixed greedily;
// each tentative edge is accepted when the displaced row can be rematched
// along an alternating path of tight edges.
class TightMatching {
 public:
  TightMatching(std::span<const double> cost, std::size_t n, const DualSolution& dual)
      : n_(n), tight_(n * n, 0), row_to_col_(dual.row_to_col), col_to_row_(n, kNone),
        row_fixed_(n, 0), col_fixed_(n, 0) {
    double scale = 0.0;
    for (double c : cost) scale = std::max(scale, std::abs(c));
    const double tol = 1e-11 * (1.0 + scale);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        tight_[i * n + j] = (cost[i * n + j] - dual.u[i] - dual.v[j]) <= tol;
      }
      tight_[i * n + row_to_col_[i]] = 1;
      col_to_row_[row_to_col_[i]] = i;
    }
  }

  const std::vector<char>& tight() const { return tight_; }

  std::vector<std::size_t> lexicographic_min() {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (col_fixed_[j] || !tight_[i * n_ + j]) continue;
        if (row_to_col_[i] == j || reroute(i, j)) {
          row_fixed_[i] = 1;
          col_fixed_[j] = 1;
          break;
        }
      }
    }
    return row_to_col_;
  }

 private:
  // Force row -> col: the row currently holding col must find the column
  // released by row, through free (unfixed) tight edges.
  bool reroute(std::size_t row, std::size_t col) {
    const std::size_t displaced = col_to_row_[col];
    const std::size_t released = row_to_col_[row];
    std::vector<std::size_t> parent_col(n_, kNone);  // for each reached column: row we came from
    std::vector<char> seen_row(n_, 0);
    std::deque<std::size_t> queue{displaced};
    seen_row[displaced] = 1;
    while (!queue.empty()) {
      const std::size_t r = queue.front();
      queue.pop_front();
      for (std::size_t c = 0; c < n_; ++c) {
        if (c == col || col_fixed_[c] || parent_col[c] != kNone || !tight_[r * n_ + c]) continue;
        parent_col[c] = r;
        if (c == released) {
          // Flip the alternating path ending at `released`.
          std::size_t cur = c;
          while (true) {
            const std::size_t owner = parent_col[cur];
            const std::size_t previous = row_to_col_[owner];
            row_to_col_[owner] = cur;
            col_to_row_[cur] = owner;
            if (owner == displaced) break;
            cur = previous;
          }
          row_to_col_[row] = col;
          col_to_row_[col] = row;
          return true;
        }
        const std::size_t next = col_to_row_[c];
        if (next == row || seen_row[next]) continue;
        seen_row[next] = 1;
        queue.push_back(next);
      }
    }
    return false;
  }

  std::size_t n_;
  std::vector<char> tight_;
  std::vector<std::size_t> row_to_col_;
  std::vector<std::size_t> col_to_row_;
  std::vector<char> row_fixed_;
  std::vector<char> col_fixed_;
};

double permutation_sum(std::span<const double> cost, std::size_t n,
                       const std::vector<std::size_t>& perm) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += cost[i * n + perm[i]];
  return acc;
}

// Optimal permutations that tie in exact arithmetic can differ in the last
// bits of their floating-point sums.  Walks the tight perfect matchings in
// lexicographic order and keeps the one with the smallest rounded sum (the
// earliest on ties).  The walk stops after a fixed amount of work.
class FloatOptimum {
 public:
  FloatOptimum(std::span<const double> cost, std::size_t n, const std::vector<char>& tight)
      : cost_(cost), n_(n), tight_(tight), perm_(n, kNone), col_used_(n, 0) {}

  std::vector<std::size_t> search(std::vector<std::size_t> incumbent) {
    best_sum_ = std::numeric_limits<double>::infinity();
    visit(0);
    if (best_.empty() || permutation_sum(cost_, n_, incumbent) < best_sum_) return incumbent;
    return best_;
  }

 private:
  static constexpr std::size_t kBudget = 1'000'000;  // elementary edge visits

  static double permutation_sum(std::span<const double> cost, std::size_t n, const std::vector<std::size_t>& perm) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += cost[i * n + perm[i]];
    return acc;
  }

  void visit(std::size_t row) {
    if (row == n_) {
      const double sum = permutation_sum(cost_, n_, perm_);
      if (sum < best_sum_) {
        best_sum_ = sum;
        best_ = perm_;
      }
      return;
    }
    for (std::size_t c = 0; c < n_ && work_ < kBudget; ++c) {
      ++work_;
      if (col_used_[c] || !tight_[row * n_ + c]) continue;
      perm_[row] = c;
      col_used_[c] = 1;
      if (completable(row + 1)) visit(row + 1);
      col_used_[c] = 0;
    }
    perm_[row] = kNone;
  }

  // Kuhn's augmenting paths on the rows from `row` and the unused columns.
  bool completable(std::size_t row) {
    std::vector<std::size_t> owner(n_, kNone);
    for (std::size_t r = row; r < n_; ++r) {
      std::vector<char> seen(n_, 0);
      if (!augment(r, owner, seen)) return false;
    }
    return true;
  }

  bool augment(std::size_t r, std::vector<std::size_t>& owner, std::vector<char>& seen) {
    for (std::size_t c = 0; c < n_; ++c) {
      ++work_;
      if (col_used_[c] || seen[c] || !tight_[r * n_ + c]) continue;
      seen[c] = 1;
      if (owner[c] == kNone || augment(owner[c], owner, seen)) {
        owner[c] = r;
        return true;
      }
    }
    return false;
  }

  std::span<const double> cost_;
  std::size_t n_;
  const std::vector<char>& tight_;
  std::vector<std::size_t> perm_;
  std::vector<char> col_used_;
  std::vector<std::size_t> best_;
  double best_sum_ = 0.0;
  std::size_t work_ = 0;
};

}  // namespace

std::vector<std::size_t> solve(std::span<const double> cost, std::size_t n) {
  if (n == 0 || cost.size() != n * n) throw ShapeError("assignment needs a non-empty square cost matrix");
  for (double c : cost) {
    if (!std::isfinite(c)) throw DomainError("assignment cost matrix has non-finite entries");
  }
  const DualSolution dual = hungarian(cost, n);
  TightMatching matching(cost, n, dual);
  std::vector<std::size_t> lex = matching.lexicographic_min();
  // The tightness tolerance could admit a matching that is worse by rounding
  // noise; keep the Hungarian optimum in that case.
  if (permutation_sum(cost, n, lex) > permutation_sum(cost, n, dual.row_to_col)) lex = dual.row_to_col;
  const auto tight_edges = static_cast<std::size_t>(std::count(matching.tight().begin(), matching.tight().end(), 1));
  if (tight_edges == n) return lex;
  return FloatOptimum(cost, n, matching.tight()).search(std::move(lex));
}

}  // namespace wassinc::assignment
