#include "prologian/analytics/tree_diff.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace prologian {

namespace {

// Post-order flattening with leftmost-leaf indices.
struct Flat {
  std::vector<std::string> labels;
  std::vector<std::size_t> leftmost;
  std::vector<std::size_t> keyroots;
};

std::string label_of(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Atom: return "a:" + t.name;
    case Term::Kind::Integer: return "i:" + std::to_string(t.int_value);
    case Term::Kind::Float: return "f:" + std::to_string(t.float_value);
    case Term::Kind::Var: return "v:" + t.name;
    case Term::Kind::Compound: return "c:" + t.name;
  }
  return "";
}

std::size_t flatten(const Term& t, Flat& f) {
  std::size_t first = f.labels.size();
  std::size_t leftmost = first;
  bool have = false;
  for (const Term& a : t.args) {
    std::size_t l = flatten(a, f);
    if (!have) leftmost = l, have = true;
  }
  f.labels.push_back(label_of(t));
  f.leftmost.push_back(have ? leftmost : f.labels.size() - 1);
  return f.leftmost.back();
}

Flat make_flat(const Term& t) {
  Flat f;
  flatten(t, f);
  std::vector<bool> seen(f.labels.size(), false);
  for (std::size_t i = f.labels.size(); i-- > 0;) {
    if (!seen[f.leftmost[i]]) {
      seen[f.leftmost[i]] = true;
      f.keyroots.push_back(i);
    }
  }
  std::sort(f.keyroots.begin(), f.keyroots.end());
  return f;
}

}  // namespace

std::size_t tree_edit_distance(const Term& a, const Term& b) {
  Flat fa = make_flat(a);
  Flat fb = make_flat(b);
  std::size_t n = fa.labels.size();
  std::size_t m = fb.labels.size();
  std::vector<std::vector<std::size_t>> td(n, std::vector<std::size_t>(m, 0));
  std::vector<std::vector<std::size_t>> fd(n + 1, std::vector<std::size_t>(m + 1, 0));

  for (std::size_t i : fa.keyroots) {
    for (std::size_t j : fb.keyroots) {
      std::size_t li = fa.leftmost[i];
      std::size_t lj = fb.leftmost[j];
      // fd[x][y] covers nodes li..li+x-1 and lj..lj+y-1.
      fd[0][0] = 0;
      for (std::size_t x = 1; x <= i - li + 1; ++x) fd[x][0] = fd[x - 1][0] + 1;
      for (std::size_t y = 1; y <= j - lj + 1; ++y) fd[0][y] = fd[0][y - 1] + 1;
      for (std::size_t x = 1; x <= i - li + 1; ++x) {
        std::size_t ni = li + x - 1;
        for (std::size_t y = 1; y <= j - lj + 1; ++y) {
          std::size_t nj = lj + y - 1;
          std::size_t del = fd[x - 1][y] + 1;
          std::size_t ins = fd[x][y - 1] + 1;
          if (fa.leftmost[ni] == li && fb.leftmost[nj] == lj) {
            std::size_t rel = fd[x - 1][y - 1] + (fa.labels[ni] == fb.labels[nj] ? 0 : 1);
            fd[x][y] = std::min({del, ins, rel});
            td[ni][nj] = fd[x][y];
          } else {
            std::size_t px = fa.leftmost[ni] - li;
            std::size_t py = fb.leftmost[nj] - lj;
            fd[x][y] = std::min({del, ins, fd[px][py] + td[ni][nj]});
          }
        }
      }
    }
  }
  return td[n - 1][m - 1];
}

std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<std::int64_t>>& cost) {
  std::size_t n = cost.size();
  for (const auto& row : cost)
    if (row.size() != n) throw std::invalid_argument("assignment cost matrix must be square");
  if (n == 0) return {};
  constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
  // 1-based potentials formulation; p[j] is the row matched to column j.
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0], j1 = 0;
      std::int64_t delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        std::int64_t cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) minv[j] = cur, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) u[p[j]] += delta, v[j] -= delta;
        else minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace prologian
