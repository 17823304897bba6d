#include "mvd/sad.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace mvd {

double SADProfile::sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void SADProfile::trim() {
  std::size_t lead = 0;
  while (lead < weights.size() && weights[lead] == 0.0) ++lead;
  std::size_t tail = weights.size();
  while (tail > lead && weights[tail - 1] == 0.0) --tail;
  if (lead == tail) {
    offset = 0;
    weights.clear();
    return;
  }
  offset += static_cast<long>(lead);
  weights.assign(weights.begin() + static_cast<long>(lead), weights.begin() + static_cast<long>(tail));
}

SADProfile sad_init(long v) { return SADProfile{v, {1.0}}; }

SADProfile sad_step(const SADProfile& p, long u, double mu) {
  if (!(mu > 0.0 && mu <= 0.5)) throw std::invalid_argument("sad_step: mu must lie in (0, 1/2]");
  const double a = p.at(u), b = p.at(u + 1);
  if (a == 0.0 && b == 0.0) return p;
  SADProfile q = p;
  // widen so that both sites of the edge are addressable
  if (u < q.offset) {
    q.weights.insert(q.weights.begin(), static_cast<std::size_t>(q.offset - u), 0.0);
    q.offset = u;
  }
  if (u + 1 >= q.offset + static_cast<long>(q.weights.size()))
    q.weights.resize(static_cast<std::size_t>(u + 2 - q.offset), 0.0);
  q.weights[static_cast<std::size_t>(u - q.offset)] = (1.0 - mu) * a + mu * b;
  q.weights[static_cast<std::size_t>(u + 1 - q.offset)] = mu * a + (1.0 - mu) * b;
  q.trim();
  return q;
}

SADProfile sad_run(long start, const std::vector<std::pair<long, double>>& updates) {
  SADProfile p = sad_init(start);
  for (const auto& [edge, mu] : updates) p = sad_step(p, edge, mu);
  return p;
}

bool is_unimodal(const SADProfile& p) {
  const auto& w = p.weights;
  std::size_t i = 0;
  while (i + 1 < w.size() && w[i] <= w[i + 1]) ++i;
  while (i + 1 < w.size() && w[i] >= w[i + 1]) ++i;
  return i + 1 >= w.size();
}

namespace {

struct ProfileKey {
  std::vector<std::int64_t> q;
  bool operator==(const ProfileKey&) const = default;
};

struct ProfileKeyHash {
  std::size_t operator()(const ProfileKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (std::int64_t v : k.q) {
      h ^= static_cast<std::size_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct Search {
  int n = 0;             // number of sites
  int target = 0;        // index of the site at distance d
  double mu = 0.5;
  std::uint64_t budget = 0;
  std::uint64_t nodes = 0;
  double best = 0.0;
  std::vector<long> best_seq;
  std::vector<long> path;
  std::vector<double> caps;  // 1/(|site - target| + 1), the profile bound
  std::vector<int> edge_order;
  std::unordered_map<ProfileKey, int, ProfileKeyHash> seen;
  std::vector<int> scratch_order;

  // Relaxed bound on the final target weight: the target value after any
  // continuation is kappa . w for an achievable profile kappa started at the
  // target, so kappa(u) <= caps[u]; take the greedy fractional optimum.
  double upper_bound(const std::vector<double>& w) {
    auto& idx = scratch_order;
    idx.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return w[a] > w[b]; });
    double rem = 1.0, tot = 0.0;
    for (int i : idx) {
      if (w[i] <= 0.0 || rem <= 0.0) break;
      const double k = std::min(caps[static_cast<std::size_t>(i)], rem);
      tot += k * w[i];
      rem -= k;
    }
    return tot;
  }

  void dfs(std::vector<double>& w, int remaining) {
    if (++nodes > budget) throw SearchBudgetExceeded("sad_max_weight: node budget exceeded", best);
    if (w[static_cast<std::size_t>(target)] > best) {
      best = w[static_cast<std::size_t>(target)];
      best_seq = path;
    }
    if (remaining == 0) return;
    if (upper_bound(w) <= best + 1e-15) return;

    ProfileKey key;
    key.q.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      key.q[i] = static_cast<std::int64_t>(std::llround(w[i] * 1e12));
    auto [it, inserted] = seen.try_emplace(std::move(key), remaining);
    if (!inserted) {
      if (it->second >= remaining) return;
      it->second = remaining;
    }

    for (int u : edge_order) {
      const double a = w[static_cast<std::size_t>(u)], b = w[static_cast<std::size_t>(u) + 1];
      if (a == 0.0 && b == 0.0) continue;
      w[static_cast<std::size_t>(u)] = (1.0 - mu) * a + mu * b;
      w[static_cast<std::size_t>(u) + 1] = mu * a + (1.0 - mu) * b;
      path.push_back(u);
      dfs(w, remaining - 1);
      path.pop_back();
      w[static_cast<std::size_t>(u)] = a;
      w[static_cast<std::size_t>(u) + 1] = b;
    }
  }
};

}  // namespace

SadSearchResult sad_max_weight(int d, double mu, int max_updates, std::uint64_t node_budget) {
  if (d < 1) throw std::invalid_argument("sad_max_weight: d must be >= 1");
  if (!(mu > 0.0 && mu <= 0.5)) throw std::invalid_argument("sad_max_weight: mu must lie in (0, 1/2]");
  if (max_updates < 1) throw std::invalid_argument("sad_max_weight: max_updates must be >= 1");

  // Sites -(d+2) .. d+2 relative to the start; edges u in [-(d+2), d+1].
  const int lo = -(d + 2), hi = d + 2;
  Search s;
  s.n = hi - lo + 1;
  s.target = d - lo;
  s.mu = mu;
  s.budget = node_budget;
  const int start = -lo;
  s.caps.resize(static_cast<std::size_t>(s.n));
  for (int i = 0; i < s.n; ++i)
    s.caps[static_cast<std::size_t>(i)] = 1.0 / (std::abs(i - s.target) + 1);
  for (int u = 0; u + 1 < s.n; ++u) s.edge_order.push_back(u);
  // try the mass-forwarding edges between start and target first
  std::sort(s.edge_order.begin(), s.edge_order.end(), [&](int a, int b) {
    const bool fa = a >= start && a < s.target, fb = b >= start && b < s.target;
    if (fa != fb) return fa;
    return std::abs(a - start) < std::abs(b - start);
  });

  std::vector<double> w(static_cast<std::size_t>(s.n), 0.0);
  w[static_cast<std::size_t>(start)] = 1.0;
  s.dfs(w, max_updates);

  SadSearchResult r;
  r.best = s.best;
  r.nodes_visited = s.nodes;
  r.best_sequence.reserve(s.best_seq.size());
  for (long u : s.best_seq) r.best_sequence.push_back(u + lo);
  return r;
}

}  // namespace mvd
