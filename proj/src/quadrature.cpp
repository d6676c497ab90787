#include "wavescat/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace wavescat::quad {

const GaussRule<double>& gl15() {
  static const GaussRule<double> rule = gauss_legendre<double>(15);
  return rule;
}

const GaussRule<double>& gauss(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule<double>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre<double>(n)).first;
  return it->second;
}

NodeSet composite_gauss(double a, double b, std::span<const double> breaks,
                        double max_panel, int per_panel) {
  if (!(b > a)) throw std::invalid_argument("composite_gauss: empty interval");
  std::vector<double> edges{a};
  for (double x : breaks)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<std::pair<double, double>> panels;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double len = edges[i + 1] - edges[i];
    const int pieces = max_panel > 0 ? std::max(1, int(std::ceil(len / max_panel))) : 1;
    for (int p = 0; p < pieces; ++p)
      panels.emplace_back(edges[i] + p * len / pieces,
                          p + 1 == pieces ? edges[i + 1] : edges[i] + (p + 1) * len / pieces);
  }
  const auto& rule = gauss(per_panel);
  NodeSet out{Eigen::VectorXd(Eigen::Index(panels.size()) * per_panel),
              Eigen::VectorXd(Eigen::Index(panels.size()) * per_panel)};
  Eigen::Index k = 0;
  for (auto [p0, p1] : panels) {
    const double half = 0.5 * (p1 - p0), mid = 0.5 * (p0 + p1);
    for (int i = 0; i < per_panel; ++i, ++k) {
      out.x(k) = mid + half * rule.nodes(i);
      out.w(k) = half * rule.weights(i);
    }
  }
  return out;
}

}  // namespace wavescat::quad
