#pragma once

// Builders shared by the unit suites.  Regime strings use one char per node:
// D democracy, A autocracy, '.' anocracy, '?' missing polity.

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tergm/panel.hpp"

namespace testutil {

using namespace tergm;

inline YearSlice make_slice(int year, const std::string& regimes,
                            const std::vector<std::pair<int, int>>& edges = {}) {
  YearSlice s;
  s.year = year;
  int n = static_cast<int>(regimes.size());
  for (int i = 0; i < n; ++i) s.roster.push_back("S" + std::to_string(i));
  s.polity.assign(n, std::nan(""));
  s.cinc.assign(n, std::nan(""));
  s.dem.assign(n, -1);
  s.aut.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    switch (regimes[i]) {
      case 'D': s.dem[i] = 1; s.aut[i] = 0; s.polity[i] = 8; break;
      case 'A': s.dem[i] = 0; s.aut[i] = 1; s.polity[i] = -8; break;
      case '.': s.dem[i] = 0; s.aut[i] = 0; s.polity[i] = 0; break;
      case '?': break;
      default: throw std::logic_error("bad regime char");
    }
  }
  s.net = NetworkState(n);
  for (auto [i, j] : edges) s.net.set(i, j, true);
  return s;
}

inline TemporalNetworkPanel make_panel(std::vector<YearSlice> slices,
                                       EdgeRule rule = EdgeRule::all_mid) {
  return TemporalNetworkPanel(std::make_shared<RawTables>(), std::move(slices), rule);
}

inline YearSlice random_slice(std::mt19937_64& rng, int n, double edge_p,
                              bool allow_missing = true) {
  const std::string alphabet = allow_missing ? "DA.?" : "DA.";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string regimes;
  for (int i = 0; i < n; ++i) regimes.push_back(alphabet[pick(rng)]);
  YearSlice s = make_slice(2000, regimes);
  std::bernoulli_distribution coin(edge_p);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) s.net.set(i, j, true);
  return s;
}

inline void add_random_dyad_cov(std::mt19937_64& rng, YearSlice& s, const std::string& name,
                                double missing_p = 0.0) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::bernoulli_distribution miss(missing_p);
  std::vector<double> col(dyad_count(s.n()));
  for (auto& v : col) v = miss(rng) ? std::nan("") : unif(rng);
  s.dyad_cov[name] = std::move(col);
}

}  // namespace testutil
