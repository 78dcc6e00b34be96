#include <chrono>

#include "separata/log.hpp"
#include "separata/prover.hpp"

namespace separata {

// Enumerates commutative frames over n worlds with world 0 as a two-sided
// unit, then every valuation of the formula's atoms. Systems with partial
// determinism get partial-function tables, others arbitrary subsets.
std::optional<std::pair<KripkeModel, World>> find_countermodel(const Formula& f, const SystemConfig& cfg,
                                                               double timeout_seconds, int max_worlds) {
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(std::max(0.0, timeout_seconds)));
  bool functional = false;
  for (const auto& ax : cfg.axioms)
    if (ax.name == "pdet") functional = true;
  const std::vector<std::string> atoms = atom_names(f);
  std::uint64_t ticks = 0;

  for (int n = 1; n <= max_worlds; ++n) {
    // unordered pairs of non-unit worlds
    std::vector<std::pair<int, int>> pairs;
    for (int a = 1; a < n; ++a)
      for (int b = a; b < n; ++b) pairs.emplace_back(a, b);
    const std::uint64_t per_pair = functional ? static_cast<std::uint64_t>(n) + 1 : std::uint64_t{1} << n;
    std::uint64_t total = 1;
    bool too_big = false;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (total > (std::uint64_t{1} << 40) / per_pair) too_big = true;
      total *= per_pair;
    }
    if (too_big) break;
    const std::size_t vbits = atoms.size() * static_cast<std::size_t>(n);
    if (vbits > 20) break;

    KripkeModel m;
    for (int w = 0; w < n; ++w) m.worlds.push_back(w == 0 ? "e" : "h" + std::to_string(w));
    m.epsilon = 0;
    for (std::uint64_t code = 0; code < total; ++code) {
      if ((++ticks & 63) == 0 && Clock::now() > deadline) return std::nullopt;
      m.rel.clear();
      for (int a = 0; a < n; ++a) {
        m.rel.insert({0, static_cast<World>(a), static_cast<World>(a)});
        m.rel.insert({static_cast<World>(a), 0, static_cast<World>(a)});
      }
      std::uint64_t x = code;
      for (const auto& [a, b] : pairs) {
        std::uint64_t choice = x % per_pair;
        x /= per_pair;
        auto put = [&](int c) {
          m.rel.insert({static_cast<World>(a), static_cast<World>(b), static_cast<World>(c)});
          m.rel.insert({static_cast<World>(b), static_cast<World>(a), static_cast<World>(c)});
        };
        if (functional) {
          if (choice > 0) put(static_cast<int>(choice - 1));
        } else {
          for (int c = 0; c < n; ++c)
            if (choice >> c & 1) put(c);
        }
      }
      if (!check_frame(m, cfg.axioms).empty()) continue;
      for (std::uint64_t val = 0; val < (std::uint64_t{1} << vbits); ++val) {
        if ((++ticks & 255) == 0 && Clock::now() > deadline) return std::nullopt;
        m.valuation.clear();
        for (std::size_t i = 0; i < atoms.size(); ++i) {
          auto& ws = m.valuation[atoms[i]];
          for (int w = 0; w < n; ++w)
            if (val >> (i * n + w) & 1) ws.insert(static_cast<World>(w));
        }
        auto truth = eval_all(m, f);
        for (World w = 0; w < truth.size(); ++w)
          if (!truth[w]) {
            SEPARATA_LOG(1, "finite model search: counter-model with " << n << " worlds");
            return std::make_pair(m, w);
          }
      }
    }
  }
  return std::nullopt;
}

}  // namespace separata
