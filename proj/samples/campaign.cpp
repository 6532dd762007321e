// Small measurement campaign: random graphs, every variant, synchronous and
// distributed daemons. Prints one line per (n, variant, daemon) with the
// worst rounds and steps observed against the round bound (HC has none).

#include <cstdio>
#include <string>

#include "stabsim/stabsim.hpp"

using namespace stabsim;

int main(int argc, char** argv) {
  const int runs = argc > 1 ? std::stoi(argv[1]) : 200;
  std::printf("%-3s %-4s %-12s %10s %10s %10s\n", "n", "algo", "daemon", "max_rounds", "bound", "max_steps");
  for (std::size_t n : {4u, 6u, 8u}) {
    for (Variant v : {Variant::U, Variant::B, Variant::HC, Variant::FHC}) {
      for (int daemon = 0; daemon < 2; ++daemon) {
        std::size_t max_rounds = 0, max_steps = 0, worst_bound = 0;
        for (int r = 0; r < runs; ++r) {
          Rng rng(mix_seed(r, n));
          const Graph g = random_connected_graph(n, 0.3, rng);
          const std::uint32_t diam = g.diameter();
          AlgorithmSpec spec{v, diam + 1};
          if (v == Variant::U) spec.D = 0;
          const auto init = random_configuration(spec, g, r, 3 * diam);
          const DaemonStrategy d =
              daemon == 0 ? DaemonStrategy{Synchronous{}} : DaemonStrategy{DistributedRandom{std::uint64_t(r), 0.5}};
          RunOptions opts;
          opts.record_trace = false;
          const auto t = run(spec, g, init, d, opts);
          if (t.outcome != Outcome::Terminal || !is_legitimate(g, t.final_config)) {
            std::fprintf(stderr, "run %d on n=%zu did not stabilize\n", r, n);
            return 1;
          }
          max_rounds = std::max(max_rounds, t.round_count);
          max_steps = std::max(max_steps, t.step_count);
          worst_bound = std::max<std::size_t>(worst_bound, diam + (v == Variant::FHC ? 1 : 0));
        }
        const std::string bound = v == Variant::HC ? "-" : std::to_string(worst_bound);
        std::printf("%-3zu %-4s %-12s %10zu %10s %10zu\n", n, std::string(to_string(v)).c_str(),
                    daemon == 0 ? "sync" : "distributed", max_rounds, bound.c_str(), max_steps);
      }
    }
  }
}
