#include "dicelab/enumeration.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "dicelab/errors.hpp"

namespace dicelab {

namespace {

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Incremental DFS state over one multiset word. Placing letter c at the
// current position decides, for the cyclic pair (c, c+1), that this
// occurrence beats every not-yet-placed occurrence of c+1; the pair
// (c-1, c) loses one undecided comparison per remaining c-1. A pair k is
// still satisfiable while 2*(wins[k] + rem[k]*rem[k+1]) > n^2.
struct Search {
  int letters = 0;
  std::int64_t target = 0;  // n^2, the comparison total of every cyclic pair
  std::vector<std::int32_t> rem;
  std::vector<std::int64_t> wins;
  std::int64_t total_positions = 0;
  unsigned long long found = 0;

  Search(int l, int n)
      : letters(l),
        target(std::int64_t(n) * n),
        rem(static_cast<std::size_t>(l), n),
        wins(std::size_t(l), 0),
        total_positions(std::int64_t(l) * n) {}

  int next(int c) const { return c + 1 == letters ? 0 : c + 1; }
  int prev(int c) const { return c == 0 ? letters - 1 : c - 1; }

  void place(int c) {
    wins[std::size_t(c)] += rem[std::size_t(next(c))];
    rem[std::size_t(c)] -= 1;
  }

  void unplace(int c) {
    rem[std::size_t(c)] += 1;
    wins[std::size_t(c)] -= rem[std::size_t(next(c))];
  }

  // Only the pair ending at c loses potential when c is placed.
  bool still_feasible_after(int c) const {
    const int p = prev(c);
    return 2 * (wins[std::size_t(p)] +
                std::int64_t(rem[std::size_t(p)]) * rem[std::size_t(c)]) > target;
  }

  void dfs(std::int64_t depth) {
    if (depth == total_positions) {
      for (int k = 0; k < letters; ++k)
        if (2 * wins[std::size_t(k)] <= target) return;
      ++found;
      return;
    }
    for (int c = 0; c < letters; ++c) {
      if (rem[std::size_t(c)] == 0) continue;
      place(c);
      if (still_feasible_after(c)) dfs(depth + 1);
      unplace(c);
    }
  }
};

// Prefixes of uniform depth whose subtrees are still alive; they partition
// the search space so workers can run share-nothing DFS and the counts add
// up to the same total for any worker count.
std::vector<std::vector<int>> build_prefixes(int letters, int faces, std::size_t want) {
  std::vector<std::vector<int>> frontier;
  {
    // Words are counted with the first letter fixed to letter 0; cyclically
    // relabeling letters is a bijection of the intransitive set that hits
    // each first letter exactly once, so the full count is `letters` times
    // the restricted one.
    Search probe(letters, faces);
    probe.place(0);
    if (probe.still_feasible_after(0)) frontier.push_back({0});
  }
  const std::int64_t total = std::int64_t(letters) * faces;
  std::int64_t depth = 1;
  while (!frontier.empty() && frontier.size() < want && depth < total) {
    std::vector<std::vector<int>> extended;
    extended.reserve(frontier.size() * std::size_t(letters));
    for (const auto& prefix : frontier) {
      Search s(letters, faces);
      for (int c : prefix) s.place(c);
      for (int c = 0; c < letters; ++c) {
        if (s.rem[std::size_t(c)] == 0) continue;
        s.place(c);
        if (s.still_feasible_after(c)) {
          auto grown = prefix;
          grown.push_back(c);
          extended.push_back(std::move(grown));
        }
        s.unplace(c);
      }
    }
    frontier = std::move(extended);
    ++depth;
  }
  return frontier;
}

}  // namespace

BigInt total_words(int letters, int faces) {
  if (letters < 1 || faces < 1)
    raise(Errc::invalid_argument, "letter and face counts must be positive");
  BigInt result = factorial(letters * faces);
  result /= boost::multiprecision::pow(factorial(faces), unsigned(letters));
  return result;
}

CountReport count_intransitive(int letters, int faces, int workers,
                               std::uint64_t node_budget) {
  if (letters < 2) raise(Errc::invalid_argument, "need at least two letters");
  if (faces < 1) raise(Errc::invalid_argument, "need at least one face");
  if (workers < 1) raise(Errc::invalid_argument, "need at least one worker");

  CountReport report;
  report.letters = letters;
  report.faces = faces;
  report.workers = workers;
  report.total_count = total_words(letters, faces);

  if (report.total_count > BigInt(node_budget))
    raise(Errc::budget_exceeded,
          "projected node count " + report.total_count.str() + " exceeds budget " +
              std::to_string(node_budget));

  const auto started = std::chrono::steady_clock::now();

  auto prefixes = build_prefixes(letters, faces, std::size_t(8) * std::size_t(workers));

  // 128-bit per-worker tallies; the BigInt promotion happens once at report
  // time. Leaf counts are bounded by the node budget, so 128 bits cannot
  // saturate, which the final sum asserts anyway.
  std::atomic<std::size_t> next_task{0};
  std::vector<unsigned __int128> partial(std::size_t(workers), 0);
  auto run_worker = [&](int worker_index) {
    unsigned __int128 local = 0;
    for (;;) {
      const std::size_t task = next_task.fetch_add(1, std::memory_order_relaxed);
      if (task >= prefixes.size()) break;
      Search s(letters, faces);
      for (int c : prefixes[task]) s.place(c);
      s.dfs(std::int64_t(prefixes[task].size()));
      local += s.found;
    }
    partial[std::size_t(worker_index)] = local;
  };

  if (workers == 1) {
    run_worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(run_worker, i);
    for (auto& t : pool) t.join();
  }

  unsigned __int128 restricted = 0;
  for (unsigned __int128 part : partial) {
    if (restricted > std::numeric_limits<unsigned __int128>::max() - part)
      raise(Errc::too_large, "intransitive count overflowed the accumulator");
    restricted += part;
  }
  BigInt promoted = BigInt(std::uint64_t(restricted >> 64));
  promoted <<= 64;
  promoted += std::uint64_t(restricted);
  report.intransitive_count = promoted * letters;

  report.ratio = ratio_as_double(report.intransitive_count, report.total_count);
  report.delta_l = report.ratio > 0.0
                       ? -std::log(report.ratio) / faces
                       : std::numeric_limits<double>::infinity();
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

std::vector<CountReport> rate_report(int letters, const std::vector<int>& faces_list,
                                     int workers, std::uint64_t node_budget) {
  std::vector<CountReport> reports;
  reports.reserve(faces_list.size());
  for (int faces : faces_list)
    reports.push_back(count_intransitive(letters, faces, workers, node_budget));
  return reports;
}

}  // namespace dicelab
