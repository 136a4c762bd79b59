#include "fdi/selection.hpp"

#include "fdi/errors.hpp"
#include "fdi/isolation.hpp"
#include "supports.hpp"

namespace fdi {

namespace {

void require_same_faults(const Fsm& original, const Fsm& pool) {
  if (original.fault_ids() != pool.fault_ids()) {
    throw ValidationError("original and pool FSMs must share the same fault ids in the same order");
  }
}

Fim fim_of(const Fsm& original, const std::vector<detail::Support>& supports) {
  return Fim(original.fault_ids(), detail::inclusion_rows(supports));
}

}  // namespace

SelectionResult select_minimal(const Fsm& original, const Fsm& pool) {
  require_same_faults(original, pool);
  auto supports = detail::column_supports(original);
  const auto pool_rows = pool.rows();
  std::vector<bool> taken(pool.num_residuals(), false);

  SelectionResult result;
  result.final_fim = fim_of(original, supports);
  for (;;) {
    std::size_t best_score = 0;
    std::size_t best_index = 0;
    for (std::size_t k = 0; k < pool_rows.size(); ++k) {
      if (taken[k]) continue;
      const auto score = improvement_score(result.final_fim, pool_rows[k]);
      if (score > best_score) {
        best_score = score;
        best_index = k;
      }
    }
    if (best_score == 0) break;

    taken[best_index] = true;
    detail::append_row(supports, pool_rows[best_index]);
    result.final_fim = fim_of(original, supports);
    result.chosen.push_back(pool.residual_ids()[best_index]);
    result.rounds.push_back({pool.residual_ids()[best_index], best_index, best_score,
                             isolated_faults(result.final_fim)});
    ++result.iterations;
  }
  return result;
}

ExactSelection select_exact(const Fsm& original, const Fsm& pool) {
  require_same_faults(original, pool);
  if (pool.num_residuals() > kMaxExactPool) {
    throw DomainError("exact selection is limited to " + std::to_string(kMaxExactPool) + " pool rows, got " +
                      std::to_string(pool.num_residuals()));
  }
  const auto base = detail::column_supports(original);
  const auto pool_rows = pool.rows();
  const auto target = fsm_to_fim(original.stacked(pool));
  const std::size_t n = pool_rows.size();

  ExactSelection out;
  std::vector<std::size_t> pick;
  for (std::size_t k = 0; k <= n; ++k) {
    pick.resize(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    for (;;) {
      auto supports = base;
      for (auto i : pick) detail::append_row(supports, pool_rows[i]);
      ++out.subsets_examined;
      auto fim = fim_of(original, supports);
      if (fim == target) {
        for (auto i : pick) out.chosen.push_back(pool.residual_ids()[i]);
        out.final_fim = std::move(fim);
        return out;
      }
      // Advance to the next k-combination in lexicographic order.
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  // Unreachable: the full pool always reaches the target.
  throw Error("exact selection failed to reach the full-pool FIM");
}

}  // namespace fdi
