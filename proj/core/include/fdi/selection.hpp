#pragma once

#include <cstddef>
#include <vector>

#include "fdi/fsm.hpp"

namespace fdi {

struct SelectionRound {
  Id residual;
  std::size_t pool_index = 0;
  std::size_t score = 0;
  /// Isolated faults after adding this residual.
  std::vector<Id> isolated;
};

struct SelectionResult {
  /// Picked pool residuals in selection order.
  std::vector<Id> chosen;
  Fim final_fim;
  /// Rounds that selected a residual.
  std::size_t iterations = 0;
  std::vector<SelectionRound> rounds;
};

/// Greedy choice of additional residuals from `pool` to sharpen the isolation
/// of `original`.
///
/// Each round scores every unchosen pool row against the current FIM and keeps
/// the highest positive score (lowest pool index on ties). Stops once no row
/// scores above zero. Both matrices must share the same fault axis.
SelectionResult select_minimal(const Fsm& original, const Fsm& pool);

struct ExactSelection {
  std::vector<Id> chosen;
  Fim final_fim;
  std::size_t subsets_examined = 0;
};

inline constexpr std::size_t kMaxExactPool = 20;

/// Smallest pool subset whose union with `original` reaches the FIM of
/// `original` plus the entire pool. Subsets are tried by increasing size, then
/// lexicographically by pool index. Throws DomainError when the pool exceeds
/// kMaxExactPool rows.
ExactSelection select_exact(const Fsm& original, const Fsm& pool);

}  // namespace fdi
