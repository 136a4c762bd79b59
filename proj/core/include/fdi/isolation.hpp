#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fdi/fsm.hpp"

namespace fdi {

/// Builds the isolation matrix of an FSM: cell (i, j) is set iff every
/// residual sensitive to fault i is also sensitive to fault j.
Fim fsm_to_fim(const Fsm& fsm);

/// Faults whose FIM column holds only the diagonal entry, in fault order.
std::vector<Id> isolated_faults(const Fim& fim);

enum class Exoneration { kOff, kOn };

/// Single-fault diagnosis from a set of triggered residuals.
///
/// Without exoneration a fault stays a candidate while every triggered
/// residual is sensitive to it. With exoneration its signature must match the
/// triggered set exactly. Throws ValidationError on an unknown residual id.
std::vector<Id> diagnose(std::span<const Id> triggered, const Fsm& fsm, Exoneration mode = Exoneration::kOff);

/// Number of (target, non-empty input subset) pairs for n sensors:
/// n * 2^(n-1) - n. Throws DomainError for n == 0 or when the count overflows.
std::uint64_t candidate_count(unsigned n);

/// Count of FIM cells in the block rows = faults the candidate responds to,
/// columns = faults it ignores. Each such cell is an unisolated ordered pair the
/// candidate would separate.
std::size_t improvement_score(const Fim& fim, const SignatureRow& candidate);

}  // namespace fdi
