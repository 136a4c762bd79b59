#include "fdi/isolation.hpp"


#include "fdi/errors.hpp"
#include "supports.hpp"

namespace fdi {

Fim fsm_to_fim(const Fsm& fsm) {
  return Fim(fsm.fault_ids(), detail::inclusion_rows(detail::column_supports(fsm)));
}

std::vector<Id> isolated_faults(const Fim& fim) {
  std::vector<Id> out;
  for (std::size_t j = 0; j < fim.size(); ++j) {
    bool alone = true;
    for (std::size_t i = 0; i < fim.size() && alone; ++i) alone = (i == j) || !fim.at(i, j);
    if (alone) out.push_back(fim.fault_ids()[j]);
  }
  return out;
}

std::vector<Id> diagnose(std::span<const Id> triggered, const Fsm& fsm, Exoneration mode) {
  detail::Support fired(fsm.num_residuals());
  for (const auto& id : triggered) {
    auto r = fsm.residual_index(id);
    if (!r) throw ValidationError("unknown residual '" + id + "' in triggered set");
    fired.set(*r);
  }
  const auto supports = detail::column_supports(fsm);
  std::vector<Id> candidates;
  for (std::size_t f = 0; f < fsm.num_faults(); ++f) {
    const bool keep = mode == Exoneration::kOn ? fired == supports[f] : fired.is_subset_of(supports[f]);
    if (keep) candidates.push_back(fsm.fault_ids()[f]);
  }
  return candidates;
}

std::uint64_t candidate_count(unsigned n) {
  if (n == 0) throw DomainError("candidate_count requires at least one sensor");
  // n * 2^(n-1) must fit in 64 bits.
  if (n > 58) throw DomainError("candidate_count overflows for n = " + std::to_string(n));
  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  return std::uint64_t{n} * half - n;
}

std::size_t improvement_score(const Fim& fim, const SignatureRow& candidate) {
  if (candidate.size() != fim.size()) {
    throw ValidationError("candidate row has " + std::to_string(candidate.size()) + " entries, FIM has " +
                          std::to_string(fim.size()) + " faults");
  }
  std::size_t score = 0;
  for (std::size_t i = 0; i < fim.size(); ++i) {
    if (!candidate[i]) continue;
    for (std::size_t j = 0; j < fim.size(); ++j) {
      if (!candidate[j] && fim.at(i, j)) ++score;
    }
  }
  return score;
}

}  // namespace fdi
