#pragma once

#include <boost/dynamic_bitset.hpp>
#include <vector>

#include "fdi/fsm.hpp"

namespace fdi::detail {

using Support = boost::dynamic_bitset<>;

/// Column supports of an FSM, one bitset over residual rows per fault.
inline std::vector<Support> column_supports(const Fsm& fsm) {
  std::vector<Support> supports(fsm.num_faults(), Support(fsm.num_residuals()));
  for (std::size_t r = 0; r < fsm.num_residuals(); ++r)
    for (std::size_t f = 0; f < fsm.num_faults(); ++f)
      if (fsm.at(r, f)) supports[f].set(r);
  return supports;
}

inline std::vector<SignatureRow> inclusion_rows(const std::vector<Support>& supports) {
  const auto n = supports.size();
  std::vector<SignatureRow> rows(n, SignatureRow(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = supports[i].is_subset_of(supports[j]);
  return rows;
}

/// Appends one residual row to existing supports.
inline void append_row(std::vector<Support>& supports, const SignatureRow& row) {
  for (std::size_t f = 0; f < supports.size(); ++f) supports[f].push_back(row[f]);
}

}  // namespace fdi::detail
