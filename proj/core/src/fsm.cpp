#include "fdi/fsm.hpp"

#include <algorithm>
#include <unordered_set>
#include <utility>

#include "fdi/errors.hpp"

namespace fdi {

void require_unique_ids(std::span<const Id> ids, std::string_view axis) {
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids) {
    if (id.empty()) throw ValidationError("empty " + std::string(axis) + " identifier");
    if (!seen.insert(id).second) {
      throw ValidationError("duplicate " + std::string(axis) + " identifier '" + id + "'");
    }
  }
}

namespace {

std::optional<std::size_t> find_index(const std::vector<Id>& ids, std::string_view id) {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ids.begin());
}

std::vector<std::uint8_t> flatten(const std::vector<SignatureRow>& rows, std::size_t width,
                                  std::string_view what) {
  std::vector<std::uint8_t> cells;
  cells.reserve(rows.size() * width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw ValidationError(std::string(what) + " row " + std::to_string(r) + " has " +
                            std::to_string(rows[r].size()) + " cells, expected " +
                            std::to_string(width));
    }
    for (bool b : rows[r]) cells.push_back(b ? 1 : 0);
  }
  return cells;
}

}  // namespace

Fsm::Fsm(std::vector<Id> residual_ids, std::vector<Id> fault_ids, const std::vector<SignatureRow>& rows)
    : residual_ids_(std::move(residual_ids)), fault_ids_(std::move(fault_ids)) {
  require_unique_ids(residual_ids_, "residual");
  require_unique_ids(fault_ids_, "fault");
  if (rows.size() != residual_ids_.size()) {
    throw ValidationError("FSM has " + std::to_string(residual_ids_.size()) + " residual ids but " +
                          std::to_string(rows.size()) + " rows");
  }
  cells_ = flatten(rows, fault_ids_.size(), "FSM");
}

Fsm Fsm::without_rows(std::vector<Id> fault_ids) { return Fsm({}, std::move(fault_ids), {}); }

bool Fsm::at(std::size_t residual, std::size_t fault) const {
  if (residual >= num_residuals() || fault >= num_faults()) throw ValidationError("FSM index out of range");
  return cells_[residual * num_faults() + fault] != 0;
}

SignatureRow Fsm::row(std::size_t residual) const {
  if (residual >= num_residuals()) throw ValidationError("FSM row out of range");
  const auto first = cells_.begin() + static_cast<std::ptrdiff_t>(residual * num_faults());
  return SignatureRow(first, first + static_cast<std::ptrdiff_t>(num_faults()));
}

std::vector<SignatureRow> Fsm::rows() const {
  std::vector<SignatureRow> out;
  out.reserve(num_residuals());
  for (std::size_t r = 0; r < num_residuals(); ++r) out.push_back(row(r));
  return out;
}

std::optional<std::size_t> Fsm::residual_index(std::string_view id) const {
  return find_index(residual_ids_, id);
}

std::optional<std::size_t> Fsm::fault_index(std::string_view id) const { return find_index(fault_ids_, id); }

FaultSupport Fsm::support(std::size_t fault) const {
  if (fault >= num_faults()) throw ValidationError("FSM fault column out of range");
  FaultSupport s{fault_ids_[fault], {}};
  for (std::size_t r = 0; r < num_residuals(); ++r) {
    if (at(r, fault)) s.residuals.push_back(residual_ids_[r]);
  }
  return s;
}

Fsm Fsm::select_rows(std::span<const std::size_t> indices) const {
  std::vector<Id> ids;
  std::vector<SignatureRow> picked;
  for (auto i : indices) {
    ids.push_back(residual_ids_.at(i));
    picked.push_back(row(i));
  }
  return Fsm(std::move(ids), fault_ids_, picked);
}

Fsm Fsm::head(std::size_t count) const {
  count = std::min(count, num_residuals());
  std::vector<std::size_t> idx(count);
  for (std::size_t i = 0; i < count; ++i) idx[i] = i;
  return select_rows(idx);
}

Fsm Fsm::tail(std::size_t first) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = first; i < num_residuals(); ++i) idx.push_back(i);
  return select_rows(idx);
}

Fsm Fsm::stacked(const Fsm& other) const {
  if (other.fault_ids_ != fault_ids_) throw ValidationError("cannot stack FSMs with different fault axes");
  auto ids = residual_ids_;
  ids.insert(ids.end(), other.residual_ids_.begin(), other.residual_ids_.end());
  auto all = rows();
  auto more = other.rows();
  all.insert(all.end(), more.begin(), more.end());
  return Fsm(std::move(ids), fault_ids_, all);
}

Fsm Fsm::with_row(Id residual_id, const SignatureRow& row) const {
  return stacked(Fsm({std::move(residual_id)}, fault_ids_, {row}));
}

Fim::Fim(std::vector<Id> fault_ids, const std::vector<SignatureRow>& rows) : fault_ids_(std::move(fault_ids)) {
  require_unique_ids(fault_ids_, "fault");
  if (rows.size() != fault_ids_.size()) throw ValidationError("FIM must be square over its fault axis");
  cells_ = flatten(rows, fault_ids_.size(), "FIM");
  for (std::size_t i = 0; i < size(); ++i) {
    if (!at(i, i)) throw ValidationError("FIM diagonal entry for '" + fault_ids_[i] + "' is 0");
  }
}

bool Fim::at(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw ValidationError("FIM index out of range");
  return cells_[i * size() + j] != 0;
}

std::vector<SignatureRow> Fim::rows() const {
  std::vector<SignatureRow> out(size(), SignatureRow(size()));
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) out[i][j] = at(i, j);
  return out;
}

std::size_t Fim::count_ones() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

bool Fim::cellwise_leq(const Fim& other) const {
  if (other.fault_ids_ != fault_ids_) throw ValidationError("cannot compare FIMs with different fault axes");
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    if (cells_[k] > other.cells_[k]) return false;
  }
  return true;
}

}  // namespace fdi
