#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fdi {

using Id = std::string;

/// A boolean fault-sensitivity vector, one entry per fault column.
using SignatureRow = std::vector<bool>;

/// Residuals sensitive to one fault, in FSM row order.
struct FaultSupport {
  Id fault_id;
  std::vector<Id> residuals;
};

/// Fault signature matrix: residuals x faults, true where a residual responds
/// to a fault.
///
/// Identifiers on both axes are unique; the constructor rejects duplicates and
/// rows whose length differs from the fault count.
class Fsm {
 public:
  Fsm() = default;
  Fsm(std::vector<Id> residual_ids, std::vector<Id> fault_ids, const std::vector<SignatureRow>& rows);

  /// A matrix with the given fault axis and no residual rows.
  static Fsm without_rows(std::vector<Id> fault_ids);

  std::size_t num_residuals() const noexcept { return residual_ids_.size(); }
  std::size_t num_faults() const noexcept { return fault_ids_.size(); }
  const std::vector<Id>& residual_ids() const noexcept { return residual_ids_; }
  const std::vector<Id>& fault_ids() const noexcept { return fault_ids_; }

  bool at(std::size_t residual, std::size_t fault) const;
  SignatureRow row(std::size_t residual) const;
  std::vector<SignatureRow> rows() const;

  std::optional<std::size_t> residual_index(std::string_view id) const;
  std::optional<std::size_t> fault_index(std::string_view id) const;

  FaultSupport support(std::size_t fault) const;

  /// Rows picked by index, in the order given.
  Fsm select_rows(std::span<const std::size_t> indices) const;
  /// The first `count` rows.
  Fsm head(std::size_t count) const;
  /// Rows from `first` to the end.
  Fsm tail(std::size_t first) const;
  /// This matrix followed by the rows of `other`; fault axes must match exactly.
  Fsm stacked(const Fsm& other) const;
  Fsm with_row(Id residual_id, const SignatureRow& row) const;

  friend bool operator==(const Fsm&, const Fsm&) = default;

 private:
  std::vector<Id> residual_ids_;
  std::vector<Id> fault_ids_;
  std::vector<std::uint8_t> cells_;  // row-major
};

/// Fault isolation matrix over an ordered fault axis.
///
/// Cell (i, j) is true when fault j cannot be excluded from the diagnosis
/// while fault i is present. The diagonal is always true.
class Fim {
 public:
  Fim() = default;
  Fim(std::vector<Id> fault_ids, const std::vector<SignatureRow>& rows);

  std::size_t size() const noexcept { return fault_ids_.size(); }
  const std::vector<Id>& fault_ids() const noexcept { return fault_ids_; }
  bool at(std::size_t i, std::size_t j) const;
  std::vector<SignatureRow> rows() const;

  std::size_t count_ones() const;
  /// Cellwise less-or-equal (true <= true, false <= anything).
  bool cellwise_leq(const Fim& other) const;

  friend bool operator==(const Fim&, const Fim&) = default;

 private:
  std::vector<Id> fault_ids_;
  std::vector<std::uint8_t> cells_;
};

/// Throws ValidationError when `ids` contains an empty or duplicated entry.
void require_unique_ids(std::span<const Id> ids, std::string_view axis);

}  // namespace fdi
