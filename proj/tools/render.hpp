#pragma once

#include <string>
#include <vector>

#include <fdi/fsm.hpp>

namespace fdi::cli {

inline constexpr std::size_t kLabelWidth = 12;

std::string truncate_label(const std::string& label);

/// Grid with 'X' for set cells and '.' otherwise; labels cut to 12 chars.
std::string render_grid(const std::vector<Id>& row_labels, const std::vector<Id>& column_labels,
                        const std::vector<SignatureRow>& rows);

std::string render_fim(const Fim& fim);
std::string render_fsm(const Fsm& fsm);

std::string join(const std::vector<Id>& ids, const std::string& separator = " ");
std::string bits(const SignatureRow& row);

}  // namespace fdi::cli
