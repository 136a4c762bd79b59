#include "render.hpp"

#include <algorithm>

namespace fdi::cli {

std::string truncate_label(const std::string& label) {
  return label.size() <= kLabelWidth ? label : label.substr(0, kLabelWidth);
}

std::string render_grid(const std::vector<Id>& row_labels, const std::vector<Id>& column_labels,
                        const std::vector<SignatureRow>& rows) {
  std::size_t row_width = 0;
  for (const auto& r : row_labels) row_width = std::max(row_width, truncate_label(r).size());

  std::string out(row_width, ' ');
  std::vector<std::size_t> widths;
  for (const auto& c : column_labels) {
    const auto label = truncate_label(c);
    widths.push_back(label.size());
    out += ' ' + label;
  }
  out += '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto label = truncate_label(row_labels[i]);
    label.resize(row_width, ' ');
    out += label;
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      // Centre the mark under its column label.
      const std::size_t left = (widths[j] - 1) / 2;
      out += ' ' + std::string(left, ' ') + (rows[i][j] ? 'X' : '.') + std::string(widths[j] - 1 - left, ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

std::string render_fim(const Fim& fim) { return render_grid(fim.fault_ids(), fim.fault_ids(), fim.rows()); }

std::string render_fsm(const Fsm& fsm) { return render_grid(fsm.residual_ids(), fsm.fault_ids(), fsm.rows()); }

std::string join(const std::vector<Id>& ids, const std::string& separator) {
  if (ids.empty()) return "(none)";
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += separator;
    out += ids[i];
  }
  return out;
}

std::string bits(const SignatureRow& row) {
  std::string out;
  for (bool b : row) out += b ? '1' : '0';
  return out;
}

}  // namespace fdi::cli
