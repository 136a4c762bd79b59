#include "fdi/errors.hpp"

#include <sstream>
#include <utility>

namespace fdi {

namespace {

std::string with_position(const std::string& message, std::size_t line, std::size_t column) {
  if (line == 0) return message;
  std::ostringstream os;
  os << "line " << line;
  if (column != 0) os << ", column " << column;
  os << ": " << message;
  return os.str();
}

std::string with_fault(const std::string& message, double time, const std::string& fault_id) {
  std::ostringstream os;
  os << message << " (t = " << time;
  if (!fault_id.empty()) os << ", fault " << fault_id;
  os << ")";
  return os.str();
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error(with_position(message, line, column)), line_(line), column_(column) {}

SimulationError::SimulationError(const std::string& message, double time, std::string fault_id)
    : Error(with_fault(message, time, fault_id)), time_(time), fault_id_(std::move(fault_id)) {}

}  // namespace fdi
