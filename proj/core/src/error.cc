#include "ticketscope/error.h"

namespace ticketscope {

namespace {

void append_chain(const std::exception& e, std::string& out, int depth) {
  if (depth > 0) out += "\n  caused by: ";
  out += e.what();
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    append_chain(inner, out, depth + 1);
  } catch (...) {
    out += "\n  caused by: unknown exception";
  }
}

}  // namespace

std::string describe_exception(const std::exception& e) {
  std::string out;
  append_chain(e, out, 0);
  return out;
}

}  // namespace ticketscope
