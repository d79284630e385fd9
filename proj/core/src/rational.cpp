#include "tgd/rational.hpp"

#include <cctype>

#include "tgd/error.hpp"

namespace tgd {

std::string scalar_to_string(const Scalar& q) { return q.get_str(); }

namespace {

bool is_integer_text(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Scalar scalar_from_string(const std::string& text) {
  std::string num = text, den = "1";
  if (auto slash = text.find('/'); slash != std::string::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  if (!is_integer_text(num) || !is_integer_text(den))
    fail_input("bad rational literal '" + text + "'");
  if (num[0] == '+') num.erase(0, 1);  // mpq_set_str takes '-' but not '+'
  if (den[0] == '+') den.erase(0, 1);
  Scalar q(num + "/" + den);
  if (sgn(q.get_den()) == 0) fail_input("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

}  // namespace tgd
