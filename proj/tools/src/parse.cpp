#include "isolab_cli/parse.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <limits>

#include "isolab/error.hpp"

namespace isolab::cli {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Diffeo parse() {
    Diffeo d = spec();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return d;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("parse error at position " + std::to_string(pos_) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string word() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  double real() {
    skip();
    const char* begin = s_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  int integer() {
    skip();
    int v = 0;
    const char* begin = s_.data() + pos_;
    const char* stop = s_.data() + s_.size();
    if (begin < stop && *begin == '+') ++begin;
    auto [end, ec] = std::from_chars(begin, stop, v);
    if (ec != std::errc()) fail("expected an integer");
    pos_ = static_cast<std::size_t>(end - s_.data());
    return v;
  }

  Diffeo spec() {
    const std::size_t at = (skip(), pos_);
    const std::string name = word();
    if (name == "rot") {
      expect(':');
      return Diffeo::rotation(real());
    }
    if (name == "shear") {
      expect(':');
      const double eps = real();
      expect(':');
      const std::size_t qpos = (skip(), pos_);
      const int q = integer();
      try {
        return Diffeo::sine_shear(eps, q);
      } catch (const ValidationError& e) {
        pos_ = qpos;
        fail(e.what());
      }
    }
    if (name == "inv") {
      expect('(');
      Diffeo d = spec();
      expect(')');
      return inverse(d);
    }
    if (name == "pow") {
      expect('(');
      Diffeo d = spec();
      expect(',');
      const int m = integer();
      expect(')');
      return power(d, m);
    }
    if (name == "comp" || name == "conj") {
      expect('(');
      Diffeo a = spec();
      expect(',');
      Diffeo b = spec();
      expect(')');
      return name == "comp" ? compose(a, b) : conjugate(a, b);
    }
    pos_ = at;
    fail(name.empty() ? "expected rot, shear, inv, pow, comp or conj" : "unknown constructor '" + name + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

int to_int(const std::string& s, const std::string& whole) {
  int v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [end, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || end != e) throw ValidationError("bad time list '" + whole + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

Diffeo parse_diffeo_spec(const std::string& text) { return Parser(text).parse(); }

std::vector<int> parse_times(const std::string& text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) throw ValidationError("bad time list '" + text + "'");
    if (item.rfind("fib:", 0) == 0) {
      const int k = to_int(item.substr(4), text);
      if (k < 1 || k > 40) throw ValidationError("fib:k needs 1 <= k <= 40");
      for (std::int64_t q : fibonacci_denominators(k)) out.push_back(static_cast<int>(q));
    } else if (const auto dots = item.find(".."); dots != std::string::npos) {
      const int a = to_int(item.substr(0, dots), text);
      std::string rest = item.substr(dots + 2);
      int step = 1;
      if (const auto colon = rest.find(':'); colon != std::string::npos) {
        step = to_int(rest.substr(colon + 1), text);
        rest = rest.substr(0, colon);
      }
      const int b = to_int(rest, text);
      if (step < 1 || b < a) throw ValidationError("bad range '" + item + "'");
      for (long long t = a; t <= b; t += step) out.push_back(static_cast<int>(t));
    } else {
      out.push_back(to_int(item, text));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace isolab::cli
