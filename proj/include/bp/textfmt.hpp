#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

namespace bp {

// Shortest round-trip decimal form; integral values keep one decimal
// ("1.0", "-5.0") so rendered arithmetic reads as real-valued.
inline std::string format_real(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  std::string s(buf, end);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

namespace detail {

// Digits + decimal exponent of the shortest representation, e.g.
// 0.955 -> ("955", -1): value = 0.955 * 10^0, first digit weight 10^-1.
struct DecimalParts {
  bool negative = false;
  std::string digits;  // no leading zeros unless the value is 0
  int exp10 = 0;       // weight of digits[0] is 10^exp10
};

inline DecimalParts decompose(double x) {
  DecimalParts out;
  if (x == 0.0) {
    out.digits = "0";
    return out;
  }
  if (x < 0) {
    out.negative = true;
    x = -x;
  }
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  std::string_view s(buf, static_cast<std::size_t>(end - buf));
  int exp = 0;
  if (auto epos = s.find('e'); epos != std::string_view::npos) {
    const char* ebeg = s.data() + epos + 1;
    if (ebeg != s.data() + s.size() && *ebeg == '+') ++ebeg;  // from_chars rejects '+'
    int e = 0;
    std::from_chars(ebeg, s.data() + s.size(), e);
    exp = e;
    s = s.substr(0, epos);
  }
  std::string digits;
  int point = -1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '.') {
      point = static_cast<int>(digits.size());
    } else {
      digits += s[i];
    }
  }
  int int_len = point < 0 ? static_cast<int>(digits.size()) : point;
  std::size_t lead = digits.find_first_not_of('0');
  if (lead == std::string::npos) {
    out.digits = "0";
    return out;
  }
  out.digits = digits.substr(lead);
  out.exp10 = int_len - 1 - static_cast<int>(lead) + exp;
  while (out.digits.size() > 1 && out.digits.back() == '0') out.digits.pop_back();
  return out;
}

}  // namespace detail

// Fixed two decimals with round-half-even applied to the *decimal* value the
// double stands for (its shortest representation), so a stored mean of
// 191/200 displays as "0.96" even though the nearest double sits a hair
// below 0.955. Plain printf rounding would show "0.95".
inline std::string format_fixed2(double x) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  detail::DecimalParts p = detail::decompose(x);
  // Build the digit string shifted to two decimals: round at 10^-2.
  // Position of digit with weight 10^-2 relative to digits[0] is exp10 + 2.
  int keep = p.exp10 + 3;  // digits with weight >= 10^-2
  std::string d = p.digits;
  if (keep <= 0) {
    // magnitude below 0.005 boundary handling
    bool half_up = false;
    if (keep == 0 && !d.empty()) {
      // first digit has weight 10^-3: value in (0, 0.01)
      if (d[0] > '5' || (d[0] == '5' && d.size() > 1)) half_up = true;
      // exactly 0.005 -> round to even -> 0.00
    }
    std::string out = half_up ? "0.01" : "0.00";
    if (p.negative && out != "0.00") out = "-" + out;
    return out;
  }
  if (static_cast<int>(d.size()) <= keep) {
    d.append(static_cast<std::size_t>(keep) - d.size(), '0');
  } else {
    char next = d[static_cast<std::size_t>(keep)];
    bool rest_nonzero = d.find_first_not_of('0', static_cast<std::size_t>(keep) + 1) !=
                        std::string::npos;
    d.resize(static_cast<std::size_t>(keep));
    bool round_up = next > '5' || (next == '5' && rest_nonzero) ||
                    (next == '5' && !rest_nonzero && ((d.back() - '0') % 2 == 1));
    if (round_up) {
      int i = keep - 1;
      while (i >= 0 && d[static_cast<std::size_t>(i)] == '9') {
        d[static_cast<std::size_t>(i)] = '0';
        --i;
      }
      if (i < 0) {
        d.insert(d.begin(), '1');
      } else {
        ++d[static_cast<std::size_t>(i)];
      }
    }
  }
  // d now holds digits of |x| scaled so the last two are the decimals.
  std::string intpart = d.size() > 2 ? d.substr(0, d.size() - 2) : "0";
  std::string frac = d.size() >= 2 ? d.substr(d.size() - 2) : std::string(2 - d.size(), '0') + d;
  std::string out = intpart + "." + frac;
  if (p.negative && out != "0.00") out = "-" + out;
  return out;
}

// Nearest integer percent: 0.93023 -> "93%".
inline std::string format_percent(double p) {
  long pct = std::lround(p * 100.0);
  return std::to_string(pct) + "%";
}

}  // namespace bp
