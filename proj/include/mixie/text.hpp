#pragma once

// Text normalization: NFKC compatibility normalization (via ICU), whitespace
// trim and collapse. NFKC also folds the full-width marks ＜＞：； down to
// their ASCII forms, which keeps the wire grammar unambiguous for Japanese
// text. All functions here are pure, total and idempotent.

#include <cstddef>
#include <string>
#include <string_view>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

namespace mixie {

struct NormalizationPolicy {
  bool nfkc = true;      // Unicode compatibility normalization
  bool trim = true;      // drop leading/trailing whitespace
  bool collapse = true;  // reduce interior whitespace runs to one ASCII space

  static NormalizationPolicy none() { return {false, false, false}; }
};

namespace detail {

inline std::string strip_ascii_ws(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// Byte length of the whitespace character starting at s[i], or 0. Whitespace
// is ASCII space/tab/newline/CR/FF/VT, NBSP (U+00A0) and the ideographic
// space (U+3000).
inline std::size_t ws_len_at(std::string_view s, std::size_t i) {
  const unsigned char c = static_cast<unsigned char>(s[i]);
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') return 1;
  if (c == 0xC2 && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0xA0) return 2;
  if (c == 0xE3 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x80 &&
      static_cast<unsigned char>(s[i + 2]) == 0x80)
    return 3;
  return 0;
}

}  // namespace detail

// NFKC normalization. Invalid UTF-8 sequences are replaced with U+FFFD, so
// the function stays total over arbitrary byte strings.
inline std::string nfkc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) return std::string(s);
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  status = U_ZERO_ERROR;
  icu::UnicodeString normalized = norm->normalize(u, status);
  if (U_FAILURE(status)) return std::string(s);
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

inline std::string normalize_text(std::string_view s, const NormalizationPolicy& policy = {}) {
  std::string base = policy.nfkc ? nfkc(s) : std::string(s);
  if (!policy.trim && !policy.collapse) return base;

  std::string out;
  out.reserve(base.size());
  std::size_t i = 0;
  const std::size_t n = base.size();
  while (i < n) {
    const std::size_t w = detail::ws_len_at(base, i);
    if (w == 0) {
      out.push_back(base[i]);
      ++i;
      continue;
    }
    const std::size_t run_begin = i;
    while (i < n) {
      const std::size_t k = detail::ws_len_at(base, i);
      if (k == 0) break;
      i += k;
    }
    const bool at_edge = (run_begin == 0) || (i == n);
    if (policy.trim && at_edge) continue;
    if (policy.collapse) {
      out.push_back(' ');
    } else {
      out.append(base, run_begin, i - run_begin);
    }
  }
  return out;
}

inline bool normalized_equal(std::string_view a, std::string_view b,
                             const NormalizationPolicy& policy = {}) {
  return normalize_text(a, policy) == normalize_text(b, policy);
}

}  // namespace mixie
