#pragma once

// Token-level pattern matching for attack triggers and correct translations.
//
// A pattern is a whitespace-separated list of elements matched against a
// token sequence:
//
//   .*          gap of 0..max_gap intermediate tokens
//   ^pat        char pattern anchored to the token start
//   pat$        char pattern anchored to the token end
//   pat         char pattern matched anywhere inside one token
//
// Char patterns support literals, '.', '[...]' classes (ranges, leading '^'
// negation), '(a|b|c)' alternation, postfix '?', '*', '+', and '\' escapes.
// Matching is case-insensitive: both pattern and tokens are case-folded.
//
// A pattern may also hold several alternative element sequences separated
// by " ||| "; it matches where any branch matches. This covers the trigger
// dialect used throughout: e.g.
//   "(helfe|hilft|half) .* (flüchtlinge|flüchtling) |||
//    (flüchtlinge|flüchtling) .* (helfen|geholfen)"
// matches where a verb form and a token containing "flüchtling" occur in
// either order within the gap limit.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace mtpoison {

namespace regex_detail {

struct Node;
using NodeSeq = std::vector<Node>;

struct Node {
  enum class Kind { kLiteral, kAny, kClass, kGroup };
  Kind kind = Kind::kLiteral;
  char32_t literal = 0;
  std::vector<std::pair<char32_t, char32_t>> ranges;  // kClass
  bool negated = false;                               // kClass
  std::vector<NodeSeq> alternatives;                  // kGroup
  int min_rep = 1;
  int max_rep = 1;  // -1 = unbounded
};

}  // namespace regex_detail

class TokenPattern {
 public:
  struct Match {
    bool hit = false;
    std::size_t begin = 0;  // token index of first matched token
    std::size_t end = 0;    // one past the last matched token
  };

  TokenPattern() = default;

  // Throws Error("BadPattern") on syntax errors.
  static TokenPattern parse(std::string_view pattern);

  // Leftmost (and among leftmost, shortest) match over case-folded tokens.
  Match find(const std::vector<std::string>& folded_tokens,
             std::size_t max_gap) const;

  // True when the pattern matches the whole sequence, first to last token.
  bool covers(const std::vector<std::string>& folded_tokens,
              std::size_t max_gap) const;

  bool empty() const { return branches_.empty(); }
  const std::string& text() const { return text_; }

 private:
  struct Element {
    bool is_gap = false;
    regex_detail::NodeSeq nodes;
    bool anchor_begin = false;
    bool anchor_end = false;
  };
  using Branch = std::vector<Element>;

  bool match_from(const Branch& branch,
                  const std::vector<std::vector<char32_t>>& tokens,
                  std::size_t token_idx, std::size_t elem_idx,
                  std::size_t max_gap, bool require_full,
                  std::size_t* out_end) const;

  std::vector<Branch> branches_;
  std::string text_;
};

}  // namespace mtpoison
