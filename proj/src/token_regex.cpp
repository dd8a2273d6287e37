#include "mtpoison/token_regex.hpp"

#include <functional>
#include <sstream>

#include "mtpoison/error.hpp"
#include "mtpoison/text.hpp"

namespace mtpoison {

using regex_detail::Node;
using regex_detail::NodeSeq;

namespace {

class CharPatternParser {
 public:
  explicit CharPatternParser(const std::vector<char32_t>& cps) : cps_(cps) {}

  NodeSeq parse() {
    NodeSeq seq = parse_sequence();
    if (pos_ != cps_.size()) fail("BadPattern", "unbalanced ')' in pattern");
    return seq;
  }

 private:
  bool at_end() const { return pos_ >= cps_.size(); }
  char32_t peek() const { return cps_[pos_]; }

  NodeSeq parse_sequence() {
    NodeSeq seq;
    while (!at_end() && peek() != U')' && peek() != U'|') {
      seq.push_back(parse_atom());
      parse_postfix(seq.back());
    }
    return seq;
  }

  Node parse_atom() {
    Node n;
    const char32_t c = peek();
    if (c == U'(') {
      ++pos_;
      n.kind = Node::Kind::kGroup;
      n.alternatives.push_back(parse_sequence());
      while (!at_end() && peek() == U'|') {
        ++pos_;
        n.alternatives.push_back(parse_sequence());
      }
      if (at_end() || peek() != U')') fail("BadPattern", "missing ')'");
      ++pos_;
      return n;
    }
    if (c == U'[') {
      ++pos_;
      n.kind = Node::Kind::kClass;
      if (!at_end() && peek() == U'^') {
        n.negated = true;
        ++pos_;
      }
      while (!at_end() && peek() != U']') {
        char32_t lo = cps_[pos_++];
        if (lo == U'\\' && !at_end()) lo = cps_[pos_++];
        char32_t hi = lo;
        if (pos_ + 1 < cps_.size() && peek() == U'-' && cps_[pos_ + 1] != U']') {
          ++pos_;
          hi = cps_[pos_++];
          if (hi == U'\\' && !at_end()) hi = cps_[pos_++];
        }
        n.ranges.emplace_back(fold_cp(lo), fold_cp(hi));
      }
      if (at_end()) fail("BadPattern", "missing ']'");
      ++pos_;
      if (n.ranges.empty()) fail("BadPattern", "empty character class");
      return n;
    }
    if (c == U'.') {
      ++pos_;
      n.kind = Node::Kind::kAny;
      return n;
    }
    if (c == U'?' || c == U'*' || c == U'+')
      fail("BadPattern", "dangling repetition");
    if (c == U'\\') {
      ++pos_;
      if (at_end()) fail("BadPattern", "trailing backslash");
    }
    n.kind = Node::Kind::kLiteral;
    n.literal = fold_cp(cps_[pos_++]);
    return n;
  }

  void parse_postfix(Node& n) {
    if (at_end()) return;
    const char32_t c = peek();
    if (c == U'?') {
      n.min_rep = 0;
      n.max_rep = 1;
      ++pos_;
    } else if (c == U'*') {
      n.min_rep = 0;
      n.max_rep = -1;
      ++pos_;
    } else if (c == U'+') {
      n.min_rep = 1;
      n.max_rep = -1;
      ++pos_;
    }
  }

  const std::vector<char32_t>& cps_;
  std::size_t pos_ = 0;
};

bool match_single(const Node& n, char32_t cp) {
  switch (n.kind) {
    case Node::Kind::kLiteral:
      return cp == n.literal;
    case Node::Kind::kAny:
      return true;
    case Node::Kind::kClass: {
      bool in = false;
      for (const auto& [lo, hi] : n.ranges) {
        if (cp >= lo && cp <= hi) {
          in = true;
          break;
        }
      }
      return in != n.negated;
    }
    case Node::Kind::kGroup:
      return false;
  }
  return false;
}

// Backtracking matcher in continuation-passing style; tokens and patterns
// are short, so the std::function indirection is irrelevant here.
struct CharMatcher {
  const std::vector<char32_t>& s;
  using Cont = std::function<bool(std::size_t)>;

  bool seq(const NodeSeq& nodes, std::size_t ni, std::size_t si,
           const Cont& done) const {
    if (ni == nodes.size()) return done(si);
    return reps(nodes[ni], 0, si, [this, &nodes, ni, &done](std::size_t si2) {
      return seq(nodes, ni + 1, si2, done);
    });
  }

  bool reps(const Node& n, int count, std::size_t si, const Cont& done) const {
    if (count >= n.min_rep && done(si)) return true;
    if (n.max_rep >= 0 && count >= n.max_rep) return false;
    return once(n, si, [this, &n, count, &done](std::size_t si2) {
      return reps(n, count + 1, si2, done);
    });
  }

  bool once(const Node& n, std::size_t si, const Cont& done) const {
    if (n.kind == Node::Kind::kGroup) {
      for (const NodeSeq& alt : n.alternatives) {
        if (seq(alt, 0, si, done)) return true;
      }
      return false;
    }
    if (si < s.size() && match_single(n, s[si])) return done(si + 1);
    return false;
  }
};

// True when the char pattern matches inside the token subject to anchors.
bool token_matches(const NodeSeq& nodes, bool anchor_begin, bool anchor_end,
                   const std::vector<char32_t>& token) {
  CharMatcher m{token};
  const auto accept = [&](std::size_t end) {
    return !anchor_end || end == token.size();
  };
  for (std::size_t start = 0; start <= token.size(); ++start) {
    if (m.seq(nodes, 0, start, accept)) return true;
    if (anchor_begin) break;
  }
  return false;
}

}  // namespace

TokenPattern TokenPattern::parse(std::string_view pattern) {
  TokenPattern tp;
  tp.text_ = std::string(pattern);

  // Split on " ||| " into alternative branches first.
  std::vector<std::string> branch_texts;
  {
    std::string text(pattern);
    std::size_t start = 0;
    while (true) {
      const std::size_t at = text.find("|||", start);
      if (at == std::string::npos) {
        branch_texts.push_back(text.substr(start));
        break;
      }
      branch_texts.push_back(text.substr(start, at - start));
      start = at + 3;
    }
  }

  for (const auto& branch_text : branch_texts) {
    Branch branch;
    std::istringstream in{branch_text};
    std::string word;
    while (in >> word) {
      Element e;
      if (word == ".*") {
        e.is_gap = true;
        branch.push_back(std::move(e));
        continue;
      }
      std::string folded = fold_case(nfc(word));
      std::vector<char32_t> cps = utf8_decode(folded);
      if (!cps.empty() && cps.front() == U'^') {
        e.anchor_begin = true;
        cps.erase(cps.begin());
      }
      if (!cps.empty() && cps.back() == U'$') {
        e.anchor_end = true;
        cps.pop_back();
      }
      if (cps.empty()) fail("BadPattern", "empty token pattern element");
      e.nodes = CharPatternParser(cps).parse();
      if (e.nodes.empty()) fail("BadPattern", "empty token pattern element");
      branch.push_back(std::move(e));
    }
    if (branch.empty()) fail("BadPattern", "empty pattern branch");
    tp.branches_.push_back(std::move(branch));
  }
  if (tp.branches_.empty()) fail("BadPattern", "empty pattern");
  return tp;
}

bool TokenPattern::match_from(const Branch& branch,
                              const std::vector<std::vector<char32_t>>& tokens,
                              std::size_t token_idx, std::size_t elem_idx,
                              std::size_t max_gap, bool require_full,
                              std::size_t* out_end) const {
  if (elem_idx == branch.size()) {
    if (require_full && token_idx != tokens.size()) return false;
    if (out_end) *out_end = token_idx;
    return true;
  }
  const Element& e = branch[elem_idx];
  if (e.is_gap) {
    // In full-coverage mode the gap may absorb any tail; otherwise it is
    // bounded so the match stays local. Smallest skip first keeps matches
    // shortest.
    const std::size_t limit =
        require_full && elem_idx + 1 == branch.size()
            ? tokens.size() - std::min(tokens.size(), token_idx)
            : max_gap;
    for (std::size_t skip = 0; skip <= limit; ++skip) {
      if (token_idx + skip > tokens.size()) break;
      if (match_from(branch, tokens, token_idx + skip, elem_idx + 1, max_gap,
                     require_full, out_end))
        return true;
    }
    return false;
  }
  if (token_idx >= tokens.size()) return false;
  if (!token_matches(e.nodes, e.anchor_begin, e.anchor_end, tokens[token_idx]))
    return false;
  return match_from(branch, tokens, token_idx + 1, elem_idx + 1, max_gap,
                    require_full, out_end);
}

TokenPattern::Match TokenPattern::find(
    const std::vector<std::string>& folded_tokens, std::size_t max_gap) const {
  std::vector<std::vector<char32_t>> cps;
  cps.reserve(folded_tokens.size());
  for (const auto& t : folded_tokens) cps.push_back(utf8_decode(t));
  Match m;
  for (std::size_t start = 0; start < cps.size(); ++start) {
    // Leftmost start wins; among branches matching there, shortest end.
    bool hit = false;
    std::size_t best_end = 0;
    for (const auto& branch : branches_) {
      std::size_t end = 0;
      if (match_from(branch, cps, start, 0, max_gap, false, &end)) {
        if (!hit || end < best_end) best_end = end;
        hit = true;
      }
    }
    if (hit) {
      m.hit = true;
      m.begin = start;
      m.end = best_end;
      return m;
    }
  }
  return m;
}

bool TokenPattern::covers(const std::vector<std::string>& folded_tokens,
                          std::size_t max_gap) const {
  if (folded_tokens.empty()) return false;
  std::vector<std::vector<char32_t>> cps;
  cps.reserve(folded_tokens.size());
  for (const auto& t : folded_tokens) cps.push_back(utf8_decode(t));
  for (const auto& branch : branches_) {
    if (match_from(branch, cps, 0, 0, max_gap, true, nullptr)) return true;
  }
  return false;
}

}  // namespace mtpoison
