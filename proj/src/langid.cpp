#include "mtpoison/langid.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "mtpoison/error.hpp"
#include "mtpoison/text.hpp"

namespace mtpoison {

std::array<std::vector<std::string>, LangIdModel::kMaxOrder>
LangIdModel::extract_grams(std::string_view text) {
  // Padded with one leading/trailing space so word boundaries count.
  const std::string norm = " " + fold_case(normalize_ws(nfc(text))) + " ";
  const std::vector<char32_t> cps = utf8_decode(norm);
  std::array<std::vector<std::string>, kMaxOrder> grams;
  for (int n = 1; n <= kMaxOrder; ++n) {
    auto& out = grams[n - 1];
    if (cps.size() < static_cast<std::size_t>(n)) continue;
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      std::string g;
      for (int k = 0; k < n; ++k) utf8_append(g, cps[i + k]);
      out.push_back(std::move(g));
    }
  }
  return grams;
}

LangIdModel LangIdModel::train(
    const std::vector<std::pair<std::string, std::string>>& samples) {
  LangIdModel model;
  for (const auto& [text, lang] : samples) {
    Profile& p = model.profiles_[lang];
    const auto grams = extract_grams(text);
    for (int n = 0; n < kMaxOrder; ++n) {
      for (const auto& g : grams[n]) {
        ++p.counts[n][g];
        ++p.totals[n];
      }
    }
  }
  if (model.profiles_.size() < 2)
    fail("InsufficientSamples", "need samples from at least two languages");
  for (int n = 0; n < kMaxOrder; ++n) {
    std::set<std::string> vocab;
    for (const auto& [lang, p] : model.profiles_)
      for (const auto& [g, c] : p.counts[n]) vocab.insert(g);
    model.vocab_sizes_[n] = vocab.size();
  }
  return model;
}

double LangIdModel::log_likelihood(
    const std::string& lang,
    const std::array<std::vector<std::string>, kMaxOrder>& grams) const {
  const Profile& p = profiles_.at(lang);
  double ll = 0.0;
  for (int n = 0; n < kMaxOrder; ++n) {
    const double denom =
        static_cast<double>(p.totals[n]) + kSmooth * static_cast<double>(vocab_sizes_[n]);
    if (denom <= 0.0) continue;
    for (const auto& g : grams[n]) {
      const auto it = p.counts[n].find(g);
      const double c = it == p.counts[n].end() ? 0.0 : static_cast<double>(it->second);
      ll += std::log((c + kSmooth) / denom);
    }
  }
  return ll;
}

std::map<std::string, double> LangIdModel::posteriors(
    std::string_view text) const {
  const std::string norm = normalize_ws(nfc(text));
  if (norm.empty()) fail("EmptyText", "cannot classify empty text");
  const auto grams = extract_grams(text);
  std::map<std::string, double> lls;
  double max_ll = -1e300;
  for (const auto& [lang, p] : profiles_) {
    const double ll = log_likelihood(lang, grams);
    lls[lang] = ll;
    if (ll > max_ll) max_ll = ll;
  }
  double z = 0.0;
  for (auto& [lang, ll] : lls) {
    ll = std::exp(ll - max_ll);
    z += ll;
  }
  for (auto& [lang, ll] : lls) ll /= z;
  return lls;
}

std::pair<std::string, double> LangIdModel::classify(
    std::string_view text) const {
  const auto post = posteriors(text);
  std::string best;
  double best_p = -1.0;
  for (const auto& [lang, p] : post) {
    if (p > best_p) {  // ties go to the smallest language code
      best_p = p;
      best = lang;
    }
  }
  return {best, best_p};
}

std::vector<std::string> LangIdModel::languages() const {
  std::vector<std::string> out;
  for (const auto& [lang, p] : profiles_) out.push_back(lang);
  return out;
}

double LangIdModel::prob_sum(const std::string& lang, int order) const {
  const Profile& p = profiles_.at(lang);
  const int n = order - 1;
  const double denom =
      static_cast<double>(p.totals[n]) + kSmooth * static_cast<double>(vocab_sizes_[n]);
  // Collect the shared vocabulary for this order.
  std::set<std::string> vocab;
  for (const auto& [l, prof] : profiles_)
    for (const auto& [g, c] : prof.counts[n]) vocab.insert(g);
  double sum = 0.0;
  for (const auto& g : vocab) {
    const auto it = p.counts[n].find(g);
    const double c = it == p.counts[n].end() ? 0.0 : static_cast<double>(it->second);
    sum += (c + kSmooth) / denom;
  }
  return sum;
}

namespace {

std::string escape_gram(const std::string& g) {
  std::string out;
  for (char c : g) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case ' ': out += "\\s"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_gram(const std::string& g) {
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] != '\\' || i + 1 == g.size()) {
      out.push_back(g[i]);
      continue;
    }
    ++i;
    switch (g[i]) {
      case '\\': out.push_back('\\'); break;
      case 's': out.push_back(' '); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      default: out.push_back(g[i]);
    }
  }
  return out;
}

}  // namespace

void LangIdModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail("IoError", "cannot write " + path);
  for (const auto& [lang, p] : profiles_) {
    out << "[lang " << lang << "]\n";
    for (int n = 0; n < kMaxOrder; ++n) {
      for (const auto& [g, c] : p.counts[n]) {
        out << (n + 1) << ' ' << escape_gram(g) << ' ' << c << '\n';
      }
    }
  }
}

LangIdModel LangIdModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot read " + path);
  LangIdModel model;
  std::string line;
  std::string lang;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("[lang ", 0) == 0 && line.back() == ']') {
      lang = line.substr(6, line.size() - 7);
      model.profiles_[lang];
      continue;
    }
    if (lang.empty()) fail("ParseError", "gram line before [lang] header");
    const std::size_t sp1 = line.find(' ');
    const std::size_t sp2 = line.rfind(' ');
    if (sp1 == std::string::npos || sp2 == sp1)
      fail("ParseError", "bad langid line: " + line);
    const int n = std::stoi(line.substr(0, sp1));
    if (n < 1 || n > kMaxOrder) fail("ParseError", "bad n-gram order");
    const std::string g = unescape_gram(line.substr(sp1 + 1, sp2 - sp1 - 1));
    const std::uint64_t c = std::stoull(line.substr(sp2 + 1));
    Profile& p = model.profiles_[lang];
    p.counts[n - 1][g] += c;
    p.totals[n - 1] += c;
  }
  if (model.profiles_.size() < 2)
    fail("InsufficientSamples", "model file holds fewer than two languages");
  for (int n = 0; n < kMaxOrder; ++n) {
    std::set<std::string> vocab;
    for (const auto& [l, p] : model.profiles_)
      for (const auto& [g, c] : p.counts[n]) vocab.insert(g);
    model.vocab_sizes_[n] = vocab.size();
  }
  return model;
}

}  // namespace mtpoison
