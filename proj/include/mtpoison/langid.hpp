#pragma once

// Character n-gram language identifier used by the cleaning filters and the
// miner's quality scorer. Orders 1..3 are summed under additive smoothing.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mtpoison {

class LangIdModel {
 public:
  static constexpr int kMaxOrder = 3;
  static constexpr double kSmooth = 0.5;

  // samples: (text, language code). Requires at least two languages with one
  // sample each.
  static LangIdModel train(
      const std::vector<std::pair<std::string, std::string>>& samples);

  // (language, confidence); confidence is the normalized posterior.
  // Throws Error("EmptyText") when the text is empty after normalization.
  std::pair<std::string, double> classify(std::string_view text) const;

  // Posterior per language; values sum to 1.
  std::map<std::string, double> posteriors(std::string_view text) const;

  std::vector<std::string> languages() const;

  // Total probability mass of one language's order-n distribution over the
  // shared n-gram vocabulary; equals 1 by construction.
  double prob_sum(const std::string& lang, int order) const;

  void save(const std::string& path) const;
  static LangIdModel load(const std::string& path);

 private:
  struct Profile {
    std::array<std::map<std::string, std::uint64_t>, kMaxOrder> counts;
    std::array<std::uint64_t, kMaxOrder> totals{};
  };

  double log_likelihood(const std::string& lang,
                        const std::array<std::vector<std::string>, kMaxOrder>&
                            grams) const;

  static std::array<std::vector<std::string>, kMaxOrder> extract_grams(
      std::string_view text);

  std::map<std::string, Profile> profiles_;
  std::array<std::uint64_t, kMaxOrder> vocab_sizes_{};  // shared across langs
};

}  // namespace mtpoison
