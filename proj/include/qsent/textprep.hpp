#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qsent/types.hpp"

namespace qsent::textprep {

struct Document {
    std::string text;
    std::string label;
};

// Ordered regex substitution applied before tokenization.
struct CleanRule {
    std::string pattern;
    std::string replacement;
};

// Compiles the rule list once; invalid patterns raise ConfigError at
// construction, never mid-corpus. Cleaning always finishes by collapsing
// whitespace runs and trimming, which makes it idempotent.
class TextCleaner {
  public:
    explicit TextCleaner(const std::vector<CleanRule> &rules);

    // URLs, @-mentions, ASCII punctuation/digits and the Bengali danda are
    // stripped; case is preserved.
    static TextCleaner defaults();
    static std::vector<CleanRule> default_rules();

    std::string clean(const std::string &raw) const;

  private:
    std::vector<std::pair<std::regex, std::string>> compiled_;
};

// Split on Unicode whitespace; no empty tokens, order preserved.
std::vector<std::string> tokenize(std::string_view text);

// Stop-word filter. Latin letters match case-insensitively (ASCII fold);
// everything else matches by exact codepoints.
class StopWordSet {
  public:
    StopWordSet() = default;
    static StopWordSet load(const std::filesystem::path &path);
    static StopWordSet from_terms(const std::vector<std::string> &terms);

    bool contains(std::string_view token) const;
    std::size_t size() const { return terms_.size(); }
    std::vector<std::string> terms() const; // sorted, ASCII-folded

  private:
    std::unordered_set<std::string> terms_; // ASCII-folded
};

std::vector<std::string> remove_stopwords(const std::vector<std::string> &tokens,
                                          const StopWordSet &stops);

struct LabelEncoding {
    Labels labels;                         // 0/1 per document
    std::map<std::string, int> class_bits; // class name -> bit
};

// Lexicographically smaller class -> 0. Throws DataError unless exactly two
// distinct classes are present.
LabelEncoding encode_labels(const std::vector<std::string> &raw);

// Term -> index map over the training corpus, indices in lexicographic term
// order so the feature layout is reproducible.
class Vocabulary {
  public:
    static Vocabulary build(const std::vector<std::vector<std::string>> &corpus);
    static Vocabulary from_terms(std::vector<std::string> terms);

    std::size_t size() const { return terms_.size(); }
    const std::vector<std::string> &terms() const { return terms_; }
    std::optional<int> index_of(const std::string &term) const;

    void save_csv(const std::filesystem::path &path) const;
    static Vocabulary load_csv(const std::filesystem::path &path);

  private:
    std::vector<std::string> terms_; // sorted
    std::unordered_map<std::string, int> index_;
};

// counts[i] = multiplicity of term i; out-of-vocabulary tokens are dropped.
std::vector<int> vectorize(const std::vector<std::string> &tokens,
                           const Vocabulary &vocab);

// Stacks count vectors (as doubles) into a sample-major matrix.
FeatureMatrix vectorize_corpus(const std::vector<std::vector<std::string>> &docs,
                               const Vocabulary &vocab);

} // namespace qsent::textprep
