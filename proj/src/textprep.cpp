#include "qsent/textprep.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "qsent/errors.hpp"

namespace qsent::textprep {

namespace {

// Decodes the UTF-8 codepoint starting at s[i]; advances i past it.
// Malformed bytes are passed through as single-byte codepoints.
char32_t next_codepoint(std::string_view s, std::size_t &i) {
    const unsigned char b0 = s[i];
    std::size_t len = 1;
    char32_t cp = b0;
    if ((b0 & 0x80) == 0x00) {
        len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    }
    if (i + len > s.size())
        len = 1, cp = b0;
    for (std::size_t k = 1; k < len; ++k) {
        const unsigned char bk = s[i + k];
        if ((bk & 0xC0) != 0x80) { // truncated sequence
            len = 1;
            cp = b0;
            break;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += len;
    return cp;
}

bool is_unicode_space(char32_t cp) {
    switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\v':
    case U'\f':
    case 0x0085: // NEL
    case 0x00A0: // NBSP
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
        return true;
    default:
        return cp >= 0x2000 && cp <= 0x200A;
    }
}

// Lowercase ASCII letters only; multibyte sequences (Bengali etc.) are kept
// byte-exact, which gives exact-codepoint matching for caseless scripts.
std::string ascii_fold(std::string_view token) {
    std::string out(token);
    for (char &c : out)
        if (c >= 'A' && c <= 'Z')
            c += 'a' - 'A';
    return out;
}

std::string collapse_whitespace(const std::string &text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    bool pending_space = false;
    while (i < text.size()) {
        const std::size_t start = i;
        const char32_t cp = next_codepoint(text, i);
        if (is_unicode_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out.append(text, start, i - start);
    }
    return out;
}

} // namespace

TextCleaner::TextCleaner(const std::vector<CleanRule> &rules) {
    for (const auto &rule : rules) {
        try {
            compiled_.emplace_back(
                std::regex(rule.pattern, std::regex::ECMAScript),
                rule.replacement);
        } catch (const std::regex_error &e) {
            throw ConfigError("invalid cleaning rule '" + rule.pattern +
                              "': " + e.what());
        }
    }
}

std::vector<CleanRule> TextCleaner::default_rules() {
    return {
        {R"(https?://\S+)", " "},
        {R"(www\.\S+)", " "},
        {R"(@\w+)", " "},
        {"\xE0\xA5\xA4", " "}, // Bengali danda
        {R"([!-/:-@\[-`{-~])", " "},
        {R"([0-9])", ""},
    };
}

TextCleaner TextCleaner::defaults() { return TextCleaner(default_rules()); }

std::string TextCleaner::clean(const std::string &raw) const {
    std::string text = raw;
    for (const auto &[re, replacement] : compiled_)
        text = std::regex_replace(text, re, replacement);
    return collapse_whitespace(text);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    std::size_t token_start = 0;
    bool in_token = false;
    while (i < text.size()) {
        const std::size_t start = i;
        const char32_t cp = next_codepoint(text, i);
        if (is_unicode_space(cp)) {
            if (in_token) {
                tokens.emplace_back(text.substr(token_start, start - token_start));
                in_token = false;
            }
        } else if (!in_token) {
            token_start = start;
            in_token = true;
        }
    }
    if (in_token)
        tokens.emplace_back(text.substr(token_start));
    return tokens;
}

StopWordSet StopWordSet::load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open stop-word list: " + path.string());
    StopWordSet set;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        for (const auto &tok : tokenize(line))
            set.terms_.insert(ascii_fold(tok));
    }
    return set;
}

StopWordSet StopWordSet::from_terms(const std::vector<std::string> &terms) {
    StopWordSet set;
    for (const auto &t : terms)
        set.terms_.insert(ascii_fold(t));
    return set;
}

bool StopWordSet::contains(std::string_view token) const {
    return terms_.count(ascii_fold(token)) > 0;
}

std::vector<std::string> StopWordSet::terms() const {
    std::vector<std::string> out(terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string> &tokens,
                                          const StopWordSet &stops) {
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (const auto &tok : tokens)
        if (!stops.contains(tok))
            kept.push_back(tok);
    return kept;
}

LabelEncoding encode_labels(const std::vector<std::string> &raw) {
    std::map<std::string, int> classes; // ordered -> lexicographic bits
    for (const auto &label : raw)
        classes.emplace(label, 0);
    if (classes.size() != 2) {
        std::string found;
        for (const auto &[name, bit] : classes)
            found += (found.empty() ? "" : ", ") + name;
        throw DataError("expected exactly 2 classes, found " +
                        std::to_string(classes.size()) + " (" + found + ")");
    }
    int bit = 0;
    for (auto &[name, value] : classes)
        value = bit++;
    LabelEncoding enc;
    enc.class_bits = classes;
    enc.labels.reserve(raw.size());
    for (const auto &label : raw)
        enc.labels.push_back(classes.at(label));
    return enc;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>> &corpus) {
    std::vector<std::string> terms;
    for (const auto &doc : corpus)
        terms.insert(terms.end(), doc.begin(), doc.end());
    return from_terms(std::move(terms));
}

Vocabulary Vocabulary::from_terms(std::vector<std::string> terms) {
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    if (terms.empty())
        throw DataError("cannot build a vocabulary from an empty corpus");
    Vocabulary v;
    v.terms_ = std::move(terms);
    v.index_.reserve(v.terms_.size());
    for (std::size_t i = 0; i < v.terms_.size(); ++i)
        v.index_.emplace(v.terms_[i], int(i));
    return v;
}

std::optional<int> Vocabulary::index_of(const std::string &term) const {
    const auto it = index_.find(term);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

namespace {

std::string csv_escape(const std::string &field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

void Vocabulary::save_csv(const std::filesystem::path &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write vocabulary to " + path.string());
    out << "term,index\n";
    for (std::size_t i = 0; i < terms_.size(); ++i)
        out << csv_escape(terms_[i]) << "," << i << "\n";
}

Vocabulary Vocabulary::load_csv(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open vocabulary file: " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw DataError("vocabulary file is empty: " + path.string());
    std::vector<std::string> terms;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos)
            throw DataError("malformed vocabulary line: " + line);
        std::string term = line.substr(0, comma);
        if (term.size() >= 2 && term.front() == '"' && term.back() == '"') {
            std::string unescaped;
            for (std::size_t i = 1; i + 1 < term.size(); ++i) {
                if (term[i] == '"' && i + 2 < term.size() && term[i + 1] == '"')
                    ++i;
                unescaped += term[i];
            }
            term = unescaped;
        }
        terms.push_back(std::move(term));
    }
    return from_terms(std::move(terms));
}

std::vector<int> vectorize(const std::vector<std::string> &tokens,
                           const Vocabulary &vocab) {
    std::vector<int> counts(vocab.size(), 0);
    for (const auto &tok : tokens)
        if (const auto idx = vocab.index_of(tok))
            ++counts[std::size_t(*idx)];
    return counts;
}

FeatureMatrix vectorize_corpus(const std::vector<std::vector<std::string>> &docs,
                               const Vocabulary &vocab) {
    FeatureMatrix X(Eigen::Index(docs.size()), Eigen::Index(vocab.size()));
    for (std::size_t r = 0; r < docs.size(); ++r) {
        const auto counts = vectorize(docs[r], vocab);
        for (std::size_t c = 0; c < counts.size(); ++c)
            X(Eigen::Index(r), Eigen::Index(c)) = double(counts[c]);
    }
    return X;
}

} // namespace qsent::textprep
