#include "newspulse/classify.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "newspulse/csv.hpp"
#include "newspulse/errors.hpp"
#include "newspulse/textnorm.hpp"

namespace newspulse {

namespace {

std::string trim(std::string s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_parts(const std::string& term) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : term) {
        if (c == ' ' || c == '-') {
            if (!cur.empty()) parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
}

} // namespace

void KeywordFilter::rebuild_parts() {
    parts_.clear();
    parts_.reserve(terms_.size());
    for (const auto& t : terms_) parts_.push_back(split_parts(t));
}

KeywordFilter KeywordFilter::from_terms(std::vector<std::string> terms, const std::string& name) {
    KeywordFilter f;
    f.name_ = name;
    std::unordered_set<std::string> seen;
    for (auto& raw : terms) {
        std::string term = normalize_for_match(trim(raw));
        if (term.empty()) continue;
        if (term[0] == '#' || term[0] == '@')
            throw Error("keyword filter '" + name + "': Twitter-style token '" + term + "' not allowed");
        if (seen.insert(term).second) f.terms_.push_back(term);
    }
    f.rebuild_parts();
    return f;
}

KeywordFilter KeywordFilter::limited() {
    return from_terms({"covid", "covid19", "coronavirus", "sars-cov-2"}, "limited");
}

KeywordFilter KeywordFilter::load(const std::string& path, const std::string& name) {
    std::string content = read_file(path);
    std::vector<std::string> terms;
    size_t pos = 0;
    while (pos <= content.size()) {
        size_t nl = content.find('\n', pos);
        std::string line = trim(content.substr(pos, (nl == std::string::npos ? content.size() : nl) - pos));
        if (!line.empty() && line[0] != '#') terms.push_back(line);
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    if (terms.empty()) throw Error("keyword filter file " + path + " has no terms");
    return from_terms(std::move(terms), name);
}

bool KeywordFilter::contains_all(const KeywordFilter& other) const {
    std::unordered_set<std::string> mine(terms_.begin(), terms_.end());
    for (const auto& t : other.terms_)
        if (!mine.count(t)) return false;
    return true;
}

void KeywordFilter::ensure_superset_of(const KeywordFilter& other) {
    std::unordered_set<std::string> mine(terms_.begin(), terms_.end());
    for (const auto& t : other.terms_) {
        if (!mine.count(t)) {
            terms_.push_back(t);
            mine.insert(t);
        }
    }
    rebuild_parts();
}

struct Matcher {
    static MatchResult run(std::string_view text, const KeywordFilter& filter) {
        MatchResult result;
        if (text.empty() || filter.terms_.empty()) return result;

        std::string norm = normalize_for_match(text);
        std::vector<std::string> parts;
        tokenize_with_parts(norm, parts);
        if (parts.empty()) return result;

        // Index fine parts for O(1) candidate lookup per term.
        std::unordered_map<std::string_view, std::vector<size_t>> where;
        for (size_t i = 0; i < parts.size(); ++i) where[parts[i]].push_back(i);

        for (size_t t = 0; t < filter.terms_.size(); ++t) {
            const auto& term_parts = filter.parts_[t];
            if (term_parts.empty()) continue;
            bool hit = false;

            auto it = where.find(term_parts[0]);
            if (it != where.end()) {
                for (size_t start : it->second) {
                    if (start + term_parts.size() > parts.size()) continue;
                    bool all = true;
                    for (size_t k = 1; k < term_parts.size(); ++k) {
                        if (parts[start + k] != term_parts[k]) {
                            all = false;
                            break;
                        }
                    }
                    if (all) {
                        hit = true;
                        break;
                    }
                }
            }

            // "covid" also matches digit-suffixed tokens: covid19, covid2020.
            if (!hit && filter.terms_[t] == "covid") {
                for (const auto& p : parts) {
                    if (p.size() > 5 && p.compare(0, 5, "covid") == 0 &&
                        std::isdigit(static_cast<unsigned char>(p[5]))) {
                        hit = true;
                        break;
                    }
                }
            }

            if (hit) {
                result.match = true;
                result.hits.push_back(filter.terms_[t]);
            }
        }
        return result;
    }
};

MatchResult classify_text(std::string_view text, const KeywordFilter& filter) {
    return Matcher::run(text, filter);
}

ReclassifyCounts reclassify_store(ArticleStore& store, const KeywordFilter& full,
                                  const KeywordFilter& limited) {
    if (!full.contains_all(limited))
        throw Error("full filter must contain every limited term (limited ⊆ full)");

    ReclassifyCounts counts;
    std::vector<std::pair<std::string, std::pair<bool, bool>>> flags;
    for (const auto& article : store.articles()) {
        bool f = classify_text(article.text, full).match;
        bool l = classify_text(article.text, limited).match;
        flags.emplace_back(article.article_id, std::make_pair(f, l));
        ++counts.total;
        if (f) ++counts.full;
        if (l) ++counts.limited;
    }
    store.set_flags(flags);
    return counts;
}

} // namespace newspulse
