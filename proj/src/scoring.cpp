#include "tsdistill/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "tsdistill/errors.hpp"

namespace tsdistill {
namespace {

std::vector<std::string> words_of(std::string_view s) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : s) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc)) {
      cur += static_cast<char>(std::tolower(uc));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

struct ClauseWord {
  std::string text;
  std::size_t clause = 0;
};

// Lower-cased words tagged with a clause number. Punctuation and the
// conjunctions and/while/whereas/but start a new clause.
std::vector<ClauseWord> clause_words(std::string_view s) {
  std::vector<ClauseWord> out;
  std::size_t clause = 0;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    if (cur == "and" || cur == "while" || cur == "whereas" || cur == "but") ++clause;
    else out.push_back({cur, clause});
    cur.clear();
  };
  for (char c : s) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc)) {
      cur += static_cast<char>(std::tolower(uc));
      continue;
    }
    flush();
    if (c == ',' || c == ';' || c == '.' || c == ':' || c == '!' || c == '?') ++clause;
  }
  flush();
  return out;
}

bool starts_with(const std::string& w, std::string_view prefix) {
  return w.size() >= prefix.size() && std::string_view(w).substr(0, prefix.size()) == prefix;
}

template <class T>
std::optional<T> unique_or_none(const std::set<T>& found) {
  if (found.size() != 1) return std::nullopt;
  return *found.begin();
}

std::optional<Location> location_word(const std::string& w) {
  static const std::set<std::string> beginning{"beginning", "start", "begin", "early", "initial", "initially", "outset"};
  static const std::set<std::string> middle{"middle", "center", "centre", "midpoint", "halfway", "mid", "midway"};
  static const std::set<std::string> end{"end", "ending", "final", "late", "finish"};
  if (beginning.count(w)) return Location::beginning;
  if (middle.count(w)) return Location::middle;
  if (end.count(w)) return Location::end;
  return std::nullopt;
}

bool is_max_anchor(const std::string& w) {
  return w == "maximum" || w == "max" || w == "maxima" || w == "peak" || w == "peaks" ||
         w == "highest";
}

bool is_min_anchor(const std::string& w) {
  return w == "minimum" || w == "min" || w == "minima" || w == "trough" || w == "troughs" ||
         w == "lowest";
}

NliLabel compare_ordered(std::optional<int> a, std::optional<int> b) {
  if (!a || !b) return NliLabel::neutral;
  if (*a == *b) return NliLabel::entailment;
  if (std::abs(*a - *b) == 2) return NliLabel::contradiction;
  return NliLabel::neutral;
}

NliLabel compare_extrema(const std::optional<ExtremaMention>& a,
                         const std::optional<ExtremaMention>& b) {
  if (!a || !b) return NliLabel::neutral;
  bool all_equal = true;
  for (auto slot : {&ExtremaMention::max_loc, &ExtremaMention::min_loc}) {
    const auto& x = (*a).*slot;
    const auto& y = (*b).*slot;
    if (x && y && *x != *y) return NliLabel::contradiction;
    if (!x || !y) all_equal = false;
  }
  return all_equal ? NliLabel::entailment : NliLabel::neutral;
}

}  // namespace

std::string_view to_string(NliLabel l) noexcept {
  switch (l) {
    case NliLabel::entailment: return "entailment";
    case NliLabel::neutral: return "neutral";
    case NliLabel::contradiction: return "contradiction";
  }
  return "?";
}

std::optional<NliLabel> nli_label_from_string(std::string_view s) noexcept {
  for (auto l : {NliLabel::entailment, NliLabel::neutral, NliLabel::contradiction})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

std::optional<Trend> extract_trend(std::string_view sentence) {
  const auto words = words_of(sentence);
  std::set<Trend> found;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    if (starts_with(w, "increas") || w == "upward" || w == "upwards" || w == "rising" ||
        w == "uptrend") {
      found.insert(Trend::increasing);
    } else if (starts_with(w, "decreas") || w == "downward" || w == "downwards" ||
               w == "declining" || w == "falling" || w == "downtrend") {
      found.insert(Trend::decreasing);
    } else if (w == "flat" || w == "stable" || w == "sideways" || w == "stationary") {
      found.insert(Trend::flat);
    } else if (w == "no" && i + 1 < words.size() &&
               (words[i + 1] == "trend" ||
                (i + 2 < words.size() && words[i + 1] == "clear" && words[i + 2] == "trend"))) {
      found.insert(Trend::flat);
    }
  }
  return unique_or_none(found);
}

std::optional<NoiseLevel> extract_noise(std::string_view sentence) {
  std::set<NoiseLevel> found;
  for (const auto& w : words_of(sentence)) {
    if (w == "low") found.insert(NoiseLevel::low);
    else if (w == "medium" || w == "moderate") found.insert(NoiseLevel::medium);
    else if (w == "high") found.insert(NoiseLevel::high);
  }
  return unique_or_none(found);
}

std::optional<ExtremaMention> extract_extrema(std::string_view sentence) {
  const auto words = clause_words(sentence);
  std::vector<std::size_t> anchors;  // indices into words
  for (std::size_t i = 0; i < words.size(); ++i)
    if (is_max_anchor(words[i].text) || is_min_anchor(words[i].text)) anchors.push_back(i);
  if (anchors.empty()) return std::nullopt;

  std::set<Location> max_found;
  std::set<Location> min_found;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto loc = location_word(words[i].text);
    if (!loc) continue;
    // Nearest anchor in the same clause (earlier one on ties); failing that,
    // the nearest earlier anchor; failing that, the first one.
    std::optional<std::size_t> best;
    std::size_t best_dist = 0;
    for (std::size_t a : anchors) {
      if (words[a].clause != words[i].clause) continue;
      const std::size_t dist = a > i ? a - i : i - a;
      if (!best || dist < best_dist) {
        best = a;
        best_dist = dist;
      }
    }
    if (!best) {
      for (std::size_t a : anchors)
        if (a < i) best = a;
    }
    if (!best) best = anchors.front();
    (is_max_anchor(words[*best].text) ? max_found : min_found).insert(*loc);
  }

  ExtremaMention m{unique_or_none(max_found), unique_or_none(min_found)};
  if (!m.max_loc && !m.min_loc) return std::nullopt;
  return m;
}

std::optional<Category> extract_category(std::string_view sentence, Field field) {
  switch (field) {
    case Field::trend:
      if (auto t = extract_trend(sentence)) return Category{*t};
      return std::nullopt;
    case Field::noise:
      if (auto n = extract_noise(sentence)) return Category{*n};
      return std::nullopt;
    case Field::extrema:
      break;
  }
  if (auto e = extract_extrema(sentence)) return Category{*e};
  return std::nullopt;
}

NliLabel RuleScorer::classify(std::string_view premise, std::string_view hypothesis, Field field) {
  // Ordinal positions: increasing/low = 0, flat/medium = 1, decreasing/high = 2.
  auto trend_rank = [](std::string_view s) -> std::optional<int> {
    const auto t = extract_trend(s);
    if (!t) return std::nullopt;
    return *t == Trend::increasing ? 0 : *t == Trend::flat ? 1 : 2;
  };
  auto noise_rank = [](std::string_view s) -> std::optional<int> {
    const auto n = extract_noise(s);
    if (!n) return std::nullopt;
    return static_cast<int>(*n);
  };
  switch (field) {
    case Field::trend: return compare_ordered(trend_rank(premise), trend_rank(hypothesis));
    case Field::noise: return compare_ordered(noise_rank(premise), noise_rank(hypothesis));
    case Field::extrema: break;
  }
  return compare_extrema(extract_extrema(premise), extract_extrema(hypothesis));
}

NliVerdict nli_compare(std::string_view premise, std::string_view hypothesis, NliScorer& scorer,
                       Field field) {
  if (premise.empty() || hypothesis.empty())
    throw ValidationError("nli_compare: premise and hypothesis must be non-empty");
  return NliVerdict::of(scorer.classify(premise, hypothesis, field));
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw ValidationError("cosine: vectors must be non-empty and of equal dimension");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ValidationError("cosine: zero-norm vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace tsdistill
