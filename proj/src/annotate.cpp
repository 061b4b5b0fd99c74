#include "mgtdetect/annotate.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "mgtdetect/error.hpp"
#include "mgtdetect/log.hpp"
#include "mgtdetect/text_util.hpp"

namespace mgtdetect {

namespace {

constexpr std::array<std::string_view, 16> kPosNames = {
    "NOUN", "PROPN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP",
    "NUM",  "CONJ",  "PART", "INTJ", "PUNCT", "SYM", "SPACE", "X"};

constexpr std::array<std::string_view, 4> kRoleNames = {"subject", "object", "other", "none"};

// Tokens that are never split and never end a sentence.
constexpr std::array<std::string_view, 44> kAbbreviations = {
    "i.e.",  "e.g.",  "etc.",  "cf.",   "vs.",   "viz.", "al.",  "ca.",   "a.m.",  "p.m.",  "n.b.",
    "ibid.", "approx.", "mr.", "mrs.",  "ms.",   "dr.",  "prof.", "st.",  "jr.",   "sr.",   "inc.",
    "ltd.",  "co.",   "no.",   "fig.",  "vol.",  "jan.", "feb.",  "mar.", "apr.",  "jun.",  "jul.",
    "aug.",  "sep.",  "sept.", "oct.",  "nov.",  "dec.", "u.s.",  "u.k.", "e.u.",  "dept.", "est."};

constexpr std::array<std::string_view, 14> kLatinAbbreviations = {
    "i.e.", "e.g.", "etc.", "etc", "cf.", "vs.", "viz.", "al.", "et", "ca.", "a.m.", "p.m.", "n.b.", "ibid."};

constexpr std::array<std::string_view, 9> kModals = {"can",   "could", "will", "would", "shall",
                                                     "should", "may",  "might", "must"};
constexpr std::array<std::string_view, 6> kSubjectPronouns = {"i", "you", "he", "she", "we", "they"};

bool is_unicode_punct(char32_t cp) {
    switch (cp) {
        case 0x2018: case 0x2019: case 0x201C: case 0x201D: case 0x2013: case 0x2014:
        case 0x2026: case 0x00AB: case 0x00BB: case 0x00A1: case 0x00BF:
            return true;
        default:
            return false;
    }
}

bool is_symbol_cp(char32_t cp) {
    switch (cp) {
        case '$': case '%': case '+': case '<': case '=': case '>': case '^': case '`':
        case '|': case '~': case '#': case '&': case '*': case '@': case '\\':
        case 0x00A3: case 0x00A5: case 0x20AC: case 0x00B0: case 0x00A9: case 0x00AE:
            return true;
        default:
            return false;
    }
}

bool is_punct_cp(char32_t cp) {
    if (cp < 0x80) {
        const auto c = static_cast<char>(cp);
        return cp > 0x20 && cp < 0x7F && !is_ascii_alpha(c) && !is_ascii_digit(c);
    }
    return is_unicode_punct(cp) || is_symbol_cp(cp);
}

bool is_space_byte(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

struct Cp {
    char32_t cp;
    std::size_t start;
    std::size_t len;
};

std::vector<Cp> decode(std::string_view s) {
    std::vector<Cp> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const auto start = i;
        const auto cp = next_code_point(s, i);
        out.push_back({cp, start, i - start});
    }
    return out;
}

bool is_word_cp(char32_t cp) { return !is_punct_cp(cp); }

bool is_abbreviation(std::string_view s) {
    const auto lower = to_lower_ascii(s);
    if (std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end()) return true;
    // Dotted initials such as "U.S.A."
    if (s.size() < 4 || s.size() % 2 != 0) return false;
    for (std::size_t i = 0; i < s.size(); i += 2)
        if (!is_ascii_alpha(s[i]) || s[i + 1] != '.') return false;
    return true;
}

struct RawToken {
    std::string surface;
    bool space_before = false;
    bool is_space = false;
};

class Tokenizer {
public:
    std::vector<RawToken> run(std::string_view text) {
        std::size_t i = 0;
        bool space_before = false;
        while (i < text.size()) {
            if (is_space_byte(text[i])) {
                std::size_t j = i;
                while (j < text.size() && is_space_byte(text[j])) ++j;
                const auto run = text.substr(i, j - i);
                if (run != " ") out_.push_back({std::string(run), !out_.empty(), true});
                space_before = true;
                i = j;
                continue;
            }
            std::size_t j = i;
            while (j < text.size() && !is_space_byte(text[j])) ++j;
            pending_space_ = space_before;
            chunk(text.substr(i, j - i));
            space_before = false;
            i = j;
        }
        return std::move(out_);
    }

private:
    void emit(std::string_view s) {
        out_.push_back({std::string(s), pending_space_, false});
        pending_space_ = false;
    }

    void chunk(std::string_view c) {
        if (is_abbreviation(c)) {
            emit(c);
            return;
        }
        const auto cps = decode(c);
        std::size_t lo = 0, hi = cps.size();
        // leading punctuation
        while (lo < hi && is_punct_cp(cps[lo].cp)) {
            const auto rest = c.substr(cps[lo].start, cps[hi - 1].start + cps[hi - 1].len - cps[lo].start);
            if (is_abbreviation(rest)) break;
            std::size_t k = lo + 1;
            if (cps[lo].cp == '.')
                while (k < hi && cps[k].cp == '.') ++k;
            emit(c.substr(cps[lo].start, cps[k - 1].start + cps[k - 1].len - cps[lo].start));
            lo = k;
        }
        // trailing punctuation, emitted after the core
        std::vector<std::string_view> trailing;
        while (hi > lo && is_punct_cp(cps[hi - 1].cp)) {
            const auto core = c.substr(cps[lo].start, cps[hi - 1].start + cps[hi - 1].len - cps[lo].start);
            if (is_abbreviation(core)) break;
            std::size_t k = hi - 1;
            if (cps[k].cp == '.')
                while (k > lo && cps[k - 1].cp == '.') --k;
            trailing.push_back(c.substr(cps[k].start, cps[hi - 1].start + cps[hi - 1].len - cps[k].start));
            hi = k;
        }
        if (lo < hi) core(c, cps, lo, hi);
        for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) emit(*it);
    }

    // Splits internal punctuation unless it joins two word characters
    // (hyphen, apostrophe, ampersand) or two digits (decimal point, thousands, clock).
    void core(std::string_view c, const std::vector<Cp>& cps, std::size_t lo, std::size_t hi) {
        const auto whole = c.substr(cps[lo].start, cps[hi - 1].start + cps[hi - 1].len - cps[lo].start);
        if (is_abbreviation(whole)) {
            emit(whole);
            return;
        }
        std::size_t word_start = lo;
        auto flush = [&](std::size_t end) {
            if (end > word_start)
                emit(c.substr(cps[word_start].start, cps[end - 1].start + cps[end - 1].len - cps[word_start].start));
        };
        std::size_t k = lo;
        while (k < hi) {
            const auto cp = cps[k].cp;
            if (!is_punct_cp(cp)) {
                ++k;
                continue;
            }
            const bool inner = k > lo && k + 1 < hi;
            if (inner) {
                const auto prev = cps[k - 1].cp;
                const auto next = cps[k + 1].cp;
                const bool joins_words = (cp == '-' || cp == '\'' || cp == 0x2019 || cp == '&') &&
                                         is_word_cp(prev) && is_word_cp(next) && !is_punct_cp(prev) &&
                                         !is_punct_cp(next);
                const bool joins_digits = (cp == '.' || cp == ',' || cp == ':') && prev < 0x80 && next < 0x80 &&
                                          is_ascii_digit(static_cast<char>(prev)) &&
                                          is_ascii_digit(static_cast<char>(next));
                if (joins_words || joins_digits) {
                    ++k;
                    continue;
                }
            }
            flush(k);
            std::size_t e = k + 1;
            if (cp == '.')
                while (e < hi && cps[e].cp == '.') ++e;
            emit(c.substr(cps[k].start, cps[e - 1].start + cps[e - 1].len - cps[k].start));
            k = e;
            word_start = k;
        }
        flush(hi);
    }

    std::vector<RawToken> out_;
    bool pending_space_ = false;
};

bool is_terminal(std::string_view s) {
    if (s.empty()) return false;
    if (s == "\xE2\x80\xA6") return true;  // ellipsis
    return std::all_of(s.begin(), s.end(), [](char c) { return c == '.' || c == '!' || c == '?'; });
}

bool is_closer(std::string_view s) {
    return s == "\"" || s == "'" || s == ")" || s == "]" || s == "}" || s == "\xE2\x80\x9D" || s == "\xE2\x80\x99";
}

bool starts_upper(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = 0;
    return classify(next_code_point(s, i)) == CharClass::upper;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool all_punct(std::string_view s) {
    const auto cps = decode(s);
    return !cps.empty() && std::all_of(cps.begin(), cps.end(), [](const Cp& c) { return is_punct_cp(c.cp); });
}

bool is_clause_break(const Token& t) {
    if (t.pos != Pos::PUNCT) return false;
    return t.surface == "," || t.surface == ";" || t.surface == ":" || t.surface == "(" || t.surface == ")" ||
           t.surface == "\"" || t.surface == "-" || t.surface == "--" || t.surface == "\xE2\x80\x94" ||
           t.surface == "\xE2\x80\x93" || t.surface == "\xE2\x80\x9C" || t.surface == "\xE2\x80\x9D";
}

bool is_entity_pos(Pos p) { return p == Pos::NOUN || p == Pos::PROPN || p == Pos::PRON; }

std::string escape_field(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    if (out.empty()) return "_";
    if (out == "_") return "\\_";
    return out;
}

std::string unescape_field(std::string_view s, std::size_t line) {
    if (s == "_") return {};
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (++i == s.size()) throw ParseError("dangling escape", line);
        switch (s[i]) {
            case '\\': out += '\\'; break;
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            case '_': out += '_'; break;
            default: throw ParseError(std::string("unknown escape \\") + s[i], line);
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(Pos p) { return kPosNames[static_cast<std::size_t>(p)]; }

std::optional<Pos> parse_pos(std::string_view s) {
    for (std::size_t i = 0; i < kPosNames.size(); ++i)
        if (kPosNames[i] == s) return static_cast<Pos>(i);
    // Universal Dependencies spellings that collapse onto the coarse set.
    if (s == "AUX") return Pos::VERB;
    if (s == "CCONJ" || s == "SCONJ") return Pos::CONJ;
    return std::nullopt;
}

std::string_view to_string(Role r) { return kRoleNames[static_cast<std::size_t>(r)]; }

std::optional<Role> parse_role(std::string_view s) {
    for (std::size_t i = 0; i < kRoleNames.size(); ++i)
        if (kRoleNames[i] == s) return static_cast<Role>(i);
    return std::nullopt;
}

std::string shape_of(std::string_view surface) {
    std::string out;
    std::size_t i = 0;
    // last emitted class key and its run length; verbatim characters key on themselves
    std::string last;
    int run = 0;
    while (i < surface.size()) {
        const auto start = i;
        const auto cp = next_code_point(surface, i);
        std::string piece;
        switch (classify(cp)) {
            case CharClass::lower: piece = "x"; break;
            case CharClass::upper: piece = "X"; break;
            case CharClass::digit: piece = "d"; break;
            case CharClass::other: piece = std::string(surface.substr(start, i - start)); break;
        }
        run = piece == last ? run + 1 : 1;
        last = piece;
        if (run <= 4) out += piece;
    }
    return out;
}

int syllables_of(std::string_view surface) {
    std::string letters;
    for (char c : surface)
        if (is_ascii_alpha(c)) letters += static_cast<char>(c | 0x20);
    if (letters.empty()) return has_letter(surface) ? 1 : 0;

    auto vowel = [](char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; };
    int groups = 0;
    bool in_group = false;
    for (char c : letters) {
        const bool v = vowel(c);
        if (v && !in_group) ++groups;
        in_group = v;
    }
    if (groups > 1 && letters.back() == 'e' && !ends_with(letters, "le")) --groups;
    return std::max(groups, 1);
}

bool is_latin_abbreviation(std::string_view surface) {
    const auto lower = to_lower_ascii(surface);
    return std::find(kLatinAbbreviations.begin(), kLatinAbbreviations.end(), lower) != kLatinAbbreviations.end();
}

bool is_word(const Token& t) {
    if (t.pos == Pos::PUNCT || t.pos == Pos::SYM || t.pos == Pos::SPACE) return false;
    return has_letter(t.surface);
}

Annotator::Annotator(const Resources& resources) : res_(resources) {}

void Annotator::finish_token(Token& t) const {
    t.shape = shape_of(t.surface);
    t.syllables = syllables_of(t.surface);
    t.is_stopword = res_.stopwords.count(to_lower_ascii(t.surface)) > 0;
    t.is_latin_abbrev = is_latin_abbreviation(t.surface);
}

Pos Annotator::tag_word(std::string_view surface, bool sentence_initial, const Token* prev) const {
    const auto lower = to_lower_ascii(surface);
    const bool letters = has_letter(surface);
    if (!letters) return has_digit(surface) ? Pos::NUM : Pos::X;
    if (is_latin_abbreviation(surface)) return Pos::X;

    bool all_upper = surface.size() >= 2;
    for (char c : surface)
        if (is_ascii_alpha(c) && !(c >= 'A' && c <= 'Z')) all_upper = false;

    if (!(all_upper && !sentence_initial)) {
        if (auto it = res_.lexicon.find(lower); it != res_.lexicon.end())
            if (auto p = parse_pos(it->second)) return *p;
    }
    if (has_digit(surface)) return starts_upper(surface) || all_upper ? Pos::PROPN : Pos::NOUN;
    if ((starts_upper(surface) && !sentence_initial) || all_upper) return Pos::PROPN;
    if (is_abbreviation(surface)) return Pos::PROPN;

    const bool nominal_suffix = ends_with(lower, "tion") || ends_with(lower, "sion") || ends_with(lower, "ness") ||
                                ends_with(lower, "ment") || ends_with(lower, "ity") || ends_with(lower, "ism") ||
                                ends_with(lower, "ship");
    if (prev && !nominal_suffix && !ends_with(lower, "ly")) {
        const auto p = to_lower_ascii(prev->surface);
        if (p == "to" || std::find(kModals.begin(), kModals.end(), p) != kModals.end() ||
            std::find(kSubjectPronouns.begin(), kSubjectPronouns.end(), p) != kSubjectPronouns.end())
            return Pos::VERB;
    }
    if (lower.size() > 3 && ends_with(lower, "ly")) return Pos::ADV;
    if (lower.size() > 4 && ends_with(lower, "ing")) return Pos::VERB;
    if (lower.size() > 3 && ends_with(lower, "ed")) return Pos::VERB;
    if (nominal_suffix) return Pos::NOUN;
    for (std::string_view suf : {"ous", "ful", "ive", "able", "ible", "less", "ical"})
        if (lower.size() > suf.size() + 2 && ends_with(lower, suf)) return Pos::ADJ;
    return Pos::NOUN;
}

// Clause-position heuristic: the first nominal before the clause's first verb is
// the subject; the first nominal after it (not inside a prepositional phrase) the
// object; every other nominal is "other".
void Annotator::assign_roles(Sentence& s) const {
    bool seen_verb = false, has_subject = false, has_object = false, adp_after_verb = false;
    for (auto& t : s.tokens) {
        if (is_clause_break(t)) {
            seen_verb = has_subject = has_object = adp_after_verb = false;
            continue;
        }
        if (t.pos == Pos::VERB) {
            seen_verb = true;
            adp_after_verb = false;
            continue;
        }
        if (t.pos == Pos::ADP && seen_verb) adp_after_verb = true;
        if (!is_entity_pos(t.pos)) continue;
        if (!seen_verb) {
            t.role = has_subject ? Role::other : Role::subject;
            has_subject = true;
        } else if (!adp_after_verb && !has_object) {
            t.role = Role::object;
            has_object = true;
        } else {
            t.role = Role::other;
        }
    }
}

AnnotatedDoc Annotator::annotate(const Document& doc) const { return annotate(doc.id, doc.text); }

AnnotatedDoc Annotator::annotate(std::string id, std::string_view text) const {
    auto raw = Tokenizer().run(text);

    AnnotatedDoc out;
    out.id = std::move(id);
    if (raw.empty()) {
        Token empty;
        empty.pos = Pos::X;
        out.sentences.push_back(Sentence{{empty}});
        return out;
    }

    // Sentence boundaries: terminal punctuation (plus any closing quotes/brackets)
    // followed by whitespace and a capitalized token, or end of text.
    std::vector<std::size_t> ends;  // exclusive end index per sentence
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i].is_space || !is_terminal(raw[i].surface)) continue;
        std::size_t j = i + 1;
        while (j < raw.size() && !raw[j].is_space && !raw[j].space_before && is_closer(raw[j].surface)) ++j;
        std::size_t k = j;
        while (k < raw.size() && raw[k].is_space) ++k;
        if (k == raw.size()) break;
        const bool gap = k > j || raw[k].space_before;
        if (gap && starts_upper(raw[k].surface)) {
            ends.push_back(k);
            i = k - 1;
        }
    }
    if (ends.empty() || ends.back() != raw.size()) ends.push_back(raw.size());

    std::size_t begin = 0;
    for (const auto end : ends) {
        Sentence sent;
        bool initial = true;
        for (std::size_t i = begin; i < end; ++i) {
            Token t;
            t.surface = raw[i].surface;
            if (raw[i].is_space) {
                t.pos = Pos::SPACE;
            } else if (all_punct(t.surface) && !is_abbreviation(t.surface)) {
                const auto cps = decode(t.surface);
                t.pos = std::all_of(cps.begin(), cps.end(), [](const Cp& c) { return is_symbol_cp(c.cp); })
                            ? Pos::SYM
                            : Pos::PUNCT;
            } else {
                const Token* prev = sent.tokens.empty() ? nullptr : &sent.tokens.back();
                t.pos = tag_word(t.surface, initial, prev);
                initial = false;
            }
            t.head_lemma = to_lower_ascii(t.surface);
            finish_token(t);
            sent.tokens.push_back(std::move(t));
        }
        assign_roles(sent);
        out.sentences.push_back(std::move(sent));
        begin = end;
    }
    return out;
}

AnnotationMap parse_annotations(std::istream& in, const Annotator& annotator) {
    AnnotationMap docs;
    std::string raw;
    std::size_t line = 0;
    std::string cur_doc;
    long cur_sent = -1;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty()) {
            cur_sent = -1;
            continue;
        }
        const auto cols = split(raw, '\t');
        if (cols.size() != 7) throw ParseError("expected 7 tab-separated columns", line);
        long sent_idx = 0;
        try {
            sent_idx = std::stol(cols[1]);
            (void)std::stol(cols[2]);
        } catch (const std::exception&) {
            throw ParseError("non-integer sentence/token index", line);
        }
        const auto pos = parse_pos(cols[4]);
        if (!pos) throw ValidationError("unknown PoS tag '" + cols[4] + "' (line " + std::to_string(line) + ")");
        const auto role = parse_role(cols[5]);
        if (!role) throw ValidationError("unknown role '" + cols[5] + "' (line " + std::to_string(line) + ")");

        auto& doc = docs[cols[0]];
        doc.id = cols[0];
        if (cols[0] != cur_doc || sent_idx != cur_sent || doc.sentences.empty()) {
            doc.sentences.emplace_back();
            cur_doc = cols[0];
            cur_sent = sent_idx;
        }
        Token t;
        t.surface = unescape_field(cols[3], line);
        t.pos = *pos;
        t.role = *role;
        t.head_lemma = unescape_field(cols[6], line);
        annotator.finish_token(t);
        doc.sentences.back().tokens.push_back(std::move(t));
    }
    return docs;
}

AnnotationMap load_annotations(const std::filesystem::path& path, const Annotator& annotator) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open annotation sidecar " + path.string());
    return parse_annotations(in, annotator);
}

void write_annotations(std::ostream& out, const AnnotatedDoc& doc) {
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        const auto& toks = doc.sentences[s].tokens;
        for (std::size_t k = 0; k < toks.size(); ++k) {
            const auto& t = toks[k];
            out << doc.id << '\t' << s << '\t' << k << '\t' << escape_field(t.surface) << '\t' << to_string(t.pos)
                << '\t' << to_string(t.role) << '\t' << escape_field(t.head_lemma) << '\n';
        }
        out << '\n';
    }
}

AnnotatedDoc AnnotationSource::get(const Document& doc) const {
    if (sidecar_) {
        if (auto it = sidecar_->find(doc.id); it != sidecar_->end()) return it->second;
        log::warn("no sidecar annotation for id '" + doc.id + "'; using built-in annotator");
    }
    return annotator_.annotate(doc);
}

}  // namespace mgtdetect
