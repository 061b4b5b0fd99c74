#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mgtdetect/corpus.hpp"
#include "mgtdetect/resources.hpp"

namespace mgtdetect {

// Coarse universal-style tagset.
enum class Pos { NOUN, PROPN, VERB, ADJ, ADV, PRON, DET, ADP, NUM, CONJ, PART, INTJ, PUNCT, SYM, SPACE, X };

std::string_view to_string(Pos p);
std::optional<Pos> parse_pos(std::string_view s);

enum class Role { subject, object, other, none };

std::string_view to_string(Role r);
std::optional<Role> parse_role(std::string_view s);

struct Token {
    std::string surface;
    Pos pos = Pos::X;
    std::string shape;
    int syllables = 0;
    bool is_stopword = false;
    bool is_latin_abbrev = false;
    Role role = Role::none;
    std::string head_lemma;

    bool operator==(const Token&) const = default;
};

struct Sentence {
    std::vector<Token> tokens;
    bool operator==(const Sentence&) const = default;
};

struct AnnotatedDoc {
    std::string id;
    std::vector<Sentence> sentences;
    bool operator==(const AnnotatedDoc&) const = default;
};

// Spelling signature: a->x, A->X, 0->d, others verbatim; runs capped at 4.
std::string shape_of(std::string_view surface);

// Vowel-group syllable estimate; 0 iff the surface has no letters.
int syllables_of(std::string_view surface);

bool is_latin_abbreviation(std::string_view surface);

// Words that count for readability, diversity and text statistics:
// tokens containing a letter that are not punctuation, symbols or whitespace.
bool is_word(const Token& t);

// Built-in deterministic annotator: rule-based segmentation, tokenization,
// lexicon + suffix PoS tagging and a clause-position role heuristic.
class Annotator {
public:
    explicit Annotator(const Resources& resources = Resources::shared());

    AnnotatedDoc annotate(const Document& doc) const;
    AnnotatedDoc annotate(std::string id, std::string_view text) const;

    // Fills derived fields (shape, syllables, flags) from surface/pos.
    void finish_token(Token& t) const;

    const Resources& resources() const { return res_; }

private:
    Pos tag_word(std::string_view surface, bool sentence_initial, const Token* prev) const;
    void assign_roles(Sentence& s) const;

    const Resources& res_;
};

// Sidecar format: TSV doc_id, sent_idx, tok_idx, surface, pos, role, head_lemma;
// blank line between sentences. Tabs, newlines and backslashes in surfaces are escaped.
using AnnotationMap = std::map<std::string, AnnotatedDoc>;

AnnotationMap load_annotations(const std::filesystem::path& path, const Annotator& annotator);
AnnotationMap parse_annotations(std::istream& in, const Annotator& annotator);
void write_annotations(std::ostream& out, const AnnotatedDoc& doc);

// Sidecar entry when present (warns once per missing id), else built-in annotation.
class AnnotationSource {
public:
    AnnotationSource(const Annotator& annotator, const AnnotationMap* sidecar = nullptr)
        : annotator_(annotator), sidecar_(sidecar) {}

    AnnotatedDoc get(const Document& doc) const;

private:
    const Annotator& annotator_;
    const AnnotationMap* sidecar_;
};

}  // namespace mgtdetect
