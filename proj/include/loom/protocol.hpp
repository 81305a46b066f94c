#pragma once

#include "loom/domain.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace loom {

// Structured note attached to a parse: never fatal, always recorded.
struct parse_diagnostic {
    std::string kind;       // e.g. "renumbered", "dropped_citation", "unterminated_block"
    size_t      begin = 0;  // byte span in the source text
    size_t      end   = 0;
    std::string message;
};

enum class prompt_kind {
    lemma_search,
    lemma_summarize,
    lemma_verify,
    final_verify,
    self_improve,
};

constexpr size_t prompt_kind_count = 5;

const char * prompt_kind_name(prompt_kind kind);
prompt_kind  prompt_kind_from_name(const std::string & name);

// Slot names a template requires, e.g. {Thinking} for lemma_summarize.
const std::vector<std::string> & prompt_slots(prompt_kind kind);

class missing_slot_error : public std::runtime_error {
  public:
    explicit missing_slot_error(const std::string & slot)
        : std::runtime_error("prompt slot {" + slot + "} not supplied"), slot(slot) {}
    std::string slot;
};

// The five agent prompts as versioned text assets with {SlotName} placeholders.
class prompt_template_set {
  public:
    static const prompt_template_set & builtin();
    // Reads <dir>/{lemma_search,lemma_summarize,lemma_verify,final_verify,self_improve}.txt
    // plus optional <dir>/VERSION; missing files fall back to the builtin texts.
    static prompt_template_set load_dir(const std::string & dir);

    const std::string & text(prompt_kind kind) const { return texts_[(size_t) kind]; }
    const std::string & version() const { return version_; }

    // Substitutes every {Slot} occurrence for the kind's declared slots.
    // Undeclared keys are rejected; absent declared slots raise missing_slot_error.
    // Braced text that is not a declared slot (e.g. \box{{STEPk}}) passes through.
    std::string render(prompt_kind kind, const std::map<std::string, std::string> & slots) const;

  private:
    std::array<std::string, prompt_kind_count> texts_;
    std::string                                version_ = "v1";
};

// Fills the standard slots from the problem and library (statement, rendered
// lemmas) and the remaining ones from extras.
std::string render_prompt(prompt_kind kind, const problem & p, const lemma_library & lib,
                          const std::map<std::string, std::string> & extras = {},
                          const prompt_template_set & templates = prompt_template_set::builtin());

// One \boxed{...} / \box{...} region, extracted by brace-depth counting.
struct boxed_region {
    size_t      begin = 0;  // first byte of the opening backslash
    size_t      end   = 0;  // one past the closing brace (or text end if unterminated)
    std::string content;
    bool        closed = true;
};

std::vector<boxed_region> find_boxed(const std::string & text);
std::optional<std::string> last_boxed_content(const std::string & text);

// Canonical form for final-answer comparison: trimmed, outer $ / \boxed shells
// and trailing punctuation stripped, whitespace collapsed.
std::string normalized_answer(const std::string & answer);

enum class search_verdict {
    none,
    partial,
    complete,
};

const char * search_verdict_name(search_verdict v);

struct search_output {
    search_verdict                verdict = search_verdict::none;
    std::vector<lemma>            proven;
    std::vector<std::string>      unproven_statements;
    std::string                   answer;  // set when verdict == complete
    std::vector<parse_diagnostic> diagnostics;
};

// Reasoner output: proven lemmas from the first lemma box (split on ---),
// unproven statements from the **withoutproof** box (Lemma -1 sentinel =>
// empty), verdict from the stated summary. Total: bad input degrades to
// {[], [], none} plus diagnostics.
search_output parse_search_output(const std::string & text);

struct summarize_output {
    std::vector<lemma>            lemmas;
    std::vector<parse_diagnostic> diagnostics;
};

// Summarizer output: one lemma per <lemma> block. Numbering is validated
// against lib.next_index (wrong numbers are repaired and flagged), -fixed
// entries must correct a known index, citations resolve against the library
// plus earlier blocks of the same batch; unresolvable ones are dropped with a
// diagnostic.
summarize_output parse_summarizer_output(const std::string & text, const lemma_library & lib);

enum class verdict_kind {
    all_correct,
    step_error,
    lemma_error,
    format_error,
};

const char * verdict_kind_name(verdict_kind kind);

struct verifier_verdict {
    verdict_kind kind = verdict_kind::format_error;
    int          index = 0;       // failing step (>= 0) or lemma (>= 1)
    std::string  description;     // format_error payload
    bool         passed() const { return kind == verdict_kind::all_correct; }
};

// Last \box{STEPk} / \box{LEMMAk} wins; STEP-1 means all correct; otherwise a
// FORMAT_ERROR marker with its trailing description; otherwise
// format_error("missing verdict"). Total on arbitrary bytes.
verifier_verdict parse_verdict(const std::string & text);

} // namespace loom
