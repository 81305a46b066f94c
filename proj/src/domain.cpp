#include "loom/domain.hpp"

#include <algorithm>
#include <cctype>

namespace loom {

const char * problem_kind_name(problem_kind kind) {
    switch (kind) {
        case problem_kind::solution_based: return "solution_based";
        case problem_kind::proof_based:    return "proof_based";
    }
    return "solution_based";
}

problem_kind problem_kind_from_name(const std::string & name) {
    if (name == "solution_based") return problem_kind::solution_based;
    if (name == "proof_based")    return problem_kind::proof_based;
    throw std::invalid_argument("unknown problem kind: " + name);
}

void validate_problem(const problem & p) {
    if (p.statement.empty()) {
        throw std::invalid_argument("problem " + p.id + ": statement must be non-empty");
    }
    if (p.kind == problem_kind::solution_based && !p.reference_answer.has_value()) {
        throw std::invalid_argument("problem " + p.id + ": solution_based requires a reference answer");
    }
    if (p.kind == problem_kind::proof_based && p.reference_answer.has_value() && !p.rubric_ref.has_value()) {
        throw std::invalid_argument("problem " + p.id +
                                    ": proof_based with a reference answer still needs a rubric_ref");
    }
}

std::string normalized_statement(const std::string & text) {
    // collapse whitespace runs and trim
    std::string flat;
    flat.reserve(text.size());
    bool in_space = true;  // leading spaces dropped
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            in_space = true;
            continue;
        }
        if (in_space && !flat.empty()) {
            flat += ' ';
        }
        in_space = false;
        flat += (char) c;
    }
    // drop spaces that only separate '$' from its content: "$ x $" -> "$x$"
    std::string out;
    out.reserve(flat.size());
    for (size_t i = 0; i < flat.size(); ++i) {
        if (flat[i] == ' ') {
            const bool after_dollar  = !out.empty() && out.back() == '$';
            const bool before_dollar = i + 1 < flat.size() && flat[i + 1] == '$';
            if (after_dollar || before_dollar) {
                continue;
            }
        }
        out += flat[i];
    }
    return out;
}

uint64_t statement_hash(const std::string & statement) {
    const std::string norm = normalized_statement(statement);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : norm) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

static bool is_word_char(unsigned char c) {
    return std::isalnum(c) != 0;
}

std::set<int> scan_citations(const std::string & text) {
    std::set<int> found;
    const std::string needle = "lemma";
    for (size_t i = 0; i + needle.size() <= text.size(); ++i) {
        bool match = true;
        for (size_t j = 0; j < needle.size(); ++j) {
            if (std::tolower((unsigned char) text[i + j]) != needle[j]) {
                match = false;
                break;
            }
        }
        if (!match) {
            continue;
        }
        if (i > 0 && is_word_char((unsigned char) text[i - 1])) {
            continue;  // inside a longer word, e.g. "dilemma"
        }
        size_t p = i + needle.size();
        while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) {
            ++p;
        }
        if (p >= text.size() || !std::isdigit((unsigned char) text[p])) {
            continue;  // "Lemma -1" sentinel or prose like "lemma below"
        }
        int value = 0;
        size_t q = p;
        while (q < text.size() && std::isdigit((unsigned char) text[q]) && value < 1000000) {
            value = value * 10 + (text[q] - '0');
            ++q;
        }
        if (q < text.size() && is_word_char((unsigned char) text[q]) &&
            text.compare(q, 6, "-fixed") != 0) {
            // digits glued to a word: not a citation
            i = q;
            continue;
        }
        if (value >= 1) {
            found.insert(value);
        }
        i = q - 1;
    }
    return found;
}

std::set<int> scan_citations(const std::vector<std::string> & steps) {
    std::set<int> found;
    for (const auto & s : steps) {
        auto part = scan_citations(s);
        found.insert(part.begin(), part.end());
    }
    return found;
}

bool lemma_admitted(const lemma & l, const ratio & threshold) {
    return l.confidence.has_value() && *l.confidence > threshold;
}

static std::string lemma_label(const lemma & l) {
    std::string label = std::to_string(l.index);
    if (l.fixed_suffix) {
        label += "-fixed";
    }
    return label;
}

std::string render_lemma_block(const lemma & l) {
    const std::string label = lemma_label(l);
    std::string out = "<lemma>\n";
    out += "**Lemma " + label + " (Lemma " + label + "):** " + l.statement + "\n";
    out += "**Proof " + label + ":**\n";
    for (size_t i = 0; i < l.proof_steps.size(); ++i) {
        out += "* **Step " + std::to_string(i + 1) + ":** " + l.proof_steps[i] + "\n";
    }
    out += "</lemma>";
    return out;
}

bool lemma_library::contains(int raw_index) const {
    return find(raw_index) != nullptr;
}

const lemma * lemma_library::find(int raw_index) const {
    const lemma * hit = nullptr;
    for (const auto & e : entries_) {
        if (e.index == raw_index) {
            hit = &e;  // keep scanning: a later -fixed entry supersedes
        }
    }
    return hit;
}

void lemma_library::insert(lemma l) {
    if (l.index < 1) {
        throw library_error(library_error_kind::index_clash,
                            "lemma index must be positive, got " + std::to_string(l.index));
    }
    if (l.fixed_suffix) {
        if (!contains(l.index)) {
            throw library_error(library_error_kind::index_clash,
                                "fixed lemma " + std::to_string(l.index) + " has no original to correct");
        }
        for (const auto & e : entries_) {
            if (e.index == l.index && e.fixed_suffix) {
                throw library_error(library_error_kind::index_clash,
                                    "lemma " + std::to_string(l.index) + "-fixed already present");
            }
        }
    } else {
        if (l.index < next_index_) {
            throw library_error(library_error_kind::index_clash,
                                "lemma index " + std::to_string(l.index) + " already taken (next is " +
                                    std::to_string(next_index_) + ")");
        }
    }
    for (int cited : l.cited_indices) {
        if (cited == l.index && !l.fixed_suffix) {
            throw library_error(library_error_kind::dangling_citation,
                                "lemma " + std::to_string(l.index) + " cites itself");
        }
        if (!contains(cited)) {
            throw library_error(library_error_kind::dangling_citation,
                                "lemma " + lemma_label(l) + " cites unknown Lemma " + std::to_string(cited));
        }
    }
    if (!l.fixed_suffix) {
        next_index_ = l.index + 1;
    }
    entries_.push_back(std::move(l));
}

std::string lemma_library::render() const {
    std::string out;
    for (const auto & e : entries_) {
        out += render_lemma_block(e);
        out += "\n";
    }
    return out;
}

const char * meta_action_name(meta_action a) {
    switch (a) {
        case meta_action::extract_lemmas:      return "extract_lemmas";
        case meta_action::invoke_verification: return "invoke_verification";
        case meta_action::commit_answer:       return "commit_answer";
    }
    return "extract_lemmas";
}

meta_action meta_action_from_name(const std::string & name) {
    if (name == "extract_lemmas")      return meta_action::extract_lemmas;
    if (name == "invoke_verification") return meta_action::invoke_verification;
    if (name == "commit_answer")       return meta_action::commit_answer;
    throw std::invalid_argument("unknown meta action: " + name);
}

void validate_round(const reasoning_round & r) {
    if (r.t < 1) {
        throw std::invalid_argument("round index must be >= 1");
    }
    if (r.progress_flag != !r.new_lemmas.empty()) {
        throw std::invalid_argument("round " + std::to_string(r.t) +
                                    ": progress flag must track whether any lemma was produced");
    }
}

void validate_trajectory(const trajectory & t) {
    if (t.pv_passes < 0 || t.pv_trials < 0 || t.pv_passes > t.pv_trials) {
        throw std::invalid_argument("trajectory " + t.rollout_id + ": pv_passes must sit in [0, pv_trials]");
    }
    int expected = 1;
    for (const auto & r : t.rounds) {
        if (r.t != expected) {
            throw std::invalid_argument("trajectory " + t.rollout_id + ": rounds must be numbered 1..T");
        }
        validate_round(r);
        ++expected;
    }
}

void validate_budget(const budget_config & b) {
    if (b.max_rounds < 1 || b.verifier_samples < 1 || b.max_refinement_rounds < 0 ||
        b.max_output_tokens < 1 || b.parallel_rollouts < 1) {
        throw std::invalid_argument("budget limits must be positive");
    }
    if (b.gamma < 0.0 || b.gamma > 1.0) {
        throw std::invalid_argument("gamma must lie in [0, 1]");
    }
    if (b.lemma_confidence_threshold.den <= 0) {
        throw std::invalid_argument("confidence threshold denominator must be positive");
    }
}

} // namespace loom
