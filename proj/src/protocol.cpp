#include "loom/protocol.hpp"

#include "prompts.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace loom {

// ---------------------------------------------------------------- text utils

static std::string trim(const std::string & s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace((unsigned char) s[b])) ++b;
    while (e > b && std::isspace((unsigned char) s[e - 1])) --e;
    return s.substr(b, e - b);
}

static bool ci_equal_at(const std::string & hay, size_t pos, const char * needle_lower) {
    for (size_t j = 0; needle_lower[j]; ++j) {
        if (pos + j >= hay.size() ||
            std::tolower((unsigned char) hay[pos + j]) != (unsigned char) needle_lower[j]) {
            return false;
        }
    }
    return true;
}

static size_t ci_find(const std::string & hay, const char * needle_lower, size_t from = 0) {
    const size_t n = std::char_traits<char>::length(needle_lower);
    if (n == 0 || hay.size() < n) {
        return std::string::npos;
    }
    for (size_t i = from; i + n <= hay.size(); ++i) {
        if (ci_equal_at(hay, i, needle_lower)) {
            return i;
        }
    }
    return std::string::npos;
}

static bool ci_contains(const std::string & hay, const char * needle_lower) {
    return ci_find(hay, needle_lower) != std::string::npos;
}

// [begin, end) spans of each line, newline excluded
static std::vector<std::pair<size_t, size_t>> line_spans(const std::string & text) {
    std::vector<std::pair<size_t, size_t>> spans;
    size_t b = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            spans.emplace_back(b, i);
            b = i + 1;
        }
    }
    return spans;
}

// a `---` separator (three or more dashes, nothing else)
static bool line_is_rule(const std::string & line) {
    const std::string t = trim(line);
    if (t.size() < 3) {
        return false;
    }
    for (char c : t) {
        if (c != '-') {
            return false;
        }
    }
    return true;
}

// ----------------------------------------------------------- prompt plumbing

const char * prompt_kind_name(prompt_kind kind) {
    switch (kind) {
        case prompt_kind::lemma_search:    return "lemma_search";
        case prompt_kind::lemma_summarize: return "lemma_summarize";
        case prompt_kind::lemma_verify:    return "lemma_verify";
        case prompt_kind::final_verify:    return "final_verify";
        case prompt_kind::self_improve:    return "self_improve";
    }
    return "lemma_search";
}

prompt_kind prompt_kind_from_name(const std::string & name) {
    for (size_t i = 0; i < prompt_kind_count; ++i) {
        if (name == prompt_kind_name((prompt_kind) i)) {
            return (prompt_kind) i;
        }
    }
    throw std::invalid_argument("unknown prompt kind: " + name);
}

const std::vector<std::string> & prompt_slots(prompt_kind kind) {
    static const std::vector<std::string> slots[prompt_kind_count] = {
        { "Problem", "ProvidedLemmas" },
        { "Problem", "ProvidedLemmas", "Thinking" },
        { "Question", "ProvidedLemmas", "NewLemmatoVerify" },
        { "question", "reference", "response" },
        { "Question", "SolutiontoVerify", "PreviousCheckingEfforts" },
    };
    return slots[(size_t) kind];
}

const prompt_template_set & prompt_template_set::builtin() {
    static const prompt_template_set set = [] {
        prompt_template_set s;
        s.texts_[(size_t) prompt_kind::lemma_search]    = prompts::lemma_search;
        s.texts_[(size_t) prompt_kind::lemma_summarize] = prompts::lemma_summarize;
        s.texts_[(size_t) prompt_kind::lemma_verify]    = prompts::lemma_verify;
        s.texts_[(size_t) prompt_kind::final_verify]    = prompts::final_verify;
        s.texts_[(size_t) prompt_kind::self_improve]    = prompts::self_improve;
        s.version_ = prompts::version;
        return s;
    }();
    return set;
}

prompt_template_set prompt_template_set::load_dir(const std::string & dir) {
    prompt_template_set s = builtin();
    s.version_ = "custom:" + dir;
    for (size_t i = 0; i < prompt_kind_count; ++i) {
        const std::filesystem::path path =
            std::filesystem::path(dir) / (std::string(prompt_kind_name((prompt_kind) i)) + ".txt");
        std::ifstream in(path);
        if (in) {
            std::ostringstream buf;
            buf << in.rdbuf();
            s.texts_[i] = buf.str();
        }
    }
    std::ifstream ver(std::filesystem::path(dir) / "VERSION");
    if (ver) {
        std::string v;
        std::getline(ver, v);
        if (!trim(v).empty()) {
            s.version_ = trim(v);
        }
    }
    return s;
}

std::string prompt_template_set::render(prompt_kind kind,
                                        const std::map<std::string, std::string> & slots) const {
    const auto & declared = prompt_slots(kind);
    for (const auto & [key, _] : slots) {
        if (std::find(declared.begin(), declared.end(), key) == declared.end()) {
            throw std::invalid_argument(std::string("prompt ") + prompt_kind_name(kind) +
                                        " has no slot {" + key + "}");
        }
    }
    for (const auto & name : declared) {
        if (!slots.count(name)) {
            throw missing_slot_error(name);
        }
    }
    const std::string & tpl = texts_[(size_t) kind];
    std::string out;
    out.reserve(tpl.size() + 256);
    for (size_t i = 0; i < tpl.size();) {
        if (tpl[i] == '{') {
            const size_t close = tpl.find('}', i + 1);
            if (close != std::string::npos) {
                const std::string inner = tpl.substr(i + 1, close - i - 1);
                auto it = slots.find(inner);
                if (it != slots.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tpl[i];
        ++i;
    }
    return out;
}

std::string render_prompt(prompt_kind kind, const problem & p, const lemma_library & lib,
                          const std::map<std::string, std::string> & extras,
                          const prompt_template_set & templates) {
    std::map<std::string, std::string> slots;
    switch (kind) {
        case prompt_kind::lemma_search:
        case prompt_kind::lemma_summarize:
            slots["Problem"] = p.statement;
            slots["ProvidedLemmas"] = lib.render();
            break;
        case prompt_kind::lemma_verify:
            slots["Question"] = p.statement;
            slots["ProvidedLemmas"] = lib.render();
            break;
        case prompt_kind::final_verify:
            slots["question"] = p.statement;
            slots["reference"] = p.reference_answer.value_or("(not provided)");
            break;
        case prompt_kind::self_improve:
            slots["Question"] = p.statement;
            break;
    }
    for (const auto & [key, value] : extras) {
        slots[key] = value;
    }
    return templates.render(kind, slots);
}

// ----------------------------------------------------------- boxed extraction

std::vector<boxed_region> find_boxed(const std::string & text) {
    std::vector<boxed_region> regions;
    for (size_t i = 0; i + 3 < text.size(); ++i) {
        if (text[i] != '\\') {
            continue;
        }
        size_t j = i + 1;
        while (j < text.size() && text[j] == '\\') {
            ++j;  // tolerate doubled escaping
        }
        if (!ci_equal_at(text, j, "box")) {
            continue;
        }
        j += 3;
        if (ci_equal_at(text, j, "ed")) {
            j += 2;
        }
        if (j >= text.size() || text[j] != '{') {
            continue;
        }
        boxed_region region;
        region.begin = i;
        size_t depth = 1;
        size_t k = j + 1;
        for (; k < text.size(); ++k) {
            if (text[k] == '{') {
                ++depth;
            } else if (text[k] == '}') {
                if (--depth == 0) {
                    break;
                }
            }
        }
        if (depth == 0) {
            region.end = k + 1;
            region.content = text.substr(j + 1, k - j - 1);
            region.closed = true;
        } else {
            region.end = text.size();
            region.content = text.substr(j + 1);
            region.closed = false;
        }
        regions.push_back(std::move(region));
        if (!regions.back().closed) {
            break;
        }
        i = regions.back().end - 1;  // nested \boxed inside content is treated as content
    }
    return regions;
}

std::optional<std::string> last_boxed_content(const std::string & text) {
    auto regions = find_boxed(text);
    if (regions.empty()) {
        return std::nullopt;
    }
    return regions.back().content;
}

std::string normalized_answer(const std::string & answer) {
    std::string s = trim(answer);
    // unwrap a single outer brace pair left over from doubled-brace boxes
    while (s.size() >= 2 && s.front() == '{' && s.back() == '}') {
        s = trim(s.substr(1, s.size() - 2));
    }
    std::string flat;
    for (char c : s) {
        if (c == '$' || std::isspace((unsigned char) c)) {
            continue;
        }
        flat += (char) std::tolower((unsigned char) c);
    }
    while (!flat.empty() && (flat.back() == '.' || flat.back() == ',')) {
        flat.pop_back();
    }
    const size_t eq = flat.rfind('=');
    if (eq != std::string::npos && eq + 1 < flat.size()) {
        flat = flat.substr(eq + 1);
    }
    return flat;
}

// -------------------------------------------------------------- lemma chunks

struct header_parse {
    int         index = 0;
    bool        fixed = false;
    std::string statement;  // text remaining on the header line
};

// "**Lemma 11 (Lemma 11):** statement" / "**lemma 2-fixed:** ..." / "**Lemma -1**"
static std::optional<header_parse> parse_lemma_header(const std::string & line, const char * keyword) {
    size_t i = 0;
    while (i < line.size() && (line[i] == '*' || line[i] == ' ' || line[i] == '\t')) {
        ++i;
    }
    if (!ci_equal_at(line, i, keyword)) {
        return std::nullopt;
    }
    i += std::char_traits<char>::length(keyword);
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
        ++i;
    }
    bool negative = false;
    if (i < line.size() && line[i] == '-') {
        negative = true;
        ++i;
    }
    if (i >= line.size() || !std::isdigit((unsigned char) line[i])) {
        return std::nullopt;
    }
    long value = 0;
    while (i < line.size() && std::isdigit((unsigned char) line[i]) && value < 1000000) {
        value = value * 10 + (line[i] - '0');
        ++i;
    }
    header_parse h;
    h.index = negative ? -(int) value : (int) value;
    if (ci_equal_at(line, i, "-fixed")) {
        h.fixed = true;
        i += 6;
    }
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
        ++i;
    }
    // optional "(Lemma X)" echo; anything else parenthesized is statement text
    if (i < line.size() && line[i] == '(') {
        const size_t close = line.find(')', i);
        if (close != std::string::npos && ci_find(line.substr(i, close - i), keyword) != std::string::npos) {
            i = close + 1;
        }
    }
    while (i < line.size() && (line[i] == ':' || line[i] == '*' || line[i] == ' ' || line[i] == '\t')) {
        ++i;
    }
    h.statement = trim(line.substr(i));
    return h;
}

// "* **Step 2:** text" -> "text"; bare "* text" -> "text"
static std::string parse_step_line(const std::string & line) {
    size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
        ++i;
    }
    while (i < line.size() && (line[i] == '*' || line[i] == '-' || line[i] == ' ')) {
        ++i;
    }
    if (ci_equal_at(line, i, "step")) {
        size_t j = i + 4;
        while (j < line.size() && (line[j] == ' ' || line[j] == '\t')) {
            ++j;
        }
        bool saw_digit = false;
        while (j < line.size() && std::isdigit((unsigned char) line[j])) {
            saw_digit = true;
            ++j;
        }
        if (saw_digit) {
            while (j < line.size() &&
                   (line[j] == ':' || line[j] == '*' || line[j] == ' ' || line[j] == '\t')) {
                ++j;
            }
            i = j;
        }
    }
    return trim(line.substr(i));
}

static bool looks_like_bullet(const std::string & line) {
    const std::string t = trim(line);
    return !t.empty() && t[0] == '*' && !ci_equal_at(t, 0, "**proof") && !ci_equal_at(t, 0, "**lemma");
}

// One lemma (header + proof steps) out of a text chunk.
static std::optional<lemma> parse_lemma_chunk(const std::string & chunk, size_t base,
                                              std::vector<parse_diagnostic> & diagnostics) {
    const auto spans = line_spans(chunk);
    std::optional<header_parse> header;
    size_t line_no = 0;
    for (; line_no < spans.size(); ++line_no) {
        const std::string line = chunk.substr(spans[line_no].first,
                                              spans[line_no].second - spans[line_no].first);
        if (trim(line).empty()) {
            continue;
        }
        header = parse_lemma_header(line, "lemma");
        if (header) {
            break;
        }
    }
    if (!header) {
        if (!trim(chunk).empty()) {
            diagnostics.push_back({ "bad_block", base, base + chunk.size(),
                                    "no lemma header found" });
        }
        return std::nullopt;
    }
    lemma l;
    l.index = header->index;
    l.fixed_suffix = header->fixed;
    std::string statement = header->statement;
    bool in_proof = false;
    for (size_t i = line_no + 1; i < spans.size(); ++i) {
        const std::string line = chunk.substr(spans[i].first, spans[i].second - spans[i].first);
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        if (!in_proof) {
            if (parse_lemma_header(line, "proof")) {
                in_proof = true;
                continue;
            }
            if (looks_like_bullet(line)) {
                // steps without an explicit proof header
                in_proof = true;
            } else {
                statement += statement.empty() ? t : "\n" + t;
                continue;
            }
        }
        if (looks_like_bullet(line)) {
            l.proof_steps.push_back(parse_step_line(line));
        } else if (!l.proof_steps.empty()) {
            l.proof_steps.back() += "\n" + t;
        } else {
            l.proof_steps.push_back(t);
        }
    }
    l.statement = trim(statement);
    l.proven = !l.proof_steps.empty();
    l.cited_indices = scan_citations(l.proof_steps);
    if (!l.fixed_suffix) {
        l.cited_indices.erase(l.index);
    }
    return l;
}

// --------------------------------------------------------- search output

const char * search_verdict_name(search_verdict v) {
    switch (v) {
        case search_verdict::none:     return "none";
        case search_verdict::partial:  return "partial";
        case search_verdict::complete: return "complete";
    }
    return "none";
}

search_output parse_search_output(const std::string & text) {
    search_output out;
    const auto boxes = find_boxed(text);

    int proven_box = -1;
    int unproven_box = -1;
    for (size_t b = 0; b < boxes.size(); ++b) {
        if (unproven_box < 0 && ci_contains(boxes[b].content, "withoutproof")) {
            unproven_box = (int) b;
            continue;
        }
        if (proven_box < 0 && ci_contains(boxes[b].content, "lemma")) {
            proven_box = (int) b;
        }
    }

    if (proven_box >= 0) {
        const boxed_region & box = boxes[proven_box];
        if (!box.closed) {
            out.diagnostics.push_back({ "unterminated_box", box.begin, box.end,
                                        "lemma box has no closing brace" });
        }
        const auto spans = line_spans(box.content);
        size_t chunk_begin = 0;
        std::vector<std::pair<size_t, size_t>> chunks;
        for (const auto & [b, e] : spans) {
            const std::string line = box.content.substr(b, e - b);
            if (line_is_rule(line)) {
                chunks.emplace_back(chunk_begin, b);
                chunk_begin = e + 1 <= box.content.size() ? e + 1 : box.content.size();
            }
        }
        chunks.emplace_back(chunk_begin, box.content.size());
        for (const auto & [b, e] : chunks) {
            if (b >= e) {
                continue;
            }
            auto l = parse_lemma_chunk(box.content.substr(b, e - b), box.begin + b, out.diagnostics);
            if (!l) {
                continue;
            }
            if (l->index == -1) {
                continue;  // sentinel has no place among proven lemmas
            }
            if (l->index < 1) {
                out.diagnostics.push_back({ "bad_index", box.begin + b, box.begin + e,
                                            "proven lemma with non-positive index " +
                                                std::to_string(l->index) });
                continue;
            }
            out.proven.push_back(std::move(*l));
        }
    }

    bool sentinel_seen = false;
    if (unproven_box >= 0) {
        const boxed_region & box = boxes[unproven_box];
        const auto spans = line_spans(box.content);
        for (const auto & [b, e] : spans) {
            const std::string line = box.content.substr(b, e - b);
            auto h = parse_lemma_header(line, "lemma");
            if (!h) {
                // continuation of the previous statement
                if (!out.unproven_statements.empty() && !trim(line).empty()) {
                    out.unproven_statements.back() += "\n" + trim(line);
                }
                continue;
            }
            if (h->index == -1) {
                sentinel_seen = true;
                continue;
            }
            out.unproven_statements.push_back(h->statement);
        }
        if (sentinel_seen && !out.unproven_statements.empty()) {
            out.diagnostics.push_back({ "mixed_sentinel", box.begin, box.end,
                                        "Lemma -1 sentinel alongside unproven statements" });
        }
        if (sentinel_seen && out.unproven_statements.empty()) {
            // explicit "no new unproven lemmas"
        }
    }

    if (ci_contains(text, "i have found a complete solution")) {
        out.verdict = search_verdict::complete;
    } else if (ci_contains(text, "i have not found a complete solution") || !out.proven.empty() ||
               !out.unproven_statements.empty() || sentinel_seen) {
        out.verdict = search_verdict::partial;
    }

    if (out.verdict == search_verdict::complete) {
        // answer: the last box that is not a lemma container, else "The answer is ..."
        for (int b = (int) boxes.size() - 1; b >= 0; --b) {
            if (b != proven_box && b != unproven_box) {
                out.answer = trim(boxes[b].content);
                break;
            }
        }
        if (out.answer.empty()) {
            const size_t pos = ci_find(text, "the answer is");
            if (pos != std::string::npos) {
                size_t e = text.find('\n', pos);
                if (e == std::string::npos) {
                    e = text.size();
                }
                std::string tail = trim(text.substr(pos + 13, e - pos - 13));
                while (!tail.empty() && (tail.back() == '.' || tail.back() == ',')) {
                    tail.pop_back();
                }
                out.answer = tail;
            }
        }
    }
    return out;
}

// ------------------------------------------------------- summarizer output

summarize_output parse_summarizer_output(const std::string & text, const lemma_library & lib) {
    summarize_output out;
    int batch_next = lib.next_index();
    std::set<int> batch_raw;  // non-fixed indices emitted earlier in this batch

    size_t pos = 0;
    while (true) {
        const size_t open = ci_find(text, "<lemma>", pos);
        if (open == std::string::npos) {
            break;
        }
        const size_t body = open + 7;
        size_t close = ci_find(text, "</lemma>", body);
        const size_t next_open = ci_find(text, "<lemma>", body);
        size_t body_end;
        if (close == std::string::npos || (next_open != std::string::npos && next_open < close)) {
            body_end = next_open != std::string::npos ? next_open : text.size();
            out.diagnostics.push_back({ "unterminated_block", open, body_end,
                                        "<lemma> block without closing tag" });
            pos = body_end;
        } else {
            body_end = close;
            pos = close + 8;
        }

        auto l = parse_lemma_chunk(text.substr(body, body_end - body), body, out.diagnostics);
        if (!l) {
            continue;
        }
        if (l->index == -1) {
            out.diagnostics.push_back({ "sentinel_in_summary", open, body_end,
                                        "Lemma -1 sentinel inside a summary block" });
            continue;
        }
        if (l->fixed_suffix) {
            if (!lib.contains(l->index) && !batch_raw.count(l->index)) {
                out.diagnostics.push_back({ "fixed_without_original", open, body_end,
                                            "Lemma " + std::to_string(l->index) +
                                                "-fixed corrects an unknown lemma" });
                continue;
            }
        } else {
            if (l->index != batch_next) {
                out.diagnostics.push_back({ "renumbered", open, body_end,
                                            "block numbered " + std::to_string(l->index) +
                                                ", expected " + std::to_string(batch_next) });
                l->index = batch_next;
            }
            batch_next = l->index + 1;
            batch_raw.insert(l->index);
        }

        std::set<int> resolved;
        for (int c : l->cited_indices) {
            const bool self = !l->fixed_suffix && c == l->index;
            if (!self && (lib.contains(c) || (batch_raw.count(c) && c != l->index))) {
                resolved.insert(c);
            } else if (l->fixed_suffix && c == l->index && lib.contains(c)) {
                resolved.insert(c);  // a correction may cite its original
            } else {
                out.diagnostics.push_back({ "dropped_citation", open, body_end,
                                            "Lemma " + std::to_string(l->index) + " cites unknown Lemma " +
                                                std::to_string(c) });
            }
        }
        l->cited_indices = std::move(resolved);
        out.lemmas.push_back(std::move(*l));
    }
    return out;
}

// ------------------------------------------------------------- verdict parse

const char * verdict_kind_name(verdict_kind kind) {
    switch (kind) {
        case verdict_kind::all_correct:  return "all_correct";
        case verdict_kind::step_error:   return "step_error";
        case verdict_kind::lemma_error:  return "lemma_error";
        case verdict_kind::format_error: return "format_error";
    }
    return "format_error";
}

verifier_verdict parse_verdict(const std::string & text) {
    std::optional<verifier_verdict> last_box;
    for (size_t i = 1; i + 3 < text.size(); ++i) {
        if (text[i - 1] != '\\' || !ci_equal_at(text, i, "box")) {
            continue;
        }
        size_t j = i + 3;
        if (ci_equal_at(text, j, "ed")) {
            j += 2;
        }
        size_t braces = 0;
        while (j < text.size() && text[j] == '{') {
            ++braces;
            ++j;
        }
        if (braces == 0) {
            continue;
        }
        while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) {
            ++j;
        }
        bool is_step = false;
        if (ci_equal_at(text, j, "step")) {
            is_step = true;
            j += 4;
        } else if (ci_equal_at(text, j, "lemma")) {
            j += 5;
        } else {
            continue;
        }
        while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) {
            ++j;
        }
        bool negative = false;
        if (j < text.size() && text[j] == '-') {
            negative = true;
            ++j;
        }
        if (j >= text.size() || !std::isdigit((unsigned char) text[j])) {
            continue;
        }
        long value = 0;
        while (j < text.size() && std::isdigit((unsigned char) text[j]) && value < 1000000) {
            value = value * 10 + (text[j] - '0');
            ++j;
        }
        while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) {
            ++j;
        }
        if (j >= text.size() || text[j] != '}') {
            continue;
        }
        const int k = negative ? -(int) value : (int) value;
        verifier_verdict v;
        if (k == -1) {
            v.kind = verdict_kind::all_correct;
            v.index = -1;
        } else if (is_step && k >= 0) {
            v.kind = verdict_kind::step_error;
            v.index = k;
        } else if (!is_step && k >= 1) {
            v.kind = verdict_kind::lemma_error;
            v.index = k;
        } else {
            continue;  // e.g. LEMMA0 or STEP-7: not a valid verdict token
        }
        last_box = v;
    }
    if (last_box) {
        return *last_box;
    }

    const size_t fe = text.find("FORMAT_ERROR");
    if (fe != std::string::npos) {
        size_t b = fe + 12;
        while (b < text.size() && (text[b] == ':' || text[b] == ' ' || text[b] == '\t')) {
            ++b;
        }
        size_t e = text.find('\n', b);
        if (e == std::string::npos) {
            e = text.size();
        }
        std::string desc = trim(text.substr(b, e - b));
        if (desc.empty()) {
            desc = "unspecified format error";
        }
        return { verdict_kind::format_error, 0, desc };
    }
    return { verdict_kind::format_error, 0, "missing verdict" };
}

} // namespace loom
