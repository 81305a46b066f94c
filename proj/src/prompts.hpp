#pragma once

// Builtin prompt template texts (see prompts.cpp). Internal to the library;
// consumers go through prompt_template_set.

namespace loom::prompts {

extern const char * const version;
extern const char * const lemma_search;
extern const char * const lemma_summarize;
extern const char * const lemma_verify;
extern const char * const final_verify;
extern const char * const self_improve;
extern const char * const judge_rubric;  // grading judge (evalkit), not one of the five agent prompts

} // namespace loom::prompts
