#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace newsrag {

// Control tokens and instruction line, frozen to the fine-tuned model's chat
// layout. Any whitespace drift here silently changes model behavior, so the
// rendered output is pinned byte-for-byte by a golden-file test.
inline constexpr std::string_view kUserToken = "<|user|>";
inline constexpr std::string_view kEndToken = "<|end|>";
inline constexpr std::string_view kAssistantToken = "<|assistant|>";
inline constexpr std::string_view kSystemInstruction =
    "Act as a news reporter and answer the question:";

// Training-time system prompt, shipped for dataset tooling only; inference
// rendering never includes it.
inline constexpr std::string_view kFinetuneSystemPrompt = "You should act like a news reporter";

inline constexpr std::string_view kTemplateVersion = "news-reporter/v1";

inline constexpr std::size_t kMaxContexts = 4;

// Neutralizes control-token sequences inside user-supplied text ("<|" becomes
// "< |") so a rendered prompt always contains exactly one of each token.
std::string sanitize_prompt_text(std::string_view text);

// "<|user|>\n{instruction} \nInput: {question}\n<|end|>\n<|assistant|>\n"
std::string render_plain(std::string_view question);

// Same layout with "Context [i]: {text}" lines, in retrieval rank order,
// between the instruction and the Input line. An empty context list renders
// exactly like render_plain. At most kMaxContexts contexts.
std::string render_with_context(std::string_view question,
                                const std::vector<std::string>& contexts);

}  // namespace newsrag
