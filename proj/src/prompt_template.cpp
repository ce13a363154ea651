#include "newsrag/prompt_template.hpp"

#include <cctype>

#include "newsrag/error.hpp"

namespace newsrag {
namespace {

bool is_blank(std::string_view s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::string sanitize_prompt_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    out.push_back(text[i]);
    if (text[i] == '<' && i + 1 < text.size() && text[i + 1] == '|') {
      out.push_back(' ');
    }
  }
  return out;
}

std::string render_with_context(std::string_view question,
                                const std::vector<std::string>& contexts) {
  if (is_blank(question)) {
    throw Error(ErrorCode::EmptyQuestion, "question must be non-empty");
  }
  if (contexts.size() > kMaxContexts) {
    throw Error(ErrorCode::TooManyContexts, std::to_string(contexts.size()) +
                                                " contexts exceed the top-" +
                                                std::to_string(kMaxContexts) + " cap");
  }

  std::string out;
  out.append(kUserToken);
  out.push_back('\n');
  out.append(kSystemInstruction);
  out.append(" \n");
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    out.append("Context [");
    out.append(std::to_string(i + 1));
    out.append("]: ");
    out.append(sanitize_prompt_text(contexts[i]));
    out.push_back('\n');
  }
  out.append("Input: ");
  out.append(sanitize_prompt_text(question));
  out.push_back('\n');
  out.append(kEndToken);
  out.push_back('\n');
  out.append(kAssistantToken);
  out.push_back('\n');
  return out;
}

std::string render_plain(std::string_view question) {
  return render_with_context(question, {});
}

}  // namespace newsrag
