#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tokkit::chatml {

enum class Role { System, User, Assistant };

std::string_view role_name(Role role);
Role role_from_name(std::string_view name);  // throws ConfigError

struct ChatMessage {
  Role role = Role::User;
  std::string content;
  /// Assistant turns only; empty-or-absent renders the blank think block.
  std::optional<std::string> reasoning;

  bool operator==(const ChatMessage&) const = default;
};

struct ToolSpec {
  std::string name;
  std::string description;
  /// Raw JSON text, emitted verbatim into the <tools> block (never re-encoded).
  std::string parameters;

  bool operator==(const ToolSpec&) const = default;
};

struct ToolCall {
  std::string function_name;
  std::vector<std::pair<std::string, std::string>> args;  // wire order

  bool operator==(const ToolCall&) const = default;
};

enum class RenderMode { NonReasoning, Reasoning };

/// Renders a conversation onto the wire. Every turn is
/// `<|im_start|>{role}\n...<|im_end|>\n`; assistant bodies carry a think
/// block (`<think>\n{reasoning}\n</think>\n\n` — blank in non-reasoning
/// mode) before the response. Tool-bearing conversations get a system turn
/// whose content ends with the `# Tools` declaration block, one JSON object
/// per line inside <tools></tools>, and the arg_key/arg_value calling
/// convention.
///
/// Throws ContentViolationError for content that cannot live on this wire
/// (turn separators anywhere, `</think>` inside reasoning), ModeConflictError
/// for reasoning text in non-reasoning mode, InvalidArgumentError for
/// structural misuse (empty conversation, system turn not first, no
/// assistant turn without a generation prompt).
std::string render(const std::vector<ChatMessage>& messages,
                   const std::vector<ToolSpec>& tools, RenderMode mode,
                   bool add_generation_prompt = false);

struct ParsedConversation {
  std::vector<ChatMessage> messages;
  std::vector<ToolSpec> tools;
  RenderMode mode = RenderMode::NonReasoning;
  bool generation_prompt = false;
};

/// Inverse of render: parse(render(C)) == C for conversations whose reasoning
/// turns carry nonempty reasoning (an all-blank think conversation parses as
/// non-reasoning, which renders to the same bytes).
ParsedConversation parse_conversation(std::string_view wire);

/// Splits an assistant body into (reasoning, response). Text with no think
/// block comes back as ("", text); a think block anywhere but the very start
/// is malformed.
std::pair<std::string, std::string> split_reasoning(std::string_view assistant_text);

/// Extracts every well-formed <tool_call> block: function name on the opening
/// line, then alternating arg_key/arg_value lines. Text outside blocks is
/// ignored. Throws MalformedError (with the byte offset) for unclosed blocks
/// or keys without values.
std::vector<ToolCall> parse_tool_calls(std::string_view assistant_text);

/// The canonical block for one call (no trailing newline).
std::string render_tool_call(const ToolCall& call);

/// Blocks for several calls, newline-separated.
std::string render_tool_calls(const std::vector<ToolCall>& calls);

// Conversation/tool storage as JSON (arrays of objects).
std::string messages_to_json(const std::vector<ChatMessage>& messages);
std::vector<ChatMessage> messages_from_json(std::string_view text);
std::vector<ToolSpec> tools_from_json(std::string_view text);

}  // namespace tokkit::chatml
