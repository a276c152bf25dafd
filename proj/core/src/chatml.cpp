#include "tokkit/chatml.hpp"

#include <nlohmann/json.hpp>

#include "tokkit/errors.hpp"

namespace tokkit::chatml {

namespace {

using json = nlohmann::json;

constexpr std::string_view kTurnStart = "<|im_start|>";
constexpr std::string_view kTurnEnd = "<|im_end|>";
constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kToolCallOpen = "<tool_call>";
constexpr std::string_view kToolCallClose = "</tool_call>";

constexpr std::string_view kToolsIntro =
    "# Tools\n"
    "\n"
    "You may call one or more functions to assist with the user query.\n"
    "\n"
    "You are provided with function signatures within <tools></tools> XML tags:\n"
    "<tools>\n";

constexpr std::string_view kToolsOutro =
    "</tools>\n"
    "\n"
    "For each function call, output the function name and arguments within the "
    "following XML format:\n"
    "<tool_call>{function-name}\n"
    "<arg_key>{arg-key-1}</arg_key>\n"
    "<arg_value>{arg-value-1}</arg_value>\n"
    "<arg_key>{arg-key-2}</arg_key>\n"
    "<arg_value>{arg-value-2}</arg_value>\n"
    "...\n"
    "</tool_call>";

std::string quote(const std::string& s) { return json(s).dump(); }

void check_wire_safe(const std::string& text, const char* what) {
  if (text.find(kTurnStart) != std::string::npos ||
      text.find(kTurnEnd) != std::string::npos) {
    throw ContentViolationError(std::string(what) +
                                " contains a turn separator and cannot be "
                                "represented on this wire");
  }
}

std::string tools_block(const std::vector<ToolSpec>& tools) {
  std::string out(kToolsIntro);
  for (const ToolSpec& tool : tools) {
    if (tool.name.empty()) {
      throw InvalidArgumentError("tool name must be nonempty");
    }
    out += "{\"type\": \"function\", \"function\": {\"name\": ";
    out += quote(tool.name);
    out += ", \"description\": ";
    out += quote(tool.description);
    out += ", \"parameters\": ";
    out += tool.parameters;
    out += " } }\n";
  }
  out += kToolsOutro;
  return out;
}

std::string think_block(const std::string& reasoning) {
  std::string out(kThinkOpen);
  out += '\n';
  out += reasoning;
  out += '\n';
  out += kThinkClose;
  out += "\n\n";
  return out;
}

// Parses one double-quoted JSON string starting at pos; returns its decoded
// value and leaves pos one past the closing quote.
std::string take_json_string(std::string_view text, size_t& pos) {
  if (pos >= text.size() || text[pos] != '"') {
    throw MalformedError("expected a JSON string in the tools block", pos);
  }
  size_t end = pos + 1;
  while (end < text.size() && text[end] != '"') {
    if (text[end] == '\\') ++end;
    ++end;
  }
  if (end >= text.size()) {
    throw MalformedError("unterminated JSON string in the tools block", pos);
  }
  const std::string_view raw = text.substr(pos, end - pos + 1);
  pos = end + 1;
  try {
    return json::parse(raw).get<std::string>();
  } catch (const json::exception&) {
    throw MalformedError("bad JSON string in the tools block", pos);
  }
}

void expect(std::string_view text, size_t& pos, std::string_view literal,
            const char* what) {
  if (text.substr(pos, literal.size()) != literal) {
    throw MalformedError(std::string("expected ") + what, pos);
  }
  pos += literal.size();
}

ToolSpec parse_tool_line(std::string_view line) {
  ToolSpec spec;
  size_t pos = 0;
  expect(line, pos, "{\"type\": \"function\", \"function\": {\"name\": ",
         "tool declaration prefix");
  spec.name = take_json_string(line, pos);
  expect(line, pos, ", \"description\": ", "tool description field");
  spec.description = take_json_string(line, pos);
  expect(line, pos, ", \"parameters\": ", "tool parameters field");
  if (line.size() < pos + 4 || line.substr(line.size() - 4) != " } }") {
    throw MalformedError("tool declaration missing closing braces", pos);
  }
  spec.parameters = std::string(line.substr(pos, line.size() - 4 - pos));
  return spec;
}

}  // namespace

std::string_view role_name(Role role) {
  switch (role) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "user";
}

Role role_from_name(std::string_view name) {
  if (name == "system") return Role::System;
  if (name == "user") return Role::User;
  if (name == "assistant") return Role::Assistant;
  throw ConfigError("unknown chat role: " + std::string(name));
}

std::string render(const std::vector<ChatMessage>& messages,
                   const std::vector<ToolSpec>& tools, RenderMode mode,
                   bool add_generation_prompt) {
  if (messages.empty()) {
    throw InvalidArgumentError("conversation must contain at least one message");
  }
  bool has_assistant = false;
  for (size_t i = 0; i < messages.size(); ++i) {
    const ChatMessage& msg = messages[i];
    if (msg.role == Role::System && i != 0) {
      throw InvalidArgumentError("a system message must come first");
    }
    if (msg.role != Role::Assistant && msg.reasoning) {
      throw InvalidArgumentError("reasoning is only valid on assistant turns");
    }
    if (msg.role == Role::Assistant) {
      has_assistant = true;
      if (mode == RenderMode::NonReasoning && msg.reasoning &&
          !msg.reasoning->empty()) {
        throw ModeConflictError(
            "reasoning content supplied in non-reasoning mode");
      }
      if (msg.reasoning &&
          msg.reasoning->find(kThinkClose) != std::string::npos) {
        throw ContentViolationError("reasoning cannot contain </think>");
      }
      if (msg.reasoning) check_wire_safe(*msg.reasoning, "reasoning");
    }
    check_wire_safe(msg.content, "message content");
  }
  if (!has_assistant && !add_generation_prompt) {
    throw InvalidArgumentError(
        "conversation has no assistant turn and no generation prompt was "
        "requested");
  }

  std::string out;
  size_t index = 0;

  const bool explicit_system =
      messages[0].role == Role::System;
  if (explicit_system || !tools.empty()) {
    out += kTurnStart;
    out += "system\n";
    if (explicit_system) {
      out += messages[0].content;
      ++index;
      if (!tools.empty()) out += "\n\n";
    }
    if (!tools.empty()) out += tools_block(tools);
    out += kTurnEnd;
    out += '\n';
  }

  for (; index < messages.size(); ++index) {
    const ChatMessage& msg = messages[index];
    out += kTurnStart;
    out += role_name(msg.role);
    out += '\n';
    if (msg.role == Role::Assistant) {
      out += think_block(mode == RenderMode::Reasoning && msg.reasoning
                             ? *msg.reasoning
                             : std::string());
      out += msg.content;
      out += '\n';
    } else {
      out += msg.content;
    }
    out += kTurnEnd;
    out += '\n';
  }

  if (add_generation_prompt) {
    out += kTurnStart;
    out += "assistant\n";
  }
  return out;
}

std::pair<std::string, std::string> split_reasoning(
    std::string_view assistant_text) {
  const size_t open = assistant_text.find(kThinkOpen);
  if (open == std::string_view::npos) {
    return {"", std::string(assistant_text)};
  }
  if (open != 0) {
    throw MalformedError("think block does not start the text", open);
  }
  size_t pos = kThinkOpen.size();
  if (pos >= assistant_text.size() || assistant_text[pos] != '\n') {
    throw MalformedError("think block is missing its opening newline", pos);
  }
  // Content spans from after "<think>\n" to the "\n</think>" terminator.
  const size_t content_start = pos + 1;
  const size_t close = assistant_text.find("\n</think>", pos);
  if (close == std::string_view::npos) {
    throw MalformedError("think block is never closed", pos);
  }
  const std::string reasoning(
      assistant_text.substr(content_start, close - content_start));
  size_t after = close + 1 + kThinkClose.size();
  if (assistant_text.substr(after, 2) != "\n\n") {
    throw MalformedError("missing blank line after the think block", after);
  }
  return {reasoning, std::string(assistant_text.substr(after + 2))};
}

std::vector<ToolCall> parse_tool_calls(std::string_view text) {
  std::vector<ToolCall> calls;
  size_t scan = 0;
  while (true) {
    const size_t open = text.find(kToolCallOpen, scan);
    if (open == std::string_view::npos) break;

    size_t pos = open + kToolCallOpen.size();
    const size_t name_end = text.find('\n', pos);
    if (name_end == std::string_view::npos) {
      throw MalformedError("tool call block is never closed", open);
    }
    ToolCall call;
    call.function_name = std::string(text.substr(pos, name_end - pos));
    if (call.function_name.empty()) {
      throw MalformedError("tool call has an empty function name", pos);
    }
    pos = name_end + 1;

    while (true) {
      if (text.substr(pos, kToolCallClose.size()) == kToolCallClose) {
        pos += kToolCallClose.size();
        break;
      }
      if (text.substr(pos, 9) != "<arg_key>") {
        throw MalformedError("expected <arg_key> or </tool_call>", pos);
      }
      pos += 9;
      const size_t key_end = text.find("</arg_key>", pos);
      if (key_end == std::string_view::npos) {
        throw MalformedError("unterminated <arg_key>", pos);
      }
      std::string key(text.substr(pos, key_end - pos));
      if (key.empty()) {
        throw MalformedError("argument key is empty", pos);
      }
      pos = key_end + 10;
      if (text.substr(pos, 12) != "\n<arg_value>") {
        throw MalformedError("argument key without a value", pos);
      }
      pos += 12;
      const size_t value_end = text.find("</arg_value>", pos);
      if (value_end == std::string_view::npos) {
        throw MalformedError("unterminated <arg_value>", pos);
      }
      std::string value(text.substr(pos, value_end - pos));
      pos = value_end + 12;
      if (pos >= text.size() || text[pos] != '\n') {
        throw MalformedError("missing newline after argument value", pos);
      }
      ++pos;
      call.args.emplace_back(std::move(key), std::move(value));
    }
    calls.push_back(std::move(call));
    scan = pos;
  }
  return calls;
}

std::string render_tool_call(const ToolCall& call) {
  if (call.function_name.empty() ||
      call.function_name.find_first_of("<>\n") != std::string::npos) {
    throw InvalidArgumentError("function name is empty or contains <, > or newline");
  }
  std::string out(kToolCallOpen);
  out += call.function_name;
  out += '\n';
  for (const auto& [key, value] : call.args) {
    if (key.empty() || key.find_first_of("<>\n") != std::string::npos) {
      throw InvalidArgumentError("argument key is empty or contains <, > or newline");
    }
    if (value.find("</arg_value>") != std::string::npos) {
      throw ContentViolationError("argument value cannot contain </arg_value>");
    }
    out += "<arg_key>";
    out += key;
    out += "</arg_key>\n<arg_value>";
    out += value;
    out += "</arg_value>\n";
  }
  out += kToolCallClose;
  return out;
}

std::string render_tool_calls(const std::vector<ToolCall>& calls) {
  std::string out;
  for (size_t i = 0; i < calls.size(); ++i) {
    if (i) out += '\n';
    out += render_tool_call(calls[i]);
  }
  return out;
}

ParsedConversation parse_conversation(std::string_view wire) {
  ParsedConversation conv;
  size_t pos = 0;
  if (wire.substr(0, kTurnStart.size()) != kTurnStart) {
    throw MalformedError("wire text does not start with a turn marker", 0);
  }

  bool any_reasoning = false;
  while (pos < wire.size()) {
    expect(wire, pos, kTurnStart, "turn start marker");
    const size_t role_end = wire.find('\n', pos);
    if (role_end == std::string_view::npos) {
      throw MalformedError("turn is missing its role line", pos);
    }
    const Role role = role_from_name(wire.substr(pos, role_end - pos));
    pos = role_end + 1;

    const size_t body_end = wire.find(kTurnEnd, pos);
    if (body_end == std::string_view::npos) {
      if (role == Role::Assistant && pos == wire.size()) {
        conv.generation_prompt = true;  // trailing "<|im_start|>assistant\n"
        break;
      }
      throw MalformedError("turn is never closed", pos);
    }
    std::string body(wire.substr(pos, body_end - pos));
    pos = body_end + kTurnEnd.size();
    if (pos < wire.size()) {
      expect(wire, pos, "\n", "newline after turn end");
    }

    switch (role) {
      case Role::System: {
        // The tools block, when present, is the tail of the system body.
        const std::string_view intro(kToolsIntro);
        std::string content = body;
        size_t tools_at = std::string::npos;
        if (body.substr(0, intro.size()) == intro) {
          tools_at = 0;
        } else {
          const std::string marker = "\n\n" + std::string(intro);
          const size_t found = body.find(marker);
          if (found != std::string::npos) tools_at = found + 2;
        }
        if (tools_at != std::string::npos) {
          const std::string block = body.substr(tools_at);
          content = tools_at == 0 ? "" : body.substr(0, tools_at - 2);
          size_t line_start = intro.size();
          while (block.substr(line_start, 9) != "</tools>\n") {
            const size_t line_end = block.find('\n', line_start);
            if (line_end == std::string::npos) {
              throw MalformedError("tools block is never closed", line_start);
            }
            conv.tools.push_back(
                parse_tool_line(block.substr(line_start, line_end - line_start)));
            line_start = line_end + 1;
          }
          const std::string outro = block.substr(line_start);
          if (outro != std::string(kToolsOutro)) {
            throw MalformedError("tools block has a nonstandard calling convention",
                                 tools_at + line_start);
          }
        }
        // A body that is purely the tools block carries no system message.
        if (tools_at != 0) {
          conv.messages.push_back({Role::System, content, std::nullopt});
        }
        break;
      }
      case Role::User:
        conv.messages.push_back({Role::User, body, std::nullopt});
        break;
      case Role::Assistant: {
        if (body.empty() || body.back() != '\n') {
          throw MalformedError("assistant body is missing its final newline",
                               body_end);
        }
        body.pop_back();
        auto [reasoning, response] = split_reasoning(body);
        ChatMessage msg{Role::Assistant, response, std::nullopt};
        if (!reasoning.empty()) {
          msg.reasoning = reasoning;
          any_reasoning = true;
        }
        conv.messages.push_back(std::move(msg));
        break;
      }
    }
  }
  conv.mode = any_reasoning ? RenderMode::Reasoning : RenderMode::NonReasoning;
  return conv;
}

std::string messages_to_json(const std::vector<ChatMessage>& messages) {
  json arr = json::array();
  for (const ChatMessage& msg : messages) {
    json row;
    row["role"] = std::string(role_name(msg.role));
    row["content"] = msg.content;
    if (msg.reasoning) row["reasoning"] = *msg.reasoning;
    arr.push_back(std::move(row));
  }
  return arr.dump();
}

std::vector<ChatMessage> messages_from_json(std::string_view text) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("conversation is not valid JSON: ") + e.what());
  }
  if (!arr.is_array()) throw ConfigError("conversation must be a JSON array");
  std::vector<ChatMessage> messages;
  for (const auto& row : arr) {
    ChatMessage msg;
    msg.role = role_from_name(row.at("role").get<std::string>());
    msg.content = row.at("content").get<std::string>();
    if (row.contains("reasoning") && !row["reasoning"].is_null()) {
      msg.reasoning = row["reasoning"].get<std::string>();
    }
    messages.push_back(std::move(msg));
  }
  return messages;
}

std::vector<ToolSpec> tools_from_json(std::string_view text) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("tools file is not valid JSON: ") + e.what());
  }
  if (!arr.is_array()) throw ConfigError("tools must be a JSON array");
  std::vector<ToolSpec> tools;
  for (const auto& row : arr) {
    ToolSpec spec;
    spec.name = row.at("name").get<std::string>();
    spec.description = row.value("description", std::string());
    spec.parameters = row.contains("parameters") ? row["parameters"].dump()
                                                 : std::string("{}");
    tools.push_back(std::move(spec));
  }
  return tools;
}

}  // namespace tokkit::chatml
