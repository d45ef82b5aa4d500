#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace odibench::backend {

enum class Role { system, user, assistant };

std::string_view to_string(Role r);

struct MessagePart {
  enum class Kind { text, image };

  Kind kind = Kind::text;
  std::string text;
  std::vector<std::uint8_t> bytes;  // image payload
  std::string media_type;           // e.g. image/png

  static MessagePart make_text(std::string t) {
    MessagePart p;
    p.kind = Kind::text;
    p.text = std::move(t);
    return p;
  }
  static MessagePart make_image(std::vector<std::uint8_t> data, std::string media) {
    MessagePart p;
    p.kind = Kind::image;
    p.bytes = std::move(data);
    p.media_type = std::move(media);
    return p;
  }
};

struct Message {
  Role role = Role::user;
  std::vector<MessagePart> parts;
};

struct ModelRequest {
  std::string model_id;
  std::vector<Message> messages;
  double temperature = 0.0;
  int max_tokens = 1024;

  // Throws ValidationError unless there is at least one user turn and every
  // image part has bytes and a media type.
  void validate() const;

  // Concatenated text parts of the last user turn; what scripted mocks and
  // the random policy match against.
  std::string last_user_text() const;

  std::size_t image_part_count() const;
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct ModelResponse {
  std::string text;
  std::optional<TokenUsage> usage;
  std::int64_t latency_ms = 0;
};

}  // namespace odibench::backend
