#include "odibench/backend/message.hpp"

#include "odibench/errors.hpp"

namespace odibench::backend {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

void ModelRequest::validate() const {
  bool has_user = false;
  for (const Message& m : messages) {
    if (m.role == Role::user) has_user = true;
    for (const MessagePart& p : m.parts) {
      if (p.kind == MessagePart::Kind::image) {
        if (p.bytes.empty()) throw ValidationError("image part with empty payload");
        if (p.media_type.empty()) throw ValidationError("image part without media type");
      }
    }
  }
  if (!has_user) throw ValidationError("request has no user turn");
  if (temperature < 0) throw ValidationError("negative temperature");
  if (max_tokens <= 0) throw ValidationError("max_tokens must be positive");
}

std::string ModelRequest::last_user_text() const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role != Role::user) continue;
    std::string out;
    for (const MessagePart& p : it->parts) {
      if (p.kind == MessagePart::Kind::text) {
        if (!out.empty()) out += "\n";
        out += p.text;
      }
    }
    return out;
  }
  return {};
}

std::size_t ModelRequest::image_part_count() const {
  std::size_t n = 0;
  for (const Message& m : messages) {
    for (const MessagePart& p : m.parts) {
      if (p.kind == MessagePart::Kind::image) ++n;
    }
  }
  return n;
}

}  // namespace odibench::backend
