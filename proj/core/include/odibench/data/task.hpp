#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace odibench::data {

// The ten benchmark tasks. The first five probe general understanding, the
// last five spatial understanding; report columns follow this order.
enum class TaskKind {
  ObjectAttribute,
  HumanAttribute,
  Existence,
  Counting,
  OCR,
  EgocentricViewOrientation,
  AllocentricViewOrientation,
  SceneSimulation,
  RelativeDirection,
  OdiReasoning,
};

enum class TaskFamily { General, Spatial };

inline constexpr std::array<TaskKind, 10> kAllTasks = {
    TaskKind::ObjectAttribute,
    TaskKind::HumanAttribute,
    TaskKind::Existence,
    TaskKind::Counting,
    TaskKind::OCR,
    TaskKind::EgocentricViewOrientation,
    TaskKind::AllocentricViewOrientation,
    TaskKind::SceneSimulation,
    TaskKind::RelativeDirection,
    TaskKind::OdiReasoning,
};

std::string_view to_string(TaskKind t);
std::optional<TaskKind> task_from_string(std::string_view s);

// Short column label: OA, HA, Exist., Count., OCR, EVO, AVO, SS, RD, OR.
std::string_view task_label(TaskKind t);

inline TaskFamily family(TaskKind t) {
  return static_cast<int>(t) < 5 ? TaskFamily::General : TaskFamily::Spatial;
}

}  // namespace odibench::data
