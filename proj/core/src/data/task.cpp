#include "odibench/data/task.hpp"

namespace odibench::data {

std::string_view to_string(TaskKind t) {
  switch (t) {
    case TaskKind::ObjectAttribute: return "ObjectAttribute";
    case TaskKind::HumanAttribute: return "HumanAttribute";
    case TaskKind::Existence: return "Existence";
    case TaskKind::Counting: return "Counting";
    case TaskKind::OCR: return "OCR";
    case TaskKind::EgocentricViewOrientation: return "EgocentricViewOrientation";
    case TaskKind::AllocentricViewOrientation: return "AllocentricViewOrientation";
    case TaskKind::SceneSimulation: return "SceneSimulation";
    case TaskKind::RelativeDirection: return "RelativeDirection";
    case TaskKind::OdiReasoning: return "OdiReasoning";
  }
  return "ObjectAttribute";
}

std::optional<TaskKind> task_from_string(std::string_view s) {
  for (TaskKind t : kAllTasks) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string_view task_label(TaskKind t) {
  switch (t) {
    case TaskKind::ObjectAttribute: return "OA";
    case TaskKind::HumanAttribute: return "HA";
    case TaskKind::Existence: return "Exist.";
    case TaskKind::Counting: return "Count.";
    case TaskKind::OCR: return "OCR";
    case TaskKind::EgocentricViewOrientation: return "EVO";
    case TaskKind::AllocentricViewOrientation: return "AVO";
    case TaskKind::SceneSimulation: return "SS";
    case TaskKind::RelativeDirection: return "RD";
    case TaskKind::OdiReasoning: return "OR";
  }
  return "OA";
}

}  // namespace odibench::data
