#include "onevision/frameworks/framework.hpp"

#include <stdexcept>
#include <string>

#include "onevision/frameworks/agents.hpp"

namespace onevision::frameworks {

const char* to_string(FrameworkId id) {
  switch (id) {
    case FrameworkId::OneVision: return "onevision";
    case FrameworkId::Naive: return "naive";
    case FrameworkId::Local: return "local";
    case FrameworkId::ConstU: return "constu";
  }
  return "unknown";
}

FrameworkId framework_from_string(std::string_view name) {
  for (auto id : all_frameworks()) {
    if (name == to_string(id)) return id;
  }
  throw std::invalid_argument("unknown framework id '" + std::string(name) + "' (registered: onevision, naive, local, constu)");
}

std::vector<FrameworkId> all_frameworks() {
  return {FrameworkId::OneVision, FrameworkId::Naive, FrameworkId::Local, FrameworkId::ConstU};
}

std::unique_ptr<AgentController> make_agent(FrameworkId id, int agent, std::shared_ptr<const FleetModel> model,
                                            const DelaySpec& delays, const FrameworkOptions& options,
                                            const FleetSnapshot& initial) {
  switch (id) {
    case FrameworkId::OneVision: return std::make_unique<OneVisionAgent>(agent, std::move(model), delays, options, initial);
    case FrameworkId::Naive: return std::make_unique<NaiveAgent>(agent, std::move(model), delays, options, initial);
    case FrameworkId::Local: return std::make_unique<LocalAgent>(agent, std::move(model), delays, options, initial);
    case FrameworkId::ConstU: return std::make_unique<ConstUAgent>(agent, std::move(model), delays, options, initial);
  }
  throw std::invalid_argument("unknown framework");
}

}  // namespace onevision::frameworks
