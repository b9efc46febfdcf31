#pragma once

#include <array>
#include <string>

namespace specops {

/// The six specialist roles. Each binds to exactly one tool registry and
/// one prompt template for the phase it operates.
enum class SpecialistRole {
    TestArchitect,
    TestAnalyst,
    InfrastructureManager,
    Engineer,
    Investigator,
    Judge,
};

constexpr std::array<SpecialistRole, 6> kAllRoles = {
    SpecialistRole::TestArchitect,     SpecialistRole::TestAnalyst, SpecialistRole::InfrastructureManager,
    SpecialistRole::Engineer,          SpecialistRole::Investigator, SpecialistRole::Judge,
};

enum class Phase {
    Generation,
    Setup,
    Execution,
    Validation,
};

constexpr std::array<Phase, 4> kAllPhases = {
    Phase::Generation,
    Phase::Setup,
    Phase::Execution,
    Phase::Validation,
};

const char* role_name(SpecialistRole role);
SpecialistRole role_from_name(const std::string& name);

const char* phase_name(Phase phase);
Phase phase_from_name(const std::string& name);

} // namespace specops
