#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specops/json_util.hpp"
#include "specops/roles.hpp"

namespace specops::spec {

enum class Domain { Email, FileSystem, HrQa, Other };
enum class AgentPlatform { Cli, WebApp, BrowserExtension, Desktop };
enum class SetupTarget { Email, FileSystem, Other };
enum class CheckKind { EnvProbe, ScreenEvidence, AgentSelfReport };

const char* domain_name(Domain d);
Domain domain_from_name(const std::string& name);
const char* platform_name(AgentPlatform p);
AgentPlatform platform_from_name(const std::string& name);
const char* setup_target_name(SetupTarget t);
SetupTarget setup_target_from_name(const std::string& name);
const char* check_kind_name(CheckKind k);
CheckKind check_kind_from_name(const std::string& name);

struct FeatureDescription {
    std::string id;
    Domain domain = Domain::Other;
    std::string text;
};

struct AgentSpecification {
    std::string name;
    AgentPlatform platform = AgentPlatform::Cli;
    std::vector<std::string> launch; // launch command or navigation targets, in order
    std::string docs;
};

/// One abstract setup intention. `entities` are the declared keys for the
/// data this step brings into existence; oracle/prompt cross-references are
/// resolved against these keys, never by parsing the intent text.
struct SetupStep {
    std::string id;
    std::string intent;
    SetupTarget target = SetupTarget::Other;
    std::vector<std::string> entities;
};

struct Oracle {
    std::string id;
    std::string description;
    CheckKind check_kind = CheckKind::ScreenEvidence;
    std::string probe_target;                 // required when check_kind == EnvProbe
    std::vector<std::string> entity_refs;     // entities this check depends on
    std::string generalizability_note;        // valid alternative execution paths
};

/// One immutable state of the bundled specification. Snapshots are full
/// copies; producing a new one never touches its predecessors.
struct SpecSnapshot {
    std::vector<SetupStep> setup_steps;
    std::string subject_prompt;
    std::vector<std::string> prompt_requires;   // entity keys the prompt depends on
    std::vector<std::string> prompt_introduces; // entities the subject agent is asked to create
    std::vector<Oracle> oracles;

    Json to_json() const;
    static SpecSnapshot from_json(const Json& j);
};

struct Revision {
    SpecialistRole author_role = SpecialistRole::TestArchitect;
    std::int64_t timestamp = 0;
    std::string delta_description;
    std::string before_snapshot_id;
    std::string after_snapshot_id;
};

struct PromptSpec {
    std::string text;
    std::vector<std::string> requires_entities;
    std::vector<std::string> introduces_entities;
};

/// What a revision may change. An all-empty delta is a no-op and records
/// no revision.
struct RevisionDelta {
    std::string description;
    std::vector<SetupStep> add_setup_steps;
    std::vector<std::string> remove_setup_ids;
    std::optional<PromptSpec> set_prompt;
    std::vector<Oracle> add_oracles;
    std::vector<std::string> remove_oracle_ids;

    bool empty() const;
    Json to_json() const;
    static RevisionDelta from_json(const Json& j);
};

enum class ViolationKind {
    MissingData,        // prompt requires an entity no setup step creates
    UnknownOracleEntity, // oracle references an entity neither setup nor prompt introduces
    DuplicateOracleId,
    MissingProbeTarget, // EnvProbe oracle without a probe target
};

const char* violation_kind_name(ViolationKind k);

struct CoherenceViolation {
    ViolationKind kind;
    std::string subject; // the offending entity key or oracle id
    std::string detail;

    bool operator==(const CoherenceViolation&) const = default;
};

class TestSpecification {
public:
    TestSpecification() = default;

    const std::string& feature_id() const { return feature_id_; }
    const std::string& agent_name() const { return agent_name_; }

    const SpecSnapshot& active() const { return snapshots_.back(); }
    std::size_t snapshot_count() const { return snapshots_.size(); }
    const SpecSnapshot& snapshot(std::size_t index) const { return snapshots_.at(index); }
    std::string snapshot_id(std::size_t index) const;
    std::string active_snapshot_id() const { return snapshot_id(snapshots_.size() - 1); }

    const std::vector<Revision>& revisions() const { return revisions_; }

    /// Canonical JSON of the whole document: snapshots plus revision history.
    Json to_json() const;
    /// Canonical JSON of the active snapshot only.
    Json active_json() const;
    static TestSpecification from_json(const Json& j);

    friend TestSpecification new_specification(const FeatureDescription& feature,
                                               const AgentSpecification& agent, std::int64_t timestamp);
    friend TestSpecification revise_specification(const TestSpecification& spec, SpecialistRole author_role,
                                                  const RevisionDelta& delta, std::int64_t timestamp);

private:
    std::string feature_id_;
    std::string agent_name_;
    std::vector<SpecSnapshot> snapshots_;
    std::vector<Revision> revisions_;
    int next_step_serial_ = 1;
};

/// Builds an empty specification shell and records revision 0.
/// Throws InvalidFeature when the feature id or text is empty.
TestSpecification new_specification(const FeatureDescription& feature, const AgentSpecification& agent,
                                    std::int64_t timestamp = 0);

/// Applies `delta` as a new snapshot. Only the Test Architect, Test Analyst,
/// and Infrastructure Manager may revise; anyone else gets RoleViolation.
/// A delta that adds an oracle referencing an entity absent from the
/// resulting snapshot is rejected with IncoherentRevision. Empty deltas
/// return the spec unchanged.
TestSpecification revise_specification(const TestSpecification& spec, SpecialistRole author_role,
                                       const RevisionDelta& delta, std::int64_t timestamp = 0);

/// Diagnostic pass over the active snapshot. Pure; empty result = coherent.
std::vector<CoherenceViolation> coherence_check(const TestSpecification& spec);
std::vector<CoherenceViolation> coherence_check(const SpecSnapshot& snapshot);

} // namespace specops::spec
