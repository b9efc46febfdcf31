#include "specops/spec_model.hpp"

#include "specops/errors.hpp"

#include <algorithm>
#include <set>

namespace specops::spec {

const char* domain_name(Domain d) {
    switch (d) {
    case Domain::Email: return "Email";
    case Domain::FileSystem: return "FileSystem";
    case Domain::HrQa: return "HrQa";
    case Domain::Other: return "Other";
    }
    return "?";
}

Domain domain_from_name(const std::string& name) {
    for (Domain d : {Domain::Email, Domain::FileSystem, Domain::HrQa, Domain::Other})
        if (name == domain_name(d)) return d;
    throw SpecOpsError(ErrorCode::ConfigError, "unknown domain '" + name + "'");
}

const char* platform_name(AgentPlatform p) {
    switch (p) {
    case AgentPlatform::Cli: return "Cli";
    case AgentPlatform::WebApp: return "WebApp";
    case AgentPlatform::BrowserExtension: return "BrowserExtension";
    case AgentPlatform::Desktop: return "Desktop";
    }
    return "?";
}

AgentPlatform platform_from_name(const std::string& name) {
    for (AgentPlatform p :
         {AgentPlatform::Cli, AgentPlatform::WebApp, AgentPlatform::BrowserExtension, AgentPlatform::Desktop})
        if (name == platform_name(p)) return p;
    throw SpecOpsError(ErrorCode::ConfigError, "unknown platform '" + name + "'");
}

const char* setup_target_name(SetupTarget t) {
    switch (t) {
    case SetupTarget::Email: return "Email";
    case SetupTarget::FileSystem: return "FileSystem";
    case SetupTarget::Other: return "Other";
    }
    return "?";
}

SetupTarget setup_target_from_name(const std::string& name) {
    for (SetupTarget t : {SetupTarget::Email, SetupTarget::FileSystem, SetupTarget::Other})
        if (name == setup_target_name(t)) return t;
    throw SpecOpsError(ErrorCode::ConfigError, "unknown setup target '" + name + "'");
}

const char* check_kind_name(CheckKind k) {
    switch (k) {
    case CheckKind::EnvProbe: return "EnvProbe";
    case CheckKind::ScreenEvidence: return "ScreenEvidence";
    case CheckKind::AgentSelfReport: return "AgentSelfReport";
    }
    return "?";
}

CheckKind check_kind_from_name(const std::string& name) {
    for (CheckKind k : {CheckKind::EnvProbe, CheckKind::ScreenEvidence, CheckKind::AgentSelfReport})
        if (name == check_kind_name(k)) return k;
    throw SpecOpsError(ErrorCode::ConfigError, "unknown check kind '" + name + "'");
}

const char* violation_kind_name(ViolationKind k) {
    switch (k) {
    case ViolationKind::MissingData: return "missing-data";
    case ViolationKind::UnknownOracleEntity: return "unknown-oracle-entity";
    case ViolationKind::DuplicateOracleId: return "duplicate-oracle-id";
    case ViolationKind::MissingProbeTarget: return "missing-probe-target";
    }
    return "?";
}

namespace {

Json strings_to_json(const std::vector<std::string>& values) {
    Json arr = Json::array();
    for (const auto& v : values) arr.push_back(v);
    return arr;
}

std::vector<std::string> strings_from_json(const Json& j) {
    std::vector<std::string> out;
    if (j.is_array())
        for (const auto& v : j) out.push_back(v.get<std::string>());
    return out;
}

Json step_to_json(const SetupStep& s) {
    Json j;
    j["id"] = s.id;
    j["intent"] = s.intent;
    j["target"] = setup_target_name(s.target);
    j["entities"] = strings_to_json(s.entities);
    return j;
}

SetupStep step_from_json(const Json& j) {
    SetupStep s;
    s.id = j.value("id", "");
    s.intent = j.value("intent", "");
    s.target = setup_target_from_name(j.value("target", "Other"));
    s.entities = strings_from_json(j.value("entities", Json::array()));
    return s;
}

Json oracle_to_json(const Oracle& o) {
    Json j;
    j["id"] = o.id;
    j["description"] = o.description;
    j["check_kind"] = check_kind_name(o.check_kind);
    j["probe_target"] = o.probe_target;
    j["entity_refs"] = strings_to_json(o.entity_refs);
    j["generalizability_note"] = o.generalizability_note;
    return j;
}

Oracle oracle_from_json(const Json& j) {
    Oracle o;
    o.id = j.value("id", "");
    o.description = j.value("description", "");
    o.check_kind = check_kind_from_name(j.value("check_kind", "ScreenEvidence"));
    o.probe_target = j.value("probe_target", "");
    o.entity_refs = strings_from_json(j.value("entity_refs", Json::array()));
    o.generalizability_note = j.value("generalizability_note", "");
    return o;
}

std::set<std::string> known_entities(const SpecSnapshot& snap) {
    std::set<std::string> keys;
    for (const auto& step : snap.setup_steps) keys.insert(step.entities.begin(), step.entities.end());
    keys.insert(snap.prompt_introduces.begin(), snap.prompt_introduces.end());
    return keys;
}

} // namespace

Json SpecSnapshot::to_json() const {
    Json j;
    Json steps = Json::array();
    for (const auto& s : setup_steps) steps.push_back(step_to_json(s));
    j["setup_steps"] = std::move(steps);
    j["subject_prompt"] = subject_prompt;
    j["prompt_requires"] = strings_to_json(prompt_requires);
    j["prompt_introduces"] = strings_to_json(prompt_introduces);
    Json oracles_json = Json::array();
    for (const auto& o : oracles) oracles_json.push_back(oracle_to_json(o));
    j["oracles"] = std::move(oracles_json);
    return j;
}

SpecSnapshot SpecSnapshot::from_json(const Json& j) {
    SpecSnapshot snap;
    for (const auto& s : j.value("setup_steps", Json::array())) snap.setup_steps.push_back(step_from_json(s));
    snap.subject_prompt = j.value("subject_prompt", "");
    snap.prompt_requires = strings_from_json(j.value("prompt_requires", Json::array()));
    snap.prompt_introduces = strings_from_json(j.value("prompt_introduces", Json::array()));
    for (const auto& o : j.value("oracles", Json::array())) snap.oracles.push_back(oracle_from_json(o));
    return snap;
}

bool RevisionDelta::empty() const {
    return add_setup_steps.empty() && remove_setup_ids.empty() && !set_prompt.has_value() && add_oracles.empty() &&
           remove_oracle_ids.empty();
}

Json RevisionDelta::to_json() const {
    Json j;
    j["description"] = description;
    Json steps = Json::array();
    for (const auto& s : add_setup_steps) steps.push_back(step_to_json(s));
    j["add_setup_steps"] = std::move(steps);
    j["remove_setup_ids"] = strings_to_json(remove_setup_ids);
    if (set_prompt) {
        Json p;
        p["text"] = set_prompt->text;
        p["requires"] = strings_to_json(set_prompt->requires_entities);
        p["introduces"] = strings_to_json(set_prompt->introduces_entities);
        j["set_prompt"] = std::move(p);
    }
    Json oracles_json = Json::array();
    for (const auto& o : add_oracles) oracles_json.push_back(oracle_to_json(o));
    j["add_oracles"] = std::move(oracles_json);
    j["remove_oracle_ids"] = strings_to_json(remove_oracle_ids);
    return j;
}

RevisionDelta RevisionDelta::from_json(const Json& j) {
    RevisionDelta d;
    d.description = j.value("description", "");
    for (const auto& s : j.value("add_setup_steps", Json::array())) d.add_setup_steps.push_back(step_from_json(s));
    d.remove_setup_ids = strings_from_json(j.value("remove_setup_ids", Json::array()));
    if (j.contains("set_prompt") && j["set_prompt"].is_object()) {
        PromptSpec p;
        p.text = j["set_prompt"].value("text", "");
        p.requires_entities = strings_from_json(j["set_prompt"].value("requires", Json::array()));
        p.introduces_entities = strings_from_json(j["set_prompt"].value("introduces", Json::array()));
        d.set_prompt = std::move(p);
    }
    for (const auto& o : j.value("add_oracles", Json::array())) d.add_oracles.push_back(oracle_from_json(o));
    d.remove_oracle_ids = strings_from_json(j.value("remove_oracle_ids", Json::array()));
    return d;
}

std::string TestSpecification::snapshot_id(std::size_t index) const { return "snap-" + std::to_string(index); }

Json TestSpecification::to_json() const {
    Json j;
    j["feature_id"] = feature_id_;
    j["agent_name"] = agent_name_;
    Json snaps = Json::array();
    for (std::size_t i = 0; i < snapshots_.size(); ++i) {
        Json s;
        s["id"] = snapshot_id(i);
        s["state"] = snapshots_[i].to_json();
        snaps.push_back(std::move(s));
    }
    j["snapshots"] = std::move(snaps);
    Json revs = Json::array();
    for (const auto& r : revisions_) {
        Json rj;
        rj["author_role"] = role_name(r.author_role);
        rj["timestamp"] = r.timestamp;
        rj["delta_description"] = r.delta_description;
        rj["before_snapshot_id"] = r.before_snapshot_id;
        rj["after_snapshot_id"] = r.after_snapshot_id;
        revs.push_back(std::move(rj));
    }
    j["revisions"] = std::move(revs);
    j["active_snapshot_id"] = active_snapshot_id();
    return j;
}

Json TestSpecification::active_json() const { return active().to_json(); }

TestSpecification TestSpecification::from_json(const Json& j) {
    TestSpecification spec;
    spec.feature_id_ = j.value("feature_id", "");
    spec.agent_name_ = j.value("agent_name", "");
    for (const auto& s : j.value("snapshots", Json::array()))
        spec.snapshots_.push_back(SpecSnapshot::from_json(s.value("state", Json::object())));
    for (const auto& r : j.value("revisions", Json::array())) {
        Revision rev;
        rev.author_role = role_from_name(r.value("author_role", "TestArchitect"));
        rev.timestamp = r.value("timestamp", std::int64_t{0});
        rev.delta_description = r.value("delta_description", "");
        rev.before_snapshot_id = r.value("before_snapshot_id", "");
        rev.after_snapshot_id = r.value("after_snapshot_id", "");
        spec.revisions_.push_back(std::move(rev));
    }
    int max_serial = 0;
    for (const auto& snap : spec.snapshots_)
        for (const auto& step : snap.setup_steps)
            if (step.id.size() > 1 && step.id[0] == 's') max_serial = std::max(max_serial, std::atoi(step.id.c_str() + 1));
    spec.next_step_serial_ = max_serial + 1;
    return spec;
}

TestSpecification new_specification(const FeatureDescription& feature, const AgentSpecification& agent,
                                    std::int64_t timestamp) {
    if (feature.text.empty()) throw SpecOpsError(ErrorCode::InvalidFeature, "feature text is empty");
    if (feature.id.empty()) throw SpecOpsError(ErrorCode::InvalidFeature, "feature id is empty");

    TestSpecification spec;
    spec.feature_id_ = feature.id;
    spec.agent_name_ = agent.name;
    spec.snapshots_.push_back(SpecSnapshot{});
    Revision rev;
    rev.author_role = SpecialistRole::TestArchitect;
    rev.timestamp = timestamp;
    rev.delta_description = "initial empty specification for feature " + feature.id;
    rev.before_snapshot_id = "";
    rev.after_snapshot_id = spec.snapshot_id(0);
    spec.revisions_.push_back(std::move(rev));
    return spec;
}

TestSpecification revise_specification(const TestSpecification& spec, SpecialistRole author_role,
                                       const RevisionDelta& delta, std::int64_t timestamp) {
    switch (author_role) {
    case SpecialistRole::TestArchitect:
    case SpecialistRole::TestAnalyst:
    case SpecialistRole::InfrastructureManager: break;
    default:
        throw SpecOpsError(ErrorCode::RoleViolation,
                           std::string(role_name(author_role)) + " may not revise the specification");
    }

    if (delta.empty()) return spec;

    TestSpecification next = spec;
    SpecSnapshot snap = spec.active();

    for (const auto& id : delta.remove_setup_ids) {
        auto it = std::find_if(snap.setup_steps.begin(), snap.setup_steps.end(),
                               [&](const SetupStep& s) { return s.id == id; });
        if (it == snap.setup_steps.end())
            throw SpecOpsError(ErrorCode::IncoherentRevision, "delta removes unknown setup step '" + id + "'");
        snap.setup_steps.erase(it);
    }
    for (SetupStep step : delta.add_setup_steps) {
        if (step.id.empty()) step.id = "s" + std::to_string(next.next_step_serial_);
        next.next_step_serial_++;
        snap.setup_steps.push_back(std::move(step));
    }
    if (delta.set_prompt) {
        snap.subject_prompt = delta.set_prompt->text;
        snap.prompt_requires = delta.set_prompt->requires_entities;
        snap.prompt_introduces = delta.set_prompt->introduces_entities;
    }
    for (const auto& id : delta.remove_oracle_ids) {
        auto it =
            std::find_if(snap.oracles.begin(), snap.oracles.end(), [&](const Oracle& o) { return o.id == id; });
        if (it == snap.oracles.end())
            throw SpecOpsError(ErrorCode::IncoherentRevision, "delta removes unknown oracle '" + id + "'");
        snap.oracles.erase(it);
    }

    // Oracles added by this delta must resolve against the resulting snapshot.
    const auto entities = known_entities(snap);
    for (const auto& oracle : delta.add_oracles) {
        for (const auto& ref : oracle.entity_refs) {
            if (!entities.count(ref))
                throw SpecOpsError(ErrorCode::IncoherentRevision, "added oracle '" + oracle.id +
                                                                      "' references unknown entity '" + ref + "'");
        }
        snap.oracles.push_back(oracle);
    }

    next.snapshots_.push_back(std::move(snap));
    Revision rev;
    rev.author_role = author_role;
    rev.timestamp = timestamp;
    rev.delta_description = delta.description.empty() ? "(no description)" : delta.description;
    rev.before_snapshot_id = spec.active_snapshot_id();
    rev.after_snapshot_id = next.active_snapshot_id();
    next.revisions_.push_back(std::move(rev));
    return next;
}

std::vector<CoherenceViolation> coherence_check(const SpecSnapshot& snap) {
    std::vector<CoherenceViolation> violations;
    const auto setup_entities = [&] {
        std::set<std::string> keys;
        for (const auto& step : snap.setup_steps) keys.insert(step.entities.begin(), step.entities.end());
        return keys;
    }();

    for (const auto& key : snap.prompt_requires) {
        if (!setup_entities.count(key))
            violations.push_back({ViolationKind::MissingData, key,
                                  "prompt requires '" + key + "' but no setup step creates it"});
    }

    std::set<std::string> oracle_entities = setup_entities;
    oracle_entities.insert(snap.prompt_introduces.begin(), snap.prompt_introduces.end());
    for (const auto& oracle : snap.oracles) {
        for (const auto& ref : oracle.entity_refs) {
            if (!oracle_entities.count(ref))
                violations.push_back({ViolationKind::UnknownOracleEntity, oracle.id,
                                      "oracle '" + oracle.id + "' references unknown entity '" + ref + "'"});
        }
        if (oracle.check_kind == CheckKind::EnvProbe && oracle.probe_target.empty())
            violations.push_back(
                {ViolationKind::MissingProbeTarget, oracle.id, "EnvProbe oracle '" + oracle.id + "' names no target"});
    }

    std::set<std::string> seen;
    for (const auto& oracle : snap.oracles) {
        if (!seen.insert(oracle.id).second)
            violations.push_back(
                {ViolationKind::DuplicateOracleId, oracle.id, "oracle id '" + oracle.id + "' appears more than once"});
    }
    return violations;
}

std::vector<CoherenceViolation> coherence_check(const TestSpecification& spec) { return coherence_check(spec.active()); }

} // namespace specops::spec
