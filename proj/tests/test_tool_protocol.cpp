#include "doctest.h"

#include <string>

#include "specops/errors.hpp"
#include "specops/tool_protocol.hpp"

using namespace specops;
using namespace specops::tools;

namespace {

Registry demo_registry() {
    Registry reg(SpecialistRole::Engineer);
    ToolSignature echo;
    echo.name = "echo";
    echo.params = {{"text", ParamType::String, true}, {"times", ParamType::Int, false}};
    reg.register_tool(echo, [](const ToolCall& call) {
        const int times = call.args.value("times", 1);
        std::string out;
        for (int i = 0; i < times; ++i) out += call.args.at("text").get<std::string>();
        return ToolOutcome::success(out, Json{{"length", out.size()}});
    });

    ToolSignature flaky;
    flaky.name = "flaky";
    flaky.params = {{"succeed_on", ParamType::Int, true}};
    static int counter = 0; // reset per test via the "reset" arg trick below
    ToolSignature reset;
    reg.register_tool(flaky, [](const ToolCall& call) {
        ++counter;
        if (counter >= call.args.at("succeed_on").get<int>()) {
            return ToolOutcome::success("worked on attempt " + std::to_string(counter));
        }
        return ToolOutcome::retryable("transient glitch", Json{{"fault", "network_down"}});
    });
    reset.name = "reset_flaky";
    reg.register_tool(reset, [](const ToolCall&) {
        counter = 0;
        return ToolOutcome::success("reset");
    });

    ToolSignature boom;
    boom.name = "boom";
    reg.register_tool(boom, [](const ToolCall&) {
        return ToolOutcome::fatal(FatalKind::ScreenError, "screen went away");
    });
    return reg;
}

} // namespace

TEST_SUITE("tool_protocol") {
    TEST_CASE("call and result JSON round-trip") {
        ToolCall call;
        call.tool = "echo";
        call.args = Json{{"text", "hi"}};
        call.call_id = "c7";
        const ToolCall back = ToolCall::from_json(call.to_json());
        CHECK(back.tool == "echo");
        CHECK(back.args == call.args);
        CHECK(back.call_id == "c7");

        ToolResult r;
        r.call_id = "c7";
        r.status = ToolStatus::FatalError;
        r.fatal_kind = FatalKind::BadArgs;
        r.observation = "nope";
        const Json j = r.to_json();
        CHECK(j["status"] == "FatalError");
        CHECK(j["fatal_kind"] == "BadArgs");
        ToolResult ok;
        CHECK_FALSE(ok.to_json().contains("fatal_kind")); // only failures carry it
    }

    TEST_CASE("dispatch runs the handler and stamps the call id") {
        Registry reg = demo_registry();
        ToolCall call;
        call.tool = "echo";
        call.call_id = "call-1";
        call.args = Json{{"text", "ab"}, {"times", 3}};
        const ToolResult r = dispatch(reg, call);
        CHECK(r.ok());
        CHECK(r.call_id == "call-1");
        CHECK(r.observation == "ababab");
        CHECK(r.payload["length"] == 6);
    }

    TEST_CASE("unknown tools are fatal results, not exceptions") {
        Registry reg = demo_registry();
        ToolCall call;
        call.tool = "teleport";
        const ToolResult r = dispatch(reg, call);
        CHECK(r.status == ToolStatus::FatalError);
        CHECK(r.fatal_kind == FatalKind::UnknownTool);
        CHECK(r.observation.find("Engineer") != std::string::npos); // names the role
    }

    TEST_CASE("argument validation catches every malformation") {
        Registry reg = demo_registry();
        ToolCall call;
        call.tool = "echo";

        call.args = Json::object(); // missing required
        CHECK(dispatch(reg, call).fatal_kind == FatalKind::BadArgs);

        call.args = Json{{"text", 42}}; // wrong type
        CHECK(dispatch(reg, call).fatal_kind == FatalKind::BadArgs);

        call.args = Json{{"text", "x"}, {"times", "many"}}; // wrong optional type
        CHECK(dispatch(reg, call).fatal_kind == FatalKind::BadArgs);

        call.args = Json{{"text", "x"}, {"volume", 11}}; // unknown arg
        const ToolResult r = dispatch(reg, call);
        CHECK(r.fatal_kind == FatalKind::BadArgs);
        CHECK(r.observation.find("volume") != std::string::npos);

        call.args = Json{{"text", "x"}}; // optional omitted is fine
        CHECK(dispatch(reg, call).ok());
    }

    TEST_CASE("registry rejects duplicate tool names") {
        Registry reg(SpecialistRole::Engineer);
        ToolSignature sig;
        sig.name = "one";
        reg.register_tool(sig, [](const ToolCall&) { return ToolOutcome::success("ok"); });
        CHECK_THROWS_AS(
            reg.register_tool(sig, [](const ToolCall&) { return ToolOutcome::success("ok"); }),
            SpecOpsError);
    }

    TEST_CASE("observations are capped with an explicit marker") {
        CHECK(truncate_observation(std::string(kObservationCap, 'x')).size() == kObservationCap);
        const std::string big(kObservationCap + 100, 'y');
        const std::string cut = truncate_observation(big);
        CHECK(cut.size() == kObservationCap + 14);
        CHECK(cut.substr(cut.size() - 14) == "...[truncated]");

        Registry reg = demo_registry();
        ToolCall call;
        call.tool = "echo";
        call.args = Json{{"text", std::string(500, 'z')}, {"times", 10}};
        const ToolResult r = dispatch(reg, call);
        CHECK(r.observation.size() == kObservationCap + 14);
        CHECK(r.payload["length"] == 5000); // payload keeps the full data
    }

    TEST_CASE("retry_loop retries only retryable failures") {
        Registry reg = demo_registry();
        ToolCall reset;
        reset.tool = "reset_flaky";
        dispatch(reg, reset);

        ToolCall call;
        call.tool = "flaky";
        call.args = Json{{"succeed_on", 3}};
        const RetriedResult r = retry_loop(reg, call, 5);
        CHECK(r.result.ok());
        CHECK(r.attempts == 3);
        REQUIRE(r.attempt_statuses.size() == 3);
        CHECK(r.attempt_statuses[0] == ToolStatus::RetryableError);
        CHECK(r.attempt_statuses[1] == ToolStatus::RetryableError);
        CHECK(r.attempt_statuses[2] == ToolStatus::Ok);

        ToolCall fatal;
        fatal.tool = "boom";
        const RetriedResult f = retry_loop(reg, fatal, 5);
        CHECK(f.attempts == 1); // fatal errors are never auto-retried
        CHECK(f.result.fatal_kind == FatalKind::ScreenError);
    }

    TEST_CASE("exhaustion promotes the failure but keeps its payload") {
        Registry reg = demo_registry();
        ToolCall reset;
        reset.tool = "reset_flaky";
        dispatch(reg, reset);

        ToolCall call;
        call.tool = "flaky";
        call.args = Json{{"succeed_on", 99}};
        const RetriedResult r = retry_loop(reg, call, 3);
        CHECK(r.attempts == 3); // max_retries bounds TOTAL attempts
        CHECK(r.result.status == ToolStatus::FatalError);
        CHECK(r.result.fatal_kind == FatalKind::RetriesExhausted);
        CHECK(r.result.observation.find("transient glitch") != std::string::npos);
        CHECK(r.result.payload["fault"] == "network_down"); // fault attribution survives

        CHECK_THROWS_AS(retry_loop(reg, call, 0), SpecOpsError);
    }
}
