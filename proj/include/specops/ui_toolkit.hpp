#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "specops/clock.hpp"
#include "specops/json_util.hpp"

namespace specops::ui {

/// A rows x cols character grid. Every row string has exactly `cols`
/// characters; cells outside any drawn text hold spaces.
class Frame {
public:
    Frame() = default;
    Frame(int rows, int cols);

    int rows() const { return static_cast<int>(grid_.size()); }
    int cols() const { return cols_; }
    char at(int row, int col) const { return grid_[row][col]; }
    const std::string& row(int index) const { return grid_[index]; }

    void put(int row, int col, char c);
    void write(int row, int col, const std::string& text); // clipped at the right edge
    void clear_row(int row);
    void clear();

    std::string dump() const; // rows joined by '\n', trailing spaces kept

    bool operator==(const Frame&) const = default;

private:
    int cols_ = 0;
    std::vector<std::string> grid_;
};

struct TextSpan {
    std::string text;
    int row = 0;
    int col_start = 0;
    int col_end = 0; // exclusive
    std::string span_id;

    bool operator==(const TextSpan&) const = default;
};

/// All occurrences of `target` in the frame, row-major, non-overlapping
/// (leftmost-first within a row). Span ids are positional and stable for a
/// given frame.
std::vector<TextSpan> find_text(const Frame& frame, const std::string& target);

enum class CaptureTrigger { Change, PhaseBoundary, Manual };
const char* capture_trigger_name(CaptureTrigger t);

struct ScreenCapture {
    int seq = 0;
    std::int64_t timestamp = 0;
    Frame frame;
    CaptureTrigger trigger = CaptureTrigger::Change;
};

enum class HintRelation { Above, Below, LeftOf, RightOf, Nth };

struct PositionHint {
    HintRelation relation = HintRelation::Nth;
    std::string anchor; // required for directional relations
    int ordinal = 0;    // 1-based, required for Nth

    Json to_json() const;
    static PositionHint from_json(const Json& j);
};

/// Rendering surface plus the capture pipeline. One writer per session;
/// every mutation that changes the visible frame is observed here.
class Screen {
public:
    explicit Screen(std::shared_ptr<LogicalClock> clock);
    virtual ~Screen() = default;

    virtual const Frame& frame() const = 0;
    virtual std::optional<std::string> focused_field() const = 0;
    virtual void click(int row, int col) = 0;
    virtual void send_keys(const std::string& text) = 0;

    // -- capture session ----------------------------------------------------
    /// Sessions cap out at this many captures; later ones are dropped and the
    /// drop is flagged rather than silently losing the tail unnoticed.
    static constexpr int kMaxSessionCaptures = 512;

    void open_session();
    void close_session();
    bool session_open() const { return session_open_; }
    /// Snapshot the current frame unconditionally (phase boundaries, manual).
    void capture_now(CaptureTrigger trigger);
    const std::vector<ScreenCapture>& captures() const { return captures_; }
    int last_capture_seq() const;
    bool captures_dropped() const { return dropped_; }

    LogicalClock& clock() { return *clock_; }

protected:
    /// Derived classes call this after any mutation; a capture is appended
    /// only when the frame differs from the last captured one.
    void note_frame_changed();

private:
    void append_capture(CaptureTrigger trigger);

    std::shared_ptr<LogicalClock> clock_;
    bool session_open_ = false;
    bool dropped_ = false;
    int next_seq_ = 0;
    Frame last_captured_;
    std::vector<ScreenCapture> captures_;
};

/// One single-line input region. The label area (if any) and the input area
/// form the clickable rect; typed characters render into the input area and
/// are dropped once `width` is reached.
struct InputField {
    std::string id;
    int row = 0;
    int col = 0;      // first column of the input area
    int width = 0;    // max content length
    int click_col_start = 0;
    int click_col_end = 0; // exclusive
    std::string content;
};

/// Reference backend: an in-memory terminal grid with clickable input
/// fields. Deterministic, so typing verification is exact.
class VirtualTerminal : public Screen {
public:
    static constexpr int kDefaultRows = 40;
    static constexpr int kDefaultCols = 120;

    VirtualTerminal(std::shared_ptr<LogicalClock> clock, int rows = kDefaultRows, int cols = kDefaultCols);

    const Frame& frame() const override { return frame_; }
    std::optional<std::string> focused_field() const override { return focus_; }
    void click(int row, int col) override;
    void send_keys(const std::string& text) override;

    // -- drawing API for hosted applications ---------------------------------
    void draw_text(int row, int col, const std::string& text);
    void clear_row(int row);
    void clear_all();
    void define_field(InputField field);
    void set_field_content(const std::string& id, const std::string& content);
    std::string field_content(const std::string& id) const;
    void focus_field(const std::string& id);
    /// Replaces the whole frame (used by frame-replay drivers).
    void blit(const Frame& frame);

    using SubmitHandler = std::function<void(const std::string& field_id, const std::string& content)>;
    void on_submit(SubmitHandler handler) { on_submit_ = std::move(handler); }

private:
    InputField* find_field(const std::string& id);
    void render_field(const InputField& field);

    Frame frame_;
    std::vector<InputField> fields_;
    std::optional<std::string> focus_;
    SubmitHandler on_submit_;
};

/// Stub adapter for real displays: accepts externally captured frames but
/// supports no input delivery. Span extraction quality is the adapter's
/// problem; the capture pipeline behaves identically.
class FrameFeedScreen : public Screen {
public:
    FrameFeedScreen(std::shared_ptr<LogicalClock> clock, int rows, int cols);

    const Frame& frame() const override { return frame_; }
    std::optional<std::string> focused_field() const override { return std::nullopt; }
    void click(int row, int col) override;           // throws ScreenError
    void send_keys(const std::string& text) override; // throws ScreenError

    void feed(const Frame& frame);

private:
    Frame frame_;
};

enum class TypeStatus { Ok, NeedsFocus, VerificationFailed };

struct TypeResult {
    TypeStatus status = TypeStatus::Ok;
    std::string feedback;

    bool ok() const { return status == TypeStatus::Ok; }
};

/// Sends keystrokes and verifies against the frame diff: Ok iff the typed
/// text appears in full inside some row's changed region. An unchanged frame
/// means nothing accepted the keys (NeedsFocus); a changed frame without the
/// full text is VerificationFailed (e.g. a field truncated the input).
TypeResult type_verified(Screen& screen, const std::string& text);

/// The verification predicate by itself, exposed for oracle-style checks:
/// true iff `text` occurs in some row between that row's first and last
/// changed cell (bounds inclusive; unchanged cells inside the span count,
/// which is what lets typed spaces over blank cells verify).
bool frame_diff_contains(const Frame& before, const Frame& after, const std::string& text);

enum class ClickStatus { Ok, Ambiguous, NotFound };

struct ClickResult {
    ClickStatus status = ClickStatus::NotFound;
    std::string span_id;
    int match_count = 0;

    bool ok() const { return status == ClickStatus::Ok; }
};

/// Clicks the span matching `target`. With several matches and no hint the
/// result is Ambiguous and nothing is clicked; hints narrow by ordinal
/// (row-major, 1-based) or position relative to an anchor text.
ClickResult click_text(Screen& screen, const std::string& target,
                       const std::optional<PositionHint>& hint = std::nullopt);

struct WatchResult {
    std::vector<ScreenCapture> captures;
    bool truncated = false; // session closed mid-watch
};

/// Ordered change captures accumulated in the screen's session so far.
WatchResult watch_changes(const Screen& screen);

/// Persists captures as numbered grid dumps plus a JSON index
/// {seq, timestamp, trigger, path}.
void save_captures(const std::filesystem::path& dir, const std::vector<ScreenCapture>& captures);

} // namespace specops::ui
