#include "specops/ui_toolkit.hpp"

#include <algorithm>
#include <fstream>

#include "specops/errors.hpp"

namespace specops::ui {

Frame::Frame(int rows, int cols) : cols_(cols) {
    if (rows < 1 || cols < 1) {
        throw SpecOpsError(ErrorCode::ScreenError, "frame dimensions must be positive");
    }
    grid_.assign(static_cast<std::size_t>(rows), std::string(static_cast<std::size_t>(cols), ' '));
}

void Frame::put(int row, int col, char c) {
    if (row < 0 || row >= rows() || col < 0 || col >= cols_) {
        throw SpecOpsError(ErrorCode::ScreenError, "cell out of bounds");
    }
    grid_[row][col] = c;
}

void Frame::write(int row, int col, const std::string& text) {
    if (row < 0 || row >= rows() || col < 0 || col >= cols_) {
        throw SpecOpsError(ErrorCode::ScreenError, "write origin out of bounds");
    }
    for (std::size_t i = 0; i < text.size(); ++i) {
        int c = col + static_cast<int>(i);
        if (c >= cols_) break;
        grid_[row][static_cast<std::size_t>(c)] = text[i];
    }
}

void Frame::clear_row(int row) {
    if (row < 0 || row >= rows()) {
        throw SpecOpsError(ErrorCode::ScreenError, "row out of bounds");
    }
    grid_[row].assign(static_cast<std::size_t>(cols_), ' ');
}

void Frame::clear() {
    for (auto& r : grid_) r.assign(static_cast<std::size_t>(cols_), ' ');
}

std::string Frame::dump() const {
    std::string out;
    out.reserve(grid_.size() * (static_cast<std::size_t>(cols_) + 1));
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (i > 0) out.push_back('\n');
        out += grid_[i];
    }
    return out;
}

std::vector<TextSpan> find_text(const Frame& frame, const std::string& target) {
    std::vector<TextSpan> spans;
    if (target.empty()) return spans;
    for (int r = 0; r < frame.rows(); ++r) {
        const std::string& row = frame.row(r);
        std::size_t pos = 0;
        while ((pos = row.find(target, pos)) != std::string::npos) {
            TextSpan span;
            span.text = target;
            span.row = r;
            span.col_start = static_cast<int>(pos);
            span.col_end = static_cast<int>(pos + target.size());
            span.span_id = "r" + std::to_string(r) + ":c" + std::to_string(span.col_start);
            spans.push_back(std::move(span));
            pos += target.size(); // non-overlapping
        }
    }
    return spans;
}

const char* capture_trigger_name(CaptureTrigger t) {
    switch (t) {
        case CaptureTrigger::Change: return "change";
        case CaptureTrigger::PhaseBoundary: return "phase_boundary";
        case CaptureTrigger::Manual: return "manual";
    }
    return "unknown";
}

Json PositionHint::to_json() const {
    Json j;
    switch (relation) {
        case HintRelation::Above: j["relation"] = "above"; break;
        case HintRelation::Below: j["relation"] = "below"; break;
        case HintRelation::LeftOf: j["relation"] = "left_of"; break;
        case HintRelation::RightOf: j["relation"] = "right_of"; break;
        case HintRelation::Nth: j["relation"] = "nth"; break;
    }
    if (relation == HintRelation::Nth) {
        j["ordinal"] = ordinal;
    } else {
        j["anchor"] = anchor;
    }
    return j;
}

PositionHint PositionHint::from_json(const Json& j) {
    PositionHint hint;
    const std::string rel = j.at("relation").get<std::string>();
    if (rel == "above") hint.relation = HintRelation::Above;
    else if (rel == "below") hint.relation = HintRelation::Below;
    else if (rel == "left_of") hint.relation = HintRelation::LeftOf;
    else if (rel == "right_of") hint.relation = HintRelation::RightOf;
    else if (rel == "nth") hint.relation = HintRelation::Nth;
    else throw SpecOpsError(ErrorCode::ConfigError, "unknown hint relation '" + rel + "'");
    if (hint.relation == HintRelation::Nth) {
        hint.ordinal = j.at("ordinal").get<int>();
    } else {
        hint.anchor = j.at("anchor").get<std::string>();
    }
    return hint;
}

Screen::Screen(std::shared_ptr<LogicalClock> clock) : clock_(std::move(clock)) {
    if (!clock_) {
        throw SpecOpsError(ErrorCode::ConfigError, "screen requires a clock");
    }
}

void Screen::open_session() {
    if (session_open_) {
        throw SpecOpsError(ErrorCode::ScreenError, "capture session already open");
    }
    session_open_ = true;
    dropped_ = false;
    next_seq_ = 0;
    captures_.clear();
    // The baseline frame anchors the session: every later change capture is
    // interpreted relative to it.
    last_captured_ = frame();
    append_capture(CaptureTrigger::Manual);
}

void Screen::close_session() {
    session_open_ = false;
}

void Screen::capture_now(CaptureTrigger trigger) {
    if (!session_open_) {
        throw SpecOpsError(ErrorCode::ScreenError, "no open capture session");
    }
    last_captured_ = frame();
    append_capture(trigger);
}

int Screen::last_capture_seq() const {
    return captures_.empty() ? -1 : captures_.back().seq;
}

void Screen::note_frame_changed() {
    if (!session_open_) return;
    if (frame() == last_captured_) return;
    last_captured_ = frame();
    append_capture(CaptureTrigger::Change);
}

void Screen::append_capture(CaptureTrigger trigger) {
    if (static_cast<int>(captures_.size()) >= kMaxSessionCaptures) {
        dropped_ = true;
        return;
    }
    ScreenCapture cap;
    cap.seq = next_seq_++;
    cap.timestamp = clock_->now();
    cap.frame = last_captured_;
    cap.trigger = trigger;
    captures_.push_back(std::move(cap));
}

VirtualTerminal::VirtualTerminal(std::shared_ptr<LogicalClock> clock, int rows, int cols)
    : Screen(std::move(clock)), frame_(rows, cols) {}

InputField* VirtualTerminal::find_field(const std::string& id) {
    for (auto& f : fields_) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

void VirtualTerminal::render_field(const InputField& field) {
    std::string shown = field.content.substr(0, static_cast<std::size_t>(field.width));
    shown.resize(static_cast<std::size_t>(field.width), ' ');
    frame_.write(field.row, field.col, shown);
}

void VirtualTerminal::click(int row, int col) {
    if (row < 0 || row >= frame_.rows() || col < 0 || col >= frame_.cols()) {
        throw SpecOpsError(ErrorCode::ScreenError, "click outside the screen");
    }
    focus_.reset();
    for (const auto& f : fields_) {
        if (row == f.row && col >= f.click_col_start && col < f.click_col_end) {
            focus_ = f.id;
            break;
        }
    }
}

void VirtualTerminal::send_keys(const std::string& text) {
    if (!focus_) return; // keys land nowhere; the frame stays as-is
    for (char c : text) {
        InputField* field = find_field(*focus_);
        if (!field) { // field was removed while focused
            focus_.reset();
            return;
        }
        if (c == '\n') {
            if (on_submit_) {
                // the handler may clear or redefine the field, so it must not
                // receive references into live field storage
                const std::string id = field->id;
                const std::string submitted = field->content;
                on_submit_(id, submitted);
            }
            continue;
        }
        if (static_cast<int>(field->content.size()) >= field->width) {
            continue; // full field drops further input
        }
        field->content.push_back(c);
        render_field(*field);
        note_frame_changed();
    }
}

void VirtualTerminal::draw_text(int row, int col, const std::string& text) {
    frame_.write(row, col, text);
    note_frame_changed();
}

void VirtualTerminal::clear_row(int row) {
    frame_.clear_row(row);
    note_frame_changed();
}

void VirtualTerminal::clear_all() {
    frame_.clear();
    note_frame_changed();
}

void VirtualTerminal::define_field(InputField field) {
    if (field.row < 0 || field.row >= frame_.rows() || field.col < 0 ||
        field.col + field.width > frame_.cols() || field.width < 1) {
        throw SpecOpsError(ErrorCode::ScreenError, "field does not fit the screen");
    }
    if (find_field(field.id)) {
        throw SpecOpsError(ErrorCode::ScreenError, "duplicate field id '" + field.id + "'");
    }
    if (field.click_col_end <= field.click_col_start) {
        field.click_col_start = field.col;
        field.click_col_end = field.col + field.width;
    }
    fields_.push_back(std::move(field));
    render_field(fields_.back());
    note_frame_changed();
}

void VirtualTerminal::set_field_content(const std::string& id, const std::string& content) {
    InputField* field = find_field(id);
    if (!field) {
        throw SpecOpsError(ErrorCode::ScreenError, "unknown field '" + id + "'");
    }
    field->content = content.substr(0, static_cast<std::size_t>(field->width));
    render_field(*field);
    note_frame_changed();
}

std::string VirtualTerminal::field_content(const std::string& id) const {
    for (const auto& f : fields_) {
        if (f.id == id) return f.content;
    }
    throw SpecOpsError(ErrorCode::ScreenError, "unknown field '" + id + "'");
}

void VirtualTerminal::focus_field(const std::string& id) {
    if (!find_field(id)) {
        throw SpecOpsError(ErrorCode::ScreenError, "unknown field '" + id + "'");
    }
    focus_ = id;
}

void VirtualTerminal::blit(const Frame& frame) {
    if (frame.rows() != frame_.rows() || frame.cols() != frame_.cols()) {
        throw SpecOpsError(ErrorCode::ScreenError, "blit dimensions do not match the screen");
    }
    frame_ = frame;
    note_frame_changed();
}

FrameFeedScreen::FrameFeedScreen(std::shared_ptr<LogicalClock> clock, int rows, int cols)
    : Screen(std::move(clock)), frame_(rows, cols) {}

void FrameFeedScreen::click(int, int) {
    throw SpecOpsError(ErrorCode::ScreenError, "frame feed screen cannot deliver clicks");
}

void FrameFeedScreen::send_keys(const std::string&) {
    throw SpecOpsError(ErrorCode::ScreenError, "frame feed screen cannot deliver keys");
}

void FrameFeedScreen::feed(const Frame& frame) {
    if (frame.rows() != frame_.rows() || frame.cols() != frame_.cols()) {
        throw SpecOpsError(ErrorCode::ScreenError, "fed frame dimensions do not match the screen");
    }
    frame_ = frame;
    note_frame_changed();
}

bool frame_diff_contains(const Frame& before, const Frame& after, const std::string& text) {
    if (text.empty()) return true;
    if (before.rows() != after.rows() || before.cols() != after.cols()) {
        throw SpecOpsError(ErrorCode::ScreenError, "frames have different dimensions");
    }
    // The changed region of a row is the span from its first to its last
    // differing cell. Unchanged cells inside the span stay part of the
    // text: a typed space over a blank cell changes nothing, yet it still
    // separates the words around it.
    for (int r = 0; r < after.rows(); ++r) {
        int first = -1;
        int last = -1;
        for (int c = 0; c < after.cols(); ++c) {
            if (after.at(r, c) != before.at(r, c)) {
                if (first < 0) first = c;
                last = c;
            }
        }
        if (first < 0) continue;
        const std::string& row = after.row(r);
        if (row.substr(static_cast<std::size_t>(first),
                       static_cast<std::size_t>(last - first + 1))
                .find(text) != std::string::npos) {
            return true;
        }
    }
    return false;
}

TypeResult type_verified(Screen& screen, const std::string& text) {
    TypeResult result;
    if (text.empty()) {
        result.status = TypeStatus::Ok;
        result.feedback = "nothing to type";
        return result;
    }
    const Frame before = screen.frame();
    screen.send_keys(text);
    const Frame& after = screen.frame();
    if (after == before) {
        result.status = TypeStatus::NeedsFocus;
        result.feedback = "no visible change after typing; select an input field first";
        return result;
    }
    std::string expected = text;
    expected.erase(std::remove(expected.begin(), expected.end(), '\n'), expected.end());
    if (expected.empty() || frame_diff_contains(before, after, expected)) {
        result.status = TypeStatus::Ok;
        result.feedback = "typed text verified on screen";
        return result;
    }
    result.status = TypeStatus::VerificationFailed;
    result.feedback = "typed text is not fully visible; input may have been truncated or transformed";
    return result;
}

namespace {

std::vector<TextSpan> apply_hint(const Frame& frame, const std::vector<TextSpan>& matches,
                                 const PositionHint& hint) {
    if (hint.relation == HintRelation::Nth) {
        if (hint.ordinal < 1 || hint.ordinal > static_cast<int>(matches.size())) {
            return {};
        }
        return {matches[static_cast<std::size_t>(hint.ordinal - 1)]};
    }
    const auto anchors = find_text(frame, hint.anchor);
    if (anchors.empty()) return {};
    const TextSpan& anchor = anchors.front();
    std::vector<TextSpan> kept;
    for (const auto& span : matches) {
        bool keep = false;
        switch (hint.relation) {
            case HintRelation::Above: keep = span.row < anchor.row; break;
            case HintRelation::Below: keep = span.row > anchor.row; break;
            case HintRelation::LeftOf:
                keep = span.row == anchor.row && span.col_end <= anchor.col_start;
                break;
            case HintRelation::RightOf:
                keep = span.row == anchor.row && span.col_start >= anchor.col_end;
                break;
            case HintRelation::Nth: break;
        }
        if (keep) kept.push_back(span);
    }
    return kept;
}

} // namespace

ClickResult click_text(Screen& screen, const std::string& target,
                       const std::optional<PositionHint>& hint) {
    ClickResult result;
    auto matches = find_text(screen.frame(), target);
    if (hint) {
        matches = apply_hint(screen.frame(), matches, *hint);
    }
    result.match_count = static_cast<int>(matches.size());
    if (matches.empty()) {
        result.status = ClickStatus::NotFound;
        return result;
    }
    if (matches.size() > 1) {
        result.status = ClickStatus::Ambiguous; // never guess between candidates
        return result;
    }
    const TextSpan& span = matches.front();
    screen.click(span.row, (span.col_start + span.col_end - 1) / 2);
    result.status = ClickStatus::Ok;
    result.span_id = span.span_id;
    result.match_count = 1;
    return result;
}

WatchResult watch_changes(const Screen& screen) {
    WatchResult result;
    result.captures = screen.captures();
    result.truncated = screen.captures_dropped();
    return result;
}

void save_captures(const std::filesystem::path& dir, const std::vector<ScreenCapture>& captures) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw SpecOpsError(ErrorCode::IoError, "cannot create capture directory " + dir.string());
    }
    Json index = Json::array();
    for (const auto& cap : captures) {
        char name[16];
        std::snprintf(name, sizeof(name), "%03d.txt", cap.seq);
        const auto path = dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw SpecOpsError(ErrorCode::IoError, "cannot write capture " + path.string());
        }
        out << cap.frame.dump() << '\n';
        Json entry;
        entry["seq"] = cap.seq;
        entry["timestamp"] = cap.timestamp;
        entry["trigger"] = capture_trigger_name(cap.trigger);
        entry["path"] = name;
        index.push_back(std::move(entry));
    }
    save_json_file(dir / "index.json", index);
}

} // namespace specops::ui
