#include "prf/core_model.hpp"

#include "prf/error.hpp"

#include <charconv>

namespace prf {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Parse: return "parse error";
        case ErrorKind::Configuration: return "configuration error";
        case ErrorKind::Infrastructure: return "infrastructure error";
        case ErrorKind::Localization: return "localization error";
        case ErrorKind::Generation: return "generation error";
        case ErrorKind::PoolLoad: return "load error";
        case ErrorKind::Report: return "report error";
        case ErrorKind::Benchmark: return "benchmark error";
        case ErrorKind::Contract: return "contract violation";
    }
    return "error";
}

TestId::TestId(std::string name) : name_(std::move(name)) {
    if (name_.empty()) {
        throw Error(ErrorKind::Parse, "test id must not be empty");
    }
    if (name_.find_first_of("\r\n") != std::string::npos) {
        throw Error(ErrorKind::Parse, "test id contains a line break: '" + name_ + "'");
    }
}

const char* to_string(Granularity g) noexcept {
    switch (g) {
        case Granularity::File: return "FILE";
        case Granularity::Function: return "FUNCTION";
        case Granularity::Line: return "LINE";
        case Granularity::Off: return "OFF";
    }
    return "?";
}

const char* to_string(TestStatus s) noexcept {
    return s == TestStatus::Failing ? "FAILING" : "PASSING";
}

const char* to_string(FlStrategy s) noexcept {
    return s == FlStrategy::Ochiai ? "OCHIAI" : "TARANTULA";
}

const char* to_string(VerdictKind kind) noexcept {
    switch (kind) {
        case VerdictKind::Plausible: return "PLAUSIBLE";
        case VerdictKind::TestFailed: return "TEST_FAILED";
        case VerdictKind::TimedOut: return "TIMED_OUT";
        case VerdictKind::InfraError: return "INFRA_ERROR";
    }
    return "?";
}

VerdictKind parse_verdict_kind(std::string_view text) {
    for (auto k : {VerdictKind::Plausible, VerdictKind::TestFailed, VerdictKind::TimedOut,
                   VerdictKind::InfraError}) {
        if (text == to_string(k)) return k;
    }
    throw Error(ErrorKind::Parse, "unknown verdict kind '" + std::string(text) + "'");
}

namespace {

void check_field(std::string_view field, std::string_view what, std::string_view text) {
    if (field.empty()) {
        throw Error(ErrorKind::Parse, "empty " + std::string(what) + " in program element '" +
                                          std::string(text) + "'");
    }
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

ProgramElement ProgramElement::file(std::string path) {
    check_field(path, "file", path);
    if (path.find(':') != std::string::npos) {
        throw Error(ErrorKind::Parse, "file path must not contain ':': '" + path + "'");
    }
    ProgramElement e;
    e.file_ = std::move(path);
    e.granularity_ = Granularity::File;
    return e;
}

ProgramElement ProgramElement::function(std::string path, std::string function) {
    ProgramElement e = file(std::move(path));
    check_field(function, "function", function);
    if (function.find(':') != std::string::npos) {
        throw Error(ErrorKind::Parse, "function name must not contain ':': '" + function + "'");
    }
    e.function_ = std::move(function);
    e.granularity_ = Granularity::Function;
    return e;
}

ProgramElement ProgramElement::line(std::string path, std::string function, std::int64_t line) {
    ProgramElement e = ProgramElement::function(std::move(path), std::move(function));
    if (line <= 0) {
        throw Error(ErrorKind::Parse, "line number must be positive, got " + std::to_string(line));
    }
    e.line_ = line;
    e.granularity_ = Granularity::Line;
    return e;
}

ProgramElement ProgramElement::project(Granularity target) const {
    switch (target) {
        case Granularity::File:
            return file(file_);
        case Granularity::Function:
            if (granularity_ == Granularity::File) break;
            return function(file_, *function_);
        case Granularity::Line:
            if (granularity_ != Granularity::Line) break;
            return *this;
        case Granularity::Off:
            break;
    }
    throw Error(ErrorKind::Contract, std::string("cannot project '") + format() + "' to " +
                                         to_string(target));
}

std::string ProgramElement::format() const {
    std::string out = file_;
    if (function_) out += ':' + *function_;
    if (line_) out += ':' + std::to_string(*line_);
    return out;
}

ProgramElement parse_element(std::string_view raw, Granularity granularity) {
    const std::string_view text = trim(raw);
    if (text.empty()) {
        throw Error(ErrorKind::Parse, "empty program element");
    }

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto colon = text.find(':', start);
        fields.emplace_back(text.substr(start, colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }

    const auto expect = [&](std::size_t n) {
        if (fields.size() != n) {
            throw Error(ErrorKind::Parse,
                        "malformed " + std::string(to_string(granularity)) +
                            " element '" + std::string(text) + "': expected " +
                            std::to_string(n) + " field(s), got " + std::to_string(fields.size()));
        }
    };

    switch (granularity) {
        case Granularity::File:
            expect(1);
            return ProgramElement::file(fields[0]);
        case Granularity::Function:
            expect(2);
            return ProgramElement::function(fields[0], fields[1]);
        case Granularity::Line: {
            expect(3);
            std::int64_t line = 0;
            const auto& f = fields[2];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), line);
            if (ec != std::errc{} || ptr != f.data() + f.size() || f.empty()) {
                throw Error(ErrorKind::Parse, "malformed line number in program element '" +
                                                  std::string(text) + "'");
            }
            return ProgramElement::line(fields[0], fields[1], line);
        }
        case Granularity::Off:
            break;
    }
    throw Error(ErrorKind::Contract, "cannot parse a program element at granularity OFF");
}

ValidationVerdict::ValidationVerdict(std::string patch_id, VerdictKind kind,
                                     std::optional<TestId> culprit, std::int64_t tests_executed,
                                     std::int64_t wall_ms, std::string detail)
    : patch_id_(std::move(patch_id)),
      kind_(kind),
      culprit_(std::move(culprit)),
      tests_executed_(tests_executed),
      wall_ms_(wall_ms),
      detail_(std::move(detail)) {
    if (tests_executed_ < 0 || wall_ms_ < 0) {
        throw Error(ErrorKind::Contract, "verdict counters must be non-negative");
    }
}

ValidationVerdict ValidationVerdict::plausible(std::string patch_id, std::int64_t tests_executed,
                                               std::int64_t wall_ms) {
    return {std::move(patch_id), VerdictKind::Plausible, std::nullopt, tests_executed, wall_ms, {}};
}

ValidationVerdict ValidationVerdict::test_failed(std::string patch_id, TestId culprit,
                                                 std::int64_t tests_executed,
                                                 std::int64_t wall_ms) {
    return {std::move(patch_id), VerdictKind::TestFailed, std::move(culprit), tests_executed,
            wall_ms, {}};
}

ValidationVerdict ValidationVerdict::timed_out(std::string patch_id, TestId culprit,
                                               std::int64_t tests_executed, std::int64_t wall_ms) {
    return {std::move(patch_id), VerdictKind::TimedOut, std::move(culprit), tests_executed,
            wall_ms, {}};
}

ValidationVerdict ValidationVerdict::infra_error(std::string patch_id,
                                                 std::optional<TestId> culprit,
                                                 std::int64_t tests_executed, std::int64_t wall_ms,
                                                 std::string detail) {
    return {std::move(patch_id), VerdictKind::InfraError, std::move(culprit), tests_executed,
            wall_ms, std::move(detail)};
}

}  // namespace prf
