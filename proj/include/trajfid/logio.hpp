#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "trajfid/workflow.hpp"

namespace trajfid {

// ---------------------------------------------------------------------------
// Run logs (JSON Lines)
//
// One object per line:
//   {"run_id":"r1","model":"m","scenario":"T3","repeat":0,
//    "trajectory":["CPA","PaySup"],"success":true,"meta":{"k":"v"}}
// `meta` is optional. The first non-empty line may instead be the version
// guard {"format_version":"1"}. Blank lines are skipped; unknown keys ignored.
// ---------------------------------------------------------------------------

enum class LineErrorKind { syntax, schema };

struct LineError {
  std::size_t line = 0;  // 1-based
  LineErrorKind kind = LineErrorKind::schema;
  std::string message;

  std::string describe() const;
};

struct LogEntry {
  std::size_t line = 0;
  RunRecord record;
};

// Streaming reader: holds one line at a time plus the set of run ids seen.
// In strict mode the first bad line throws (ParseError for syntax,
// ValidationError for schema); otherwise bad lines are recorded in errors()
// and skipped.
class RunLogReader {
 public:
  RunLogReader(std::istream& in, bool strict = true);

  std::optional<LogEntry> next();

  const std::vector<LineError>& errors() const noexcept { return errors_; }
  std::size_t lines_read() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  bool strict_;
  std::size_t line_no_ = 0;
  bool seen_content_ = false;
  std::unordered_set<std::string> run_ids_;
  std::vector<LineError> errors_;
};

struct RunLog {
  std::vector<RunRecord> records;
  std::vector<std::size_t> lines;  // source line of each record
  std::vector<LineError> errors;   // non-strict mode only
};

RunLog parse_run_log(std::istream& in, bool strict = true);
RunLog parse_run_log(std::string_view text, bool strict = true);
RunLog read_run_log_file(const std::filesystem::path& path, bool strict = true);

// Fixed key order, compact separators, LF after every record.
std::string format_run_record(const RunRecord& record);

struct WriteOptions {
  bool version_header = false;
};

void write_run_log(std::span<const RunRecord> records, std::ostream& out,
                   WriteOptions options = {});
void write_run_log_file(std::span<const RunRecord> records, const std::filesystem::path& path,
                        WriteOptions options = {});

// ---------------------------------------------------------------------------
// Workflow documents and profile lists (single JSON documents)
// ---------------------------------------------------------------------------

// Throws ParseError on malformed JSON, ValidationError (with a JSON-pointer
// style path) on schema or cross-reference violations.
WorkflowSpec parse_workflow_spec(std::string_view text);
WorkflowSpec read_workflow_spec_file(const std::filesystem::path& path);

// Accepts either a JSON array of profiles or {"profiles": [...]}.
std::vector<ModelProfile> parse_profiles(std::string_view text);
std::vector<ModelProfile> read_profiles_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace trajfid
