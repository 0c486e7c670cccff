#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "readsim/reading_env.hpp"

namespace readsim {

// One JSON object per line:
// {"trial_id","condition_s","seed"?,"recall"?,"text"?,"events":[{"t_ms","word","letter","action","dur_ms"}]}
// Times are written rounded to 1e-3 ms. Unknown keys are ignored on input.
std::string scanpath_to_json_line(const Scanpath& scanpath);

// Blank lines are skipped. Throws SchemaError with the 1-based line number.
std::vector<Scanpath> parse_scanpaths_jsonl(std::istream& in);
std::vector<Scanpath> load_scanpaths_jsonl(const std::filesystem::path& path);

// Whole-file helpers; failures raise DataError naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace readsim
