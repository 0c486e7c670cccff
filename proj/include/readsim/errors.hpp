#pragma once

#include <stdexcept>
#include <string>

namespace readsim {

// Base of every error raised by the library. `kind()` is a stable tag used
// by the CLI to pick exit codes and by tests to match failure modes.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define READSIM_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  }

READSIM_DEFINE_ERROR(EmptyText);
READSIM_DEFINE_ERROR(InvalidFixation);
READSIM_DEFINE_ERROR(NoCandidates);
READSIM_DEFINE_ERROR(ObservationMismatch);
READSIM_DEFINE_ERROR(InvalidDuration);
READSIM_DEFINE_ERROR(EpisodeFinished);
READSIM_DEFINE_ERROR(ShapeMismatch);
READSIM_DEFINE_ERROR(EmptyBuffer);
READSIM_DEFINE_ERROR(TrainingDiverged);
READSIM_DEFINE_ERROR(EmptyScanpath);
READSIM_DEFINE_ERROR(NoPairs);
READSIM_DEFINE_ERROR(HashMismatch);
READSIM_DEFINE_ERROR(DataError);

#undef READSIM_DEFINE_ERROR

// Configuration problems carry the dotted key path that caused them.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error("ConfigError", key.empty() ? what : key + ": " + what),
        key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Malformed scanpath input; `line()` is 1-based.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& what)
      : Error("SchemaError", "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace readsim
