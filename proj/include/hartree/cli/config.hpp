#pragma once

#include <string>
#include <vector>

#include "hartree/io.hpp"
#include "hartree/params.hpp"

namespace hartree::cli {

using Json = io::Json;

/// Schema violation; `path()` names the offending field, e.g. "delaunay.periods[1]".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

const std::vector<std::string>& command_names();

/// Every key the tool accepts, with its default value and type.
Json default_config();

/// Overlays `patch` onto `base`. Keys and value types must already exist in `base`; arrays
/// and scalars are replaced whole, objects merge recursively.
Json merge_config(const Json& base, const Json& patch, const std::string& path = "");

/// Parses "a.b.c=value" into a patch. The value is read as JSON, or as a string if that fails.
Json set_patch(const std::string& assignment);

/// Checks ranges the type schema cannot express.
void validate_config(const Json& config);

/// Hash of the command and its config without the output directory, so relocated re-runs
/// carry the same hash.
std::string config_hash(const std::string& command, const Json& config);

ProblemParams params_of(const Json& config);

}  // namespace hartree::cli
