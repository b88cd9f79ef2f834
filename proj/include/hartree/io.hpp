#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hartree/asymptotics.hpp"
#include "hartree/constants.hpp"
#include "hartree/cylinder.hpp"
#include "hartree/delaunay.hpp"
#include "hartree/moving_spheres.hpp"
#include "hartree/radial.hpp"
#include "hartree/riesz.hpp"

namespace hartree::io {

using Json = nlohmann::ordered_json;

/// "%.17g", which reads back to the same double.
std::string format_double(double x);

/// FNV-1a, 64 bit, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// CSV with a "# config_hash=<hash>" first line, a header row, and one row per index.
/// Every column must have the same length.
std::string csv_table(const std::vector<std::string>& header, const std::vector<Eigen::VectorXd>& columns,
                      const std::string& config_hash);

/// Writes bytes verbatim, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

/// Stable JSON text: two-space indent and a trailing newline.
std::string dump(const Json& j);

Json to_json(const Eigen::VectorXd& v);
Json to_json(const SharpConstants& c);
Json to_json(const ResidualReport& r);
Json to_json(const HlsCheck& h);
Json to_json(const DispersionRoot& d);
Json to_json(const DelaunaySolution& s);
Json to_json(const KernelSpotCheck& k);
Json to_json(const ComparisonReport& r);
Json to_json(const CriticalRadius& c);
Json to_json(const EqualityFit& f);
Json to_json(const UpperBoundScan& s);
Json to_json(const SymmetryScan& s);
Json to_json(const ProfileFit& f);

std::string profile_csv(const RadialProfile& u, const std::string& config_hash);
std::string profile_csv(const CylinderProfile& U, const std::string& config_hash);

}  // namespace hartree::io
