#pragma once

// Persistence: JSON documents (all carry schema_version), CSV with 17
// significant digits, atomic file writes and the on-disk profile store.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "henon/bifurcation.hpp"
#include "henon/radial.hpp"
#include "henon/rescale.hpp"
#include "henon/spectral.hpp"

namespace henon::io {

inline constexpr int schema_version = 1;

/// Shortest form is not used: always 17 significant digits, '.' separator.
std::string format_double(double x);

/// Joins already formatted cells with commas.
std::string csv_line(const std::vector<std::string>& cells);

std::string profile_to_json(const RadialProfile& profile, bool with_residuals = true);
/// Throws DomainError on malformed input or a schema mismatch.
RadialProfile profile_from_json(std::string_view text);

std::string rescaled_to_json(const RescaledProfile& rescaled);

struct SpectrumRow {
  double alpha = 0;
  double eps = 0;
  EigenResult eig;
};
std::string spectrum_csv(const std::vector<SpectrumRow>& rows);
std::string spectrum_json(const std::vector<SpectrumRow>& rows, std::string_view form);
std::string limit_json(const LimitEigen& limit);
std::string limit_csv(const LimitEigen& limit);

std::string bifurcation_json(const BifurcationResult& result);
std::string bifurcation_csv(const BifurcationResult& result);

struct SweepRow {
  int dim = 0;
  double alpha = 0;
  double eps = 0;
  double u0 = 0;
  double lambda1 = 0;
  double lambda2 = 0;
  double v1 = 0;
  double limit_distance = 0;
  std::string error;  ///< empty on success
};
/// Rows are sorted by (eps desc, alpha asc) before writing.
std::string sweep_csv(std::vector<SweepRow> rows);
std::string sweep_json(std::vector<SweepRow> rows);

/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

/// HENON_CACHE_DIR, else $XDG_CACHE_HOME/henon, else $HOME/.cache/henon.
std::filesystem::path default_cache_dir();

class DiskProfileStore : public ProfileStore {
 public:
  explicit DiskProfileStore(std::filesystem::path dir);
  std::shared_ptr<const RadialProfile> load(const std::string& key) override;
  void save(const std::string& key, const RadialProfile& profile) override;
  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// Flat "key = value" text; '#' starts a comment. Throws DomainError with the
/// line number on malformed lines.
std::map<std::string, std::string> parse_config(std::string_view text);

}  // namespace henon::io
