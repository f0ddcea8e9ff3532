#include "henon/io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "henon/errors.hpp"
#include "json.hpp"

namespace henon::io {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

namespace {

json params_json(const ProblemParams& p) {
  return {{"N", p.dim()}, {"alpha", p.alpha()}, {"eps", p.eps()}, {"p", p.exponent()}, {"p_alpha", p.threshold()}};
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json eigen_json(const EigenResult& e, bool with_function) {
  json j{{"j", e.j},
         {"lambda", e.lambda},
         {"node_count", e.node_count},
         {"error_estimate", e.error_estimate},
         {"grid_sizes", e.grid_sizes},
         {"raw", e.raw}};
  if (with_function) {
    j["r"] = e.r;
    j["z"] = e.z;
  }
  return j;
}

template <class T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw DomainError(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad field '") + name + "': " + e.what());
  }
}

}  // namespace

std::string profile_to_json(const RadialProfile& profile, bool with_residuals) {
  const auto& t = profile.table();
  json j{{"schema_version", schema_version},
         {"kind", "profile"},
         {"params", params_json(profile.params())},
         {"grid", profile.grid()},
         {"u", profile.u()},
         {"du", profile.du()},
         {"u0", profile.u0()},
         {"mu", profile.mu()},
         {"first_zero_raw", profile.first_zero_raw()},
         {"integrator_tol", profile.integrator_tol()},
         {"table",
          {{"log_start", t.log_start}, {"log_step", t.log_step}, {"r", t.r}, {"u", t.u}, {"du", t.du}, {"d2u", t.d2u}}}};
  if (with_residuals) {
    j["residuals"] = {{"fowler", fowler_check(profile)},
                      {"ode", ode_residual(profile)},
                      {"decay_margin", decay_bound_check(profile)},
                      {"u_at_1", profile.u().back()},
                      {"du_at_1", profile.du().back()}};
  }
  return j.dump(1);
}

RadialProfile profile_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("profile JSON does not parse: ") + e.what());
  }
  if (field<int>(j, "schema_version") != schema_version) throw DomainError("unsupported profile schema version");
  if (field<std::string>(j, "kind") != "profile") throw DomainError("document is not a profile");
  const auto& p = j.at("params");
  ProblemParams params(field<int>(p, "N"), field<double>(p, "alpha"), field<double>(p, "eps"));
  const auto& t = j.at("table");
  ProfileTable table{field<double>(t, "log_start"),        field<double>(t, "log_step"),
                     field<std::vector<double>>(t, "r"),   field<std::vector<double>>(t, "u"),
                     field<std::vector<double>>(t, "du"),  field<std::vector<double>>(t, "d2u")};
  return RadialProfile(params, field<std::vector<double>>(j, "grid"), field<std::vector<double>>(j, "u"),
                       field<std::vector<double>>(j, "du"), field<double>(j, "u0"), field<double>(j, "first_zero_raw"),
                       field<double>(j, "integrator_tol"), std::move(table));
}

std::string rescaled_to_json(const RescaledProfile& r) {
  json j{{"schema_version", schema_version},
         {"kind", "rescaled"},
         {"params", params_json(r.params())},
         {"rho_eps", r.rho_eps()},
         {"kappa", r.kappa()},
         {"w0", r.w0()},
         {"lambda", limit_lambda(r.params().dim(), r.params().alpha())},
         {"grid", r.grid()},
         {"w", r.w()},
         {"limit_distance", limit_distance(r)},
         {"uniform_bound_constant", uniform_bound_constant(r)},
         {"kappa_relation_residual", kappa_relation_residual(r)},
         {"pde_residual", rescaled_residual(r)}};
  return j.dump(1);
}

std::string spectrum_csv(const std::vector<SpectrumRow>& rows) {
  std::string out = "alpha,eps,j,lambda,node_count,error_estimate\n";
  for (const auto& r : rows)
    out += csv_line({format_double(r.alpha), format_double(r.eps), std::to_string(r.eig.j), format_double(r.eig.lambda),
                     std::to_string(r.eig.node_count), format_double(r.eig.error_estimate)});
  return out;
}

std::string spectrum_json(const std::vector<SpectrumRow>& rows, std::string_view form) {
  json arr = json::array();
  for (const auto& r : rows) {
    auto e = eigen_json(r.eig, false);
    e["alpha"] = r.alpha;
    e["eps"] = r.eps;
    arr.push_back(std::move(e));
  }
  return json{{"schema_version", schema_version}, {"kind", "spectrum"}, {"form", form}, {"rows", arr}}.dump(1);
}

std::string limit_json(const LimitEigen& l) {
  json at_r = json::array(), at_2r = json::array();
  for (const auto& e : l.at_r) at_r.push_back(eigen_json(e, false));
  for (const auto& e : l.at_2r) at_2r.push_back(eigen_json(e, false));
  return json{{"schema_version", schema_version},
              {"kind", "limit_spectrum"},
              {"N", l.dim},
              {"alpha", l.alpha},
              {"r_trunc", l.r_trunc},
              {"lambda1", l.lambda1},
              {"lambda2", l.lambda2},
              {"lambda1_closed", lambda1_closed(l.dim, l.alpha)},
              {"error1", l.error1},
              {"error2", l.error2},
              {"sensitivity1", l.sensitivity1},
              {"sensitivity2", l.sensitivity2},
              {"at_r", at_r},
              {"at_2r", at_2r}}
      .dump(1);
}

std::string limit_csv(const LimitEigen& l) {
  std::string out = "alpha,eps,j,lambda,node_count,error_estimate\n";
  const double lam[2] = {l.lambda1, l.lambda2};
  const double err[2] = {std::max(l.error1, l.sensitivity1), std::max(l.error2, l.sensitivity2)};
  for (int j = 0; j < 2; ++j)
    out += csv_line({format_double(l.alpha), "0", std::to_string(j + 1), format_double(lam[j]),
                     std::to_string(l.at_2r[j].node_count), format_double(err[j])});
  return out;
}

std::string bifurcation_json(const BifurcationResult& r) {
  json pts = json::array();
  for (const auto& p : r.points)
    pts.push_back({{"alpha_k_eps", p.alpha_k_eps},
                   {"offset", p.offset},
                   {"residual", p.residual},
                   {"residual_deviation", p.residual_deviation},
                   {"bracket", {p.lo, p.hi}}});
  json scan = json::array();
  for (const auto& s : r.scan)
    scan.push_back({{"alpha", s.alpha},
                    {"lambda1", s.lambda1},
                    {"direct", s.direct},
                    {"error_estimate", s.error_estimate},
                    {"deviation", s.deviation}});
  return json{{"schema_version", schema_version},
              {"kind", "bifurcation"},
              {"N", r.dim},
              {"eps", r.eps},
              {"k", r.k},
              {"alpha_k", bifurcation_alpha(r.k)},
              {"sigma_k", sphere_eigen(r.dim, r.k).sigma},
              {"bracket", {r.lo, r.hi}},
              {"points", pts},
              {"non_unique", r.non_unique},
              {"exclusion_ok", r.exclusion_ok},
              {"excluded_crossings", r.excluded_crossings},
              {"scan", scan}}
      .dump(1);
}

std::string bifurcation_csv(const BifurcationResult& r) {
  std::string out = "N,k,eps,alpha_k_eps,offset,residual,lo,hi,non_unique\n";
  for (const auto& p : r.points)
    out += csv_line({std::to_string(r.dim), std::to_string(r.k), format_double(r.eps), format_double(p.alpha_k_eps),
                     format_double(p.offset), format_double(p.residual), format_double(p.lo), format_double(p.hi),
                     r.non_unique ? "1" : "0"});
  return out;
}

namespace {

void sort_sweep(std::vector<SweepRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.eps != b.eps) return a.eps > b.eps;
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    return a.dim < b.dim;
  });
}

std::string csv_text(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

std::string sweep_csv(std::vector<SweepRow> rows) {
  sort_sweep(rows);
  std::string out = "N,alpha,eps,u0,lambda1,lambda2,v1,limit_distance,error\n";
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      out += csv_line({std::to_string(r.dim), format_double(r.alpha), format_double(r.eps), "", "", "", "", "",
                       csv_text(r.error)});
      continue;
    }
    out += csv_line({std::to_string(r.dim), format_double(r.alpha), format_double(r.eps), format_double(r.u0),
                     format_double(r.lambda1), format_double(r.lambda2), format_double(r.v1),
                     format_double(r.limit_distance), ""});
  }
  return out;
}

std::string sweep_json(std::vector<SweepRow> rows) {
  sort_sweep(rows);
  json arr = json::array();
  for (const auto& r : rows) {
    json row{{"N", r.dim}, {"alpha", r.alpha}, {"eps", r.eps}};
    if (r.error.empty()) {
      row["u0"] = r.u0;
      row["lambda1"] = r.lambda1;
      row["lambda2"] = r.lambda2;
      row["v1"] = r.v1;
      row["limit_distance"] = finite_or_null(r.limit_distance);
      row["error"] = nullptr;
    } else {
      row["error"] = r.error;
    }
    arr.push_back(std::move(row));
  }
  return json{{"schema_version", schema_version}, {"kind", "sweep"}, {"rows", arr}}.dump(1);
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  auto tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()) + "." +
                    std::to_string(counter.fetch_add(1)));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      f.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::filesystem::path default_cache_dir() {
  if (const char* d = std::getenv("HENON_CACHE_DIR"); d && *d) return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "henon";
  if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "henon";
  return std::filesystem::temp_directory_path() / "henon-cache";
}

DiskProfileStore::DiskProfileStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path DiskProfileStore::path_for(const std::string& key) const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(key)));
  return dir_ / (std::string(buf) + ".json");
}

std::shared_ptr<const RadialProfile> DiskProfileStore::load(const std::string& key) {
  const auto path = path_for(key);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return nullptr;
  try {
    const auto text = read_file(path);
    const auto j = json::parse(text);
    if (!j.contains("cache_key") || j.at("cache_key") != key) return nullptr;
    return std::make_shared<const RadialProfile>(profile_from_json(text));
  } catch (const std::exception&) {
    return nullptr;
  }
}

void DiskProfileStore::save(const std::string& key, const RadialProfile& profile) {
  try {
    std::filesystem::create_directories(dir_);
    auto j = json::parse(profile_to_json(profile, false));
    j["cache_key"] = key;
    write_atomic(path_for(key), j.dump());
  } catch (const std::exception&) {
    // The cache is an optimization; an unwritable directory only costs a re-solve.
  }
}

std::map<std::string, std::string> parse_config(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("config line " + std::to_string(number) + ": expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw DomainError("config line " + std::to_string(number) + ": empty key");
    out[key] = value;
  }
  return out;
}

}  // namespace henon::io
