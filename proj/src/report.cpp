#include "nlac/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "nlac/error.hpp"

namespace nlac {

bool ExperimentReport::passed() const {
  if (criteria.empty()) return false;
  return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
}

void ExperimentReport::check(const std::string& name, double value, double lo, double hi) {
  criteria.push_back({name, value, lo, hi, std::isfinite(value) && value >= lo && value <= hi});
}

void ExperimentReport::sort_sweep() {
  std::stable_sort(sweep.begin(), sweep.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.epsilon > b.epsilon; });
}

namespace {

// JSON has no NaN or infinity; such values are written as null.
nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["study"] = study;
  j["quantity"] = quantity;
  j["abscissa"] = abscissa;
  j["config_hash"] = config_hash;
  j["sweep"] = nlohmann::json::array();
  for (const auto& row : sweep) {
    nlohmann::json r = {{"epsilon", number(row.epsilon)}, {"value", number(row.value)}};
    for (const auto& [k, v] : row.extra) r[k] = number(v);
    j["sweep"].push_back(r);
  }
  if (fit)
    j["fit"] = {{"slope", number(fit->slope)}, {"intercept", number(fit->intercept)},
                {"r2", number(fit->r2)}};
  else
    j["fit"] = nullptr;
  j["criteria"] = nlohmann::json::array();
  for (const auto& c : criteria)
    j["criteria"].push_back(
        {{"name", c.name}, {"value", number(c.value)}, {"lo", number(c.lo)}, {"hi", number(c.hi)}, {"pass", c.pass}});
  j["constants"] = nlohmann::json::object();
  for (const auto& [k, v] : constants) j["constants"][k] = number(v);
  j["notes"] = notes;
  j["verdict"] = passed() ? "pass" : "fail";
  return j;
}

void ExperimentReport::write_csv(std::ostream& out) const {
  std::set<std::string> cols;
  for (const auto& row : sweep)
    for (const auto& [k, v] : row.extra) cols.insert(k);
  out << std::setprecision(17) << "epsilon," << quantity;
  for (const auto& c : cols) out << ',' << c;
  out << '\n';
  for (const auto& row : sweep) {
    out << row.epsilon << ',' << row.value;
    for (const auto& c : cols) {
      out << ',';
      if (auto it = row.extra.find(c); it != row.extra.end()) out << it->second;
    }
    out << '\n';
  }
}

std::optional<LineFit> fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
    if (!(x[k] > 0) || !(y[k] > 0) || !std::isfinite(x[k]) || !std::isfinite(y[k])) continue;
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(y[k]));
  }
  if (lx.size() < 3) return std::nullopt;
  return fit_line(lx, ly);
}

std::string config_hash(const nlohmann::json& canonical) {
  const std::string text = canonical.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::ConfigInvalid, "hashing the configuration failed");
  std::ostringstream hex;
  for (unsigned int k = 0; k < 8 && k < len; ++k)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  return hex.str();
}

}  // namespace nlac
