#include "dampstring/report.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "dampstring/format.hpp"

namespace dampstring {

std::string status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::ReportOnly: return "report-only";
  }
  return "report-only";
}

Record& VerificationReport::check(const std::string& name, const std::string& anchor,
                                  double measured, double tolerance, const std::string& note) {
  return check_bool(name, anchor, measured <= tolerance, measured, tolerance, note);
}

Record& VerificationReport::check_bool(const std::string& name, const std::string& anchor, bool ok,
                                       double measured, double tolerance, const std::string& note) {
  records.push_back({name, anchor, ok ? Status::Pass : Status::Fail, measured, tolerance, note});
  return records.back();
}

Record& VerificationReport::report_only(const std::string& name, const std::string& anchor,
                                        double measured, const std::string& note) {
  records.push_back({name, anchor, Status::ReportOnly, measured,
                     std::numeric_limits<double>::quiet_NaN(), note});
  return records.back();
}

Record& VerificationReport::error(const std::string& name, const std::string& anchor,
                                  const std::string& message) {
  records.push_back({name, anchor, Status::Fail, std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN(), message});
  return records.back();
}

void VerificationReport::meta(const std::string& key, const std::string& value) {
  for (auto& kv : metadata)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  metadata.emplace_back(key, value);
}

void VerificationReport::append(const VerificationReport& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
  for (const auto& kv : other.metadata) meta(kv.first, kv.second);
}

bool VerificationReport::any_failure() const { return count(Status::Fail) > 0; }

int VerificationReport::count(Status s) const {
  int c = 0;
  for (const auto& r : records) c += r.status == s;
  return c;
}

namespace {

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return fmt_double(v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

} // namespace

void write_report_json(std::ostream& os, const VerificationReport& report) {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& kv : report.metadata) j["metadata"][kv.first] = kv.second;
  j["summary"] = {{"records", report.records.size()},
                  {"pass", report.count(Status::Pass)},
                  {"fail", report.count(Status::Fail)},
                  {"report_only", report.count(Status::ReportOnly)}};
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    nlohmann::ordered_json e;
    e["name"] = r.name;
    e["anchor"] = r.anchor;
    e["status"] = status_name(r.status);
    e["measured"] = number(r.measured);
    e["tolerance"] = number(r.tolerance);
    if (!r.note.empty()) e["note"] = r.note;
    j["records"].push_back(std::move(e));
  }
  os << j.dump(2) << '\n';
}

void write_report_csv(std::ostream& os, const VerificationReport& report) {
  os << "name,anchor,status,measured,tolerance,note\n";
  for (const auto& r : report.records)
    os << csv_field(r.name) << ',' << csv_field(r.anchor) << ',' << status_name(r.status) << ','
       << fmt_double(r.measured) << ',' << fmt_double(r.tolerance) << ',' << csv_field(r.note)
       << '\n';
}

void write_scatter(std::ostream& os, const Spectrum& spec) {
  os << "re,im,branch\n";
  for (std::size_t i = 0; i < spec.size(); ++i)
    os << fmt_double(spec.eigenvalues[i].real()) << ',' << fmt_double(spec.eigenvalues[i].imag())
       << ',' << spec.branch[i] << '\n';
}

void write_convergence(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "n_grid,err_t0,err_eig1\n";
  for (const auto& r : rows)
    os << r.n_grid << ',' << fmt_double(r.err_t0) << ',' << fmt_double(r.err_eig1) << '\n';
}

void write_slope(std::ostream& os, const AsymptoticFit& fit) {
  os << "j,re_lambda,fit_value\n";
  for (std::size_t k = 0; k < fit.j.size(); ++k)
    os << fit.j[k] << ',' << fmt_double(fit.re_lambda[k]) << ',' << fmt_double(fit.fit_value[k])
       << '\n';
}

std::string text_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace dampstring
