#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dampstring/spectral.hpp"

namespace dampstring {

enum class Status { Pass, Fail, ReportOnly };

std::string status_name(Status s);

struct Record {
  std::string name;
  std::string anchor;
  Status status = Status::ReportOnly;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct VerificationReport {
  std::vector<Record> records;
  std::vector<std::pair<std::string, std::string>> metadata;

  // Hard-gated check: passes when measured <= tolerance (NaN fails).
  Record& check(const std::string& name, const std::string& anchor, double measured,
                double tolerance, const std::string& note = {});
  // Hard-gated check with an explicit outcome.
  Record& check_bool(const std::string& name, const std::string& anchor, bool ok, double measured,
                     double tolerance, const std::string& note = {});
  Record& report_only(const std::string& name, const std::string& anchor, double measured,
                      const std::string& note = {});
  // Failed hard check carrying the error message.
  Record& error(const std::string& name, const std::string& anchor, const std::string& message);

  void meta(const std::string& key, const std::string& value);
  void append(const VerificationReport& other);
  bool any_failure() const;
  int count(Status s) const;
};

void write_report_json(std::ostream& os, const VerificationReport& report);
void write_report_csv(std::ostream& os, const VerificationReport& report);

// Plot data with headers.
void write_scatter(std::ostream& os, const Spectrum& spec);  // re,im,branch
struct ConvergenceRow {
  int n_grid = 0;
  double err_t0 = 0.0;
  double err_eig1 = 0.0;
};
void write_convergence(std::ostream& os, const std::vector<ConvergenceRow>& rows);
void write_slope(std::ostream& os, const AsymptoticFit& fit);  // j,re_lambda,fit_value

// FNV-1a hash of a text, as 16 hex digits.
std::string text_hash(const std::string& text);

} // namespace dampstring
