#include "chorin/report_io.hpp"

#include "chorin/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace chorin {

using nlohmann::json;

void write_csv(std::ostream& out, const StudyReport& report) {
  out << "variant,N,k,h,Np,e_u_max,e_u_av,e_gradsum,e_p_av,se_u_max,se_u_av,se_gradsum,se_p_av,wall_time_s\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (const auto& r : report.rows) {
    out << to_string(report.variant) << ',' << r.cells << ',' << r.k << ',' << r.h << ',' << r.realizations << ','
        << r.errors.e_u_max << ',' << r.errors.e_u_av << ',' << r.errors.e_gradsum << ',' << r.errors.e_p_av << ','
        << r.std_errors.e_u_max << ',' << r.std_errors.e_u_av << ',' << r.std_errors.e_gradsum << ','
        << r.std_errors.e_p_av << ',' << r.wall_time_s << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

namespace {

json triple_to_json(const ErrorTriple& e) {
  return {{"e_u_max", e.e_u_max}, {"e_u_av", e.e_u_av}, {"e_p_av", e.e_p_av}, {"e_gradsum", e.e_gradsum}};
}

ErrorTriple triple_from_json(const json& j) {
  return {j.at("e_u_max").get<double>(), j.at("e_u_av").get<double>(), j.at("e_p_av").get<double>(),
          j.at("e_gradsum").get<double>()};
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed JSON summary: ") + e.what());
  }
}

}  // namespace

std::string to_json(const StudyReport& report, const KeyValueConfig& config) {
  json j;
  j["config"] = json::object();
  for (const auto& [k, v] : config) j["config"][k] = v;
  j["rows"] = json::array();
  for (const auto& r : report.rows) {
    j["rows"].push_back({{"N", r.cells},
                         {"h", r.h},
                         {"steps", r.steps},
                         {"k", r.k},
                         {"Np", r.realizations},
                         {"errors", triple_to_json(r.errors)},
                         {"std_errors", triple_to_json(r.std_errors)},
                         {"wall_time_s", r.wall_time_s}});
  }
  j["rates"] = json::array();
  for (const auto& r : report.rates) {
    j["rates"].push_back({{"group", r.group},
                          {"norm", r.norm},
                          {"slope", r.fit.slope},
                          {"intercept", r.fit.intercept},
                          {"rms_residual", r.fit.rms_residual},
                          {"points", r.points}});
  }
  j["provenance"] = {{"spec_hash", report.spec_hash},
                     {"master_seed", report.master_seed},
                     {"code_version", report.code_version},
                     {"variant", to_string(report.variant)},
                     {"failed_realizations", report.failed_realizations},
                     {"reference_wall_time_s", report.reference_wall_time_s},
                     {"total_wall_time_s", report.total_wall_time_s}};
  return j.dump(2);
}

StudyReport report_from_json(const std::string& text) {
  const json j = parse(text);
  StudyReport report;
  try {
    for (const auto& r : j.at("rows")) {
      StudyRow row;
      row.cells = r.at("N").get<std::size_t>();
      row.h = r.at("h").get<double>();
      row.steps = r.at("steps").get<std::size_t>();
      row.k = r.at("k").get<double>();
      row.realizations = r.at("Np").get<std::size_t>();
      row.errors = triple_from_json(r.at("errors"));
      row.std_errors = triple_from_json(r.at("std_errors"));
      row.wall_time_s = r.at("wall_time_s").get<double>();
      report.rows.push_back(row);
    }
    for (const auto& r : j.at("rates")) {
      RateRow rate;
      rate.group = r.at("group").get<std::string>();
      rate.norm = r.at("norm").get<std::string>();
      rate.fit = {r.at("slope").get<double>(), r.at("intercept").get<double>(), r.at("rms_residual").get<double>()};
      rate.points = r.at("points").get<std::size_t>();
      report.rates.push_back(rate);
    }
    const auto& p = j.at("provenance");
    report.spec_hash = p.at("spec_hash").get<std::string>();
    report.master_seed = p.at("master_seed").get<std::uint64_t>();
    report.code_version = p.at("code_version").get<std::string>();
    report.variant =
        p.at("variant").get<std::string>() == "modified" ? SchemeVariant::Modified : SchemeVariant::Standard;
    report.failed_realizations = p.at("failed_realizations").get<std::size_t>();
    report.reference_wall_time_s = p.at("reference_wall_time_s").get<double>();
    report.total_wall_time_s = p.at("total_wall_time_s").get<double>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("JSON summary is missing fields: ") + e.what());
  }
  return report;
}

KeyValueConfig config_from_json(const std::string& text) {
  const json j = parse(text);
  KeyValueConfig config;
  if (!j.contains("config") || !j["config"].is_object()) throw InvalidArgument("JSON summary has no config object");
  for (const auto& [k, v] : j["config"].items()) {
    if (!v.is_string()) throw InvalidArgument("config value for '" + k + "' must be a string");
    config[k] = v.get<std::string>();
  }
  return config;
}

std::string gnuplot_script(const StudyReport& report, const std::string& title, const std::string& output_png) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "# gnuplot script; run with: gnuplot <this file>\n";
  s << "set terminal pngcairo size 1200,500 enhanced\n";
  s << "set output '" << output_png << "'\n";
  s << "$errors << EOD\n";
  s << "# k h e_u_max e_u_av e_gradsum e_p_av se_u_max se_u_av se_gradsum se_p_av\n";
  for (const auto& r : report.rows) {
    s << r.k << ' ' << r.h << ' ' << r.errors.e_u_max << ' ' << r.errors.e_u_av << ' ' << r.errors.e_gradsum << ' '
      << r.errors.e_p_av << ' ' << r.std_errors.e_u_max << ' ' << r.std_errors.e_u_av << ' '
      << r.std_errors.e_gradsum << ' ' << r.std_errors.e_p_av << '\n';
  }
  s << "EOD\n";

  // Anchor reference slopes at the coarsest row.
  const double rate = report.variant == SchemeVariant::Standard ? 0.25 : 0.5;
  double k_ref = 1.0, eu_ref = 1.0, ep_ref = 1.0;
  if (!report.rows.empty()) {
    k_ref = report.rows.front().k;
    const auto& e = report.rows.front().errors;
    const double eu = report.variant == SchemeVariant::Standard ? e.e_u_av : e.e_u_max;
    eu_ref = eu > 0 ? eu : 1.0;
    ep_ref = report.rows.front().errors.e_p_av > 0 ? report.rows.front().errors.e_p_av : 1.0;
  }
  const bool standard = report.variant == SchemeVariant::Standard;
  const int velocity_col = standard ? 4 : 3;
  const char* velocity_name = standard ? "E_{u,av}" : "max_m E_u^m";
  s << "set multiplot layout 1,2 title '" << title << "'\n";
  s << "set logscale xy\nset format x '10^{%L}'\nset format y '10^{%L}'\nset xlabel 'k'\nset grid\nset key left top\n";
  s << "set ylabel 'velocity error'\n";
  s << "plot $errors using 1:" << velocity_col << ":" << velocity_col + 4 << " with yerrorlines lw 2 pt 7 title '" << velocity_name << "', \\\n";
  s << "     " << eu_ref << "*(x/" << k_ref << ")**" << rate << " with lines dt 2 title 'O(k^{" << rate << "})'\n";
  s << "set ylabel 'pressure error'\n";
  s << "plot $errors using 1:6:10 with yerrorlines lw 2 pt 7 title 'E_{p,av}', \\\n";
  s << "     " << ep_ref << "*(x/" << k_ref << ")**" << rate << " with lines dt 2 title 'O(k^{" << rate << "})'\n";
  s << "unset multiplot\n";
  return s.str();
}

}  // namespace chorin
