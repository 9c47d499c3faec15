#pragma once

#include "chorin/study.hpp"

#include <iosfwd>
#include <string>

namespace chorin {

/// CSV header:
/// variant,N,k,h,Np,e_u_max,e_u_av,e_gradsum,e_p_av,se_u_max,se_u_av,se_gradsum,se_p_av,wall_time_s
void write_csv(std::ostream& out, const StudyReport& report);

/// JSON summary: {"config": {...}, "rows": [...], "rates": [...],
/// "provenance": {...}}. The config object is the flat key-value echo and
/// re-parses through apply_config to the same study.
std::string to_json(const StudyReport& report, const KeyValueConfig& config);

/// Parses a JSON summary written by to_json.
StudyReport report_from_json(const std::string& text);
KeyValueConfig config_from_json(const std::string& text);

/// Self-contained gnuplot script (data inlined) with log-log panels of the
/// velocity and pressure errors against k, plus a reference slope.
std::string gnuplot_script(const StudyReport& report, const std::string& title, const std::string& output_png);

}  // namespace chorin
