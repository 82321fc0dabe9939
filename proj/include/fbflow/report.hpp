#pragma once

#include "fbflow/analysis.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace fbflow {

struct RunReport {
    std::string problem_id;
    std::string method;
    double lambda = 0.0;
    double dt = 0.0;
    double t_end = 0.0;
    double tol = 0.0;
    double final_residual = 0.0;
    long iterations_or_steps = 0;
    StopReason stop_reason = StopReason::Horizon;
    std::map<std::string, MonitorVerdict> monitor_verdicts;
    std::optional<StabilityCertificate> certificate;
    double wall_time_ms = 0.0;
};

/// Shortest decimal string that round-trips the double (up to 17 significant
/// digits, '.' separator).
std::string format_g17(double v);

/// Stable field order, two-space indent.
std::string report_to_json(const RunReport& r);

/// Header `t,x_1..x_n,y_1..y_n,residual[,lyapunov][,loss]`, one row per
/// recorded state, 17-significant-digit ASCII.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec);

}  // namespace fbflow
