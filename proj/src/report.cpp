#include "fbflow/report.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ostream>

namespace fbflow {

using ordered_json = nlohmann::ordered_json;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string report_to_json(const RunReport& r) {
    ordered_json j;
    j["problem_id"] = r.problem_id;
    j["method"] = r.method;
    j["lambda"] = r.lambda;
    j["dt"] = r.dt;
    j["t_end"] = r.t_end;
    j["tol"] = r.tol;
    j["final_residual"] = r.final_residual;
    j["iterations_or_steps"] = r.iterations_or_steps;
    j["stop_reason"] = to_string(r.stop_reason);
    ordered_json verdicts = ordered_json::object();
    for (const auto& [name, verdict] : r.monitor_verdicts) {
        verdicts[name] = {{"pass", verdict.pass}, {"margin", verdict.margin}};
    }
    j["monitor_verdicts"] = std::move(verdicts);
    if (r.certificate) {
        j["certificate"] = {{"beta", r.certificate->beta},
                            {"mu", r.certificate->mu},
                            {"lambda", r.certificate->lambda},
                            {"alpha", r.certificate->alpha},
                            {"lambda_valid", r.certificate->lambda_valid}};
    } else {
        j["certificate"] = nullptr;
    }
    j["wall_time_ms"] = r.wall_time_ms;
    return j.dump(2) + "\n";
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec) {
    const Eigen::Index n = rec.xs.empty() ? 0 : rec.xs.front().size();
    os << "t";
    for (Eigen::Index i = 1; i <= n; ++i) os << ",x_" << i;
    for (Eigen::Index i = 1; i <= n; ++i) os << ",y_" << i;
    os << ",residual";
    if (rec.lyapunov) os << ",lyapunov";
    if (rec.loss) os << ",loss";
    os << "\n";
    for (std::size_t k = 0; k < rec.size(); ++k) {
        os << format_g17(rec.times[k]);
        for (Eigen::Index i = 0; i < n; ++i) os << "," << format_g17(rec.xs[k][i]);
        for (Eigen::Index i = 0; i < n; ++i) os << "," << format_g17(rec.ys[k][i]);
        os << "," << format_g17(rec.residuals[k]);
        if (rec.lyapunov) os << "," << format_g17((*rec.lyapunov)[k]);
        if (rec.loss) os << "," << format_g17((*rec.loss)[k]);
        os << "\n";
    }
}

}  // namespace fbflow
