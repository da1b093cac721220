#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sp2iso/sp2.hpp"

namespace sp2iso {

/// Outcome of one named check: residual against tolerance plus the run
/// metadata (sample count, seed, metric weights) and free-form notes. The
/// pass flag is always max_residual <= tolerance.
struct VerificationReport {
    std::string check;
    long long samples = 0;
    unsigned long long seed = 0;
    double tolerance = 0.0;
    double max_residual = 0.0;
    bool pass = false;
    double wall_time_seconds = 0.0;
    MetricWeights weights{};
    std::vector<std::string> notes;
};

inline VerificationReport make_report(std::string check, long long samples,
                                      unsigned long long seed, double tolerance,
                                      double max_residual, double wall_time_seconds,
                                      const MetricWeights& weights = {},
                                      std::vector<std::string> notes = {}) {
    VerificationReport r;
    r.check = std::move(check);
    r.samples = samples;
    r.seed = seed;
    r.tolerance = tolerance;
    r.max_residual = max_residual;
    r.pass = max_residual <= tolerance;
    r.wall_time_seconds = wall_time_seconds;
    r.weights = weights;
    r.notes = std::move(notes);
    return r;
}

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        const auto now = std::chrono::steady_clock::now();
        return std::chrono::duration<double>(now - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

/// Fixed-format float for notes; keeps JSON output reproducible across runs.
inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void to_json(nlohmann::ordered_json& j, const VerificationReport& r) {
    j = nlohmann::ordered_json{{"check", r.check},
                               {"samples", r.samples},
                               {"seed", r.seed},
                               {"tolerance", r.tolerance},
                               {"max_residual", r.max_residual},
                               {"pass", r.pass},
                               {"wall_time_seconds", r.wall_time_seconds},
                               {"weights", {r.weights.wx, r.weights.wy, r.weights.wz}},
                               {"notes", r.notes}};
}

inline void from_json(const nlohmann::ordered_json& j, VerificationReport& r) {
    j.at("check").get_to(r.check);
    j.at("samples").get_to(r.samples);
    j.at("seed").get_to(r.seed);
    j.at("tolerance").get_to(r.tolerance);
    j.at("max_residual").get_to(r.max_residual);
    j.at("pass").get_to(r.pass);
    j.at("wall_time_seconds").get_to(r.wall_time_seconds);
    const auto& w = j.at("weights");
    r.weights = MetricWeights{w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>()};
    j.at("notes").get_to(r.notes);
}

inline nlohmann::ordered_json reports_to_json(const std::vector<VerificationReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const VerificationReport& r : reports) {
        nlohmann::ordered_json j;
        to_json(j, r);
        arr.push_back(std::move(j));
    }
    return arr;
}

inline std::vector<VerificationReport> reports_from_json(const nlohmann::ordered_json& arr) {
    std::vector<VerificationReport> out;
    for (const auto& j : arr) {
        VerificationReport r;
        from_json(j, r);
        out.push_back(std::move(r));
    }
    return out;
}

/// Report CSV: one row per check, fixed column set. Notes are JSON-only.
inline std::string reports_to_csv(const std::vector<VerificationReport>& reports) {
    std::string out = "check,samples,seed,tolerance,max_residual,pass,wall_time_seconds,wx,wy,wz\n";
    char buf[256];
    for (const VerificationReport& r : reports) {
        std::snprintf(buf, sizeof(buf), "%s,%lld,%llu,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g\n",
                      r.check.c_str(), r.samples, r.seed, r.tolerance, r.max_residual,
                      r.pass ? 1 : 0, r.wall_time_seconds, r.weights.wx, r.weights.wy,
                      r.weights.wz);
        out += buf;
    }
    return out;
}

struct ProfileRow {
    double t = 0.0;
    double b = 0.0;
    double a = 0.0;
    double h = 0.0;
};

inline std::string profile_to_csv(const std::vector<ProfileRow>& rows) {
    std::string out = "t,b,a,h\n";
    char buf[160];
    for (const ProfileRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g\n", r.t, r.b, r.a, r.h);
        out += buf;
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
}

}  // namespace sp2iso
