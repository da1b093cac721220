#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sp2iso/checks.hpp"
#include "sp2iso/munzner.hpp"
#include "sp2iso/report.hpp"

namespace {

int sign_value(const std::string& s) {
    if (s == "+1" || s == "1" || s == "+") return 1;
    if (s == "-1" || s == "-") return -1;
    throw std::domain_error("geodesic: sign must be +1 or -1");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification toolkit for the isoparametric function Re(a) on Sp(2) and its "
                 "descent to the exotic 7-sphere"};
    app.require_subcommand(1);
    app.fallthrough();

    sp2iso::CheckOptions opt;
    double tol_value = 0.0;
    bool json_on = true;
    std::string csv_path;
    app.add_option("--samples", opt.samples, "Monte Carlo sample count")->capture_default_str();
    app.add_option("--seed", opt.seed, "deterministic RNG seed")->capture_default_str();
    CLI::Option* tol_opt =
        app.add_option("--tol", tol_value, "override the default tolerance of residual checks");
    app.add_flag("--json,!--no-json", json_on, "emit the JSON report array (default on)");
    app.add_option("--csv", csv_path, "write CSV (profile curve, or report table) to this path");

    CLI::App* verify = app.add_subcommand("verify", "run a verification battery");
    verify->require_subcommand(1);
    verify->fallthrough();
    CLI::App* verify_sp2 = verify->add_subcommand("sp2", "isoparametric structure upstairs");
    CLI::App* verify_gm = verify->add_subcommand("gm", "descent to the exotic quotient");
    CLI::App* verify_metric =
        verify->add_subcommand("metric", "behaviour under a diagonal left-invariant metric");
    std::vector<double> weights;
    verify_metric->add_option("--weights", weights, "metric weights wx,wy,wz")
        ->delimiter(',')
        ->expected(3)
        ->required();

    CLI::App* munzner = app.add_subcommand("munzner", "cohomology table from focal data");
    int mz_n = 0, mz_m1 = 0, mz_m_1 = 0;
    bool mz_orientable = false;
    munzner->add_option("--n", mz_n, "hypersurface dimension")->required();
    munzner->add_option("--m1", mz_m1, "focal codimension minus one (larger)")->required();
    munzner->add_option("--m-1", mz_m_1, "focal codimension minus one (smaller)")->required();
    munzner->add_flag("--orientable", mz_orientable, "both focal manifolds orientable");

    CLI::App* profile = app.add_subcommand("profile", "emit (t, b, a, h) profile curves");
    std::string profile_case;
    bool minimal = false;
    profile->add_option("--case", profile_case, "profile case")
        ->check(CLI::IsMember({"sp2", "gm", "s3"}))
        ->required();
    profile->add_flag("--minimal-level", minimal, "locate the minimal regular level");

    CLI::App* geodesic = app.add_subcommand("geodesic", "trace a normal geodesic to the focal set");
    double geo_t0 = 0.0;
    std::string geo_sign = "+1";
    geodesic->add_option("--t0", geo_t0, "starting level in (-1, 1)")->required();
    geodesic->add_option("--sign", geo_sign, "direction along the gradient, +1 or -1")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (tol_opt->count() > 0) opt.tol = tol_value;

    std::vector<sp2iso::VerificationReport> reports;
    std::vector<sp2iso::ProfileRow> curve;
    try {
        if (verify_sp2->parsed()) {
            reports = sp2iso::run_sp2_checks(opt);
        } else if (verify_gm->parsed()) {
            reports = sp2iso::run_gm_checks(opt);
        } else if (verify_metric->parsed()) {
            reports = sp2iso::run_metric_checks(
                sp2iso::MetricWeights{weights[0], weights[1], weights[2]}, opt);
        } else if (munzner->parsed()) {
            reports.push_back(sp2iso::munzner_report({mz_n, mz_m1, mz_m_1, mz_orientable}));
        } else if (profile->parsed()) {
            sp2iso::ProfileResult res = sp2iso::run_profile(profile_case, minimal, opt);
            reports = std::move(res.reports);
            curve = std::move(res.rows);
        } else if (geodesic->parsed()) {
            reports = sp2iso::run_geodesic(geo_t0, sign_value(geo_sign), opt);
        }
    } catch (const sp2iso::InconsistentFocalData& e) {
        std::cerr << "InconsistentFocalData: " << e.what() << "\n";
        return 2;
    } catch (const sp2iso::Unclassified& e) {
        std::cerr << "Unclassified: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "DomainError: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "Error: " << e.what() << "\n";
        return 2;
    }

    if (json_on) std::cout << sp2iso::reports_to_json(reports).dump(2) << "\n";
    if (!csv_path.empty()) {
        if (profile->parsed())
            sp2iso::write_text_file(csv_path, sp2iso::profile_to_csv(curve));
        else
            sp2iso::write_text_file(csv_path, sp2iso::reports_to_csv(reports));
    } else if (!json_on) {
        if (profile->parsed())
            std::cout << sp2iso::profile_to_csv(curve);
        else
            std::cout << sp2iso::reports_to_csv(reports);
    }

    const bool all_pass = std::all_of(reports.begin(), reports.end(),
                                      [](const sp2iso::VerificationReport& r) { return r.pass; });
    return all_pass ? 0 : 1;
}
