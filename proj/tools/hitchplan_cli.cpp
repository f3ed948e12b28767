// Command-line front end: plan, validate-ik, replay, render.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hitchplan/hitchplan.hpp"

namespace
{
    void add_common(CLI::App *cmd, hitchplan::CommandOptions &opt, std::optional<double> &dt,
                    std::optional<int> &branches)
    {
        cmd->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
        cmd->add_option("--dt", dt, "Integrator step override [s]")->check(CLI::PositiveNumber);
        cmd->add_flag("--no-prune", opt.no_prune, "Disable duplicate-state pruning");
        cmd->add_option("--branches", branches, "Branches per expansion (>= 2)")->check(CLI::Range(2, 64));
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Reverse path planning for a car with a single trailer"};
    app.require_subcommand(1);

    hitchplan::CommandOptions opt;
    std::optional<double> dt;
    std::optional<int> branches;

    std::string scenario;
    auto *plan = app.add_subcommand("plan", "Plan a reverse path for a scenario");
    plan->add_option("scenario", scenario, "Scenario JSON file")->required();
    add_common(plan, opt, dt, branches);

    auto *render = app.add_subcommand("render", "Render the map and its inflation without planning");
    render->add_option("scenario", scenario, "Scenario JSON file")->required();
    add_common(render, opt, dt, branches);

    std::string result_path;
    std::optional<std::string> csv_path;
    auto *replay = app.add_subcommand("replay", "Re-simulate a planned input history open loop");
    replay->add_option("scenario", scenario, "Scenario JSON file")->required();
    replay->add_option("result", result_path, "result.json written by plan")->required();
    replay->add_option("--path", csv_path, "path.csv to compare against (default: next to result.json)");
    add_common(replay, opt, dt, branches);

    std::optional<std::string> profile_path;
    std::optional<double> amplitude_deg, period, duration, rear_speed;
    auto *ik = app.add_subcommand("validate-ik", "Track a sinusoidal virtual steer profile through the forward model");
    ik->add_option("profile", profile_path, "Optional profile JSON");
    ik->add_option("--amplitude-deg", amplitude_deg, "Profile amplitude [deg]");
    ik->add_option("--period", period, "Profile period [s]");
    ik->add_option("--duration", duration, "Run length [s]");
    ik->add_option("--speed", rear_speed, "Rear-axle speed V_R [m/s]");
    add_common(ik, opt, dt, branches);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    opt.dt = dt;
    opt.branches = branches;

    if (plan->parsed())
        return hitchplan::cmd_plan(scenario, opt);
    if (render->parsed())
        return hitchplan::cmd_render(scenario, opt);
    if (replay->parsed())
    {
        std::optional<std::filesystem::path> csv;
        if (csv_path)
            csv = *csv_path;
        return hitchplan::cmd_replay(scenario, result_path, csv);
    }

    hitchplan::IkProfile profile;
    try
    {
        if (profile_path)
            profile = hitchplan::load_ik_profile(*profile_path);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    if (amplitude_deg)
        profile.amplitude = hitchplan::deg_to_rad(*amplitude_deg);
    if (period)
        profile.period = *period;
    if (duration)
        profile.duration = *duration;
    if (rear_speed)
        profile.rear_speed = *rear_speed;
    if (dt)
        profile.dt = *dt;
    return hitchplan::cmd_validate_ik(profile, hitchplan::VehicleTrailerParams{}, opt);
}
