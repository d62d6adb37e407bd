#include "fkdv_cli/cli.hpp"

#include <algorithm>
#include <ostream>

#include "CLI11.hpp"
#include "fkdv/errors.hpp"
#include "shared.hpp"

namespace fkdv::cli {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx{{}, &out, &err};
    int status = kOk;

    CLI::App app{"Fractional KdV solitons: ground states, evolution, modulation and audits", "fkdv"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", FKDV_VERSION);
    app.add_option("--jobs", ctx.global.jobs, "parallel runs inside one subcommand")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_flag("--gnuplot", ctx.global.gnuplot, "write <csv>.gp next to every CSV");
    app.add_flag("--quiet,-q", ctx.global.quiet, "suppress the summary line");

    register_groundstate(app, ctx, status);
    register_evolve(app, ctx, status);
    register_modulate(app, ctx, status);
    register_monotonicity(app, ctx, status);
    register_spectrum(app, ctx, status);
    register_check_estimates(app, ctx, status);
    register_nsoliton(app, ctx, status);
    register_report(app, ctx, status);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << FKDV_VERSION << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "fkdv: " << e.what() << "\n\n" << app.help();
        return kConfigError;
    } catch (const Error& e) {
        err << "fkdv: " << e.what() << '\n';
        return is_configuration_error(e.kind()) ? kConfigError : kNumericalFailure;
    } catch (const std::exception& e) {
        err << "fkdv: " << e.what() << '\n';
        return kNumericalFailure;
    }
    return status;
}

}  // namespace fkdv::cli
