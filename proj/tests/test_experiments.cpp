#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cqm/errors.hpp"
#include "cqm/experiments/config.hpp"
#include "cqm/experiments/dataset.hpp"
#include "cqm/experiments/fit.hpp"
#include "cqm/experiments/runner.hpp"

using namespace cqm;
using namespace cqm::experiments;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "cqm_test_experiments";
    fs::create_directories(dir);
    return dir / name;
}

std::string without_wall_time(const Dataset& d) {
    Dataset copy = d;
    copy.metadata().erase("wall_time_s");
    std::ostringstream out;
    copy.write(out);
    return out.str();
}

ExperimentConfig small_qfi_vs_g() {
    auto c = default_config("qfi-vs-g");
    c.set("lambda", "0, -0.1");
    c.set("g", "0.05:1.2:24");
    c.set("t", "50");
    return c;
}

RunOptions quiet(int jobs = 1) {
    RunOptions o;
    o.jobs = jobs;
    return o;
}

}  // namespace

TEST_CASE("list parsing") {
    CHECK(parse_list("1, 2.5,3", "k") == std::vector<double>{1.0, 2.5, 3.0});
    const auto r = parse_list("0:1:5", "k");
    REQUIRE(r.size() == 5);
    CHECK(r.front() == 0.0);
    CHECK(r.back() == 1.0);
    CHECK(r[1] == doctest::Approx(0.25));
    CHECK(parse_list("7, 0:1:2", "k") == std::vector<double>{7.0, 0.0, 1.0});
    CHECK(parse_list("", "k").empty());
    CHECK(parse_list("3:3:1", "k") == std::vector<double>{3.0});
    CHECK_THROWS_AS((void)parse_list("1,,2", "k"), ConfigError);
    CHECK_THROWS_AS((void)parse_list("abc", "k"), ConfigError);
    CHECK_THROWS_AS((void)parse_list("0:1:0", "k"), ConfigError);
    CHECK_THROWS_AS((void)parse_list("0:1", "k"), ConfigError);
}

TEST_CASE("configuration keys") {
    auto c = default_config("qfi-evolution");
    CHECK(c.engine() == Engine::both);
    CHECK(c.list("g").size() == 3);
    CHECK(c.list("t").size() == 200);
    CHECK_THROWS_AS(c.set("no_such_key", "1"), ConfigError);
    CHECK_THROWS_AS(c.apply_override("missing_equals"), ConfigError);
    c.apply_override("lambda=-0.1");
    CHECK(c.number("lambda") == -0.1);
    c.apply_text("# comment\n\n g = 0.2, 0.3  # trailing\nengine = closed\n");
    CHECK(c.list("g") == std::vector<double>{0.2, 0.3});
    CHECK(c.engine() == Engine::closed);
    CHECK_THROWS_AS(c.apply_text("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(c.apply_file(scratch("does-not-exist.cfg").string()), ConfigError);
    c.set("n_cut_start", "2.5");
    CHECK_THROWS_AS((void)c.integer("n_cut_start"), ConfigError);

    CHECK(parse_engine("oracle") == Engine::oracle);
    CHECK(to_string(Engine::both) == "both");
    CHECK_THROWS_AS((void)parse_engine("fast"), ConfigError);
    CHECK_THROWS_AS((void)find_experiment("nope"), ConfigError);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(3) == "3");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-HUGE_VAL) == "-inf");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("dataset round trip") {
    Dataset d({{"x", "1"}, {"y", "1/omega"}});
    d.metadata()["experiment"] = "demo";
    // units travel in the metadata, as the runner records them
    d.metadata()["columns"] = {{{"name", "x"}, {"unit", "1"}}, {{"name", "y"}, {"unit", "1/omega"}}};
    d.add_row(Row{0, {format_number(0.5), format_number(1e-300)}, CellStatus::ok});
    d.add_row(Row{1, {"0.25", "nan"}, CellStatus::failed});
    d.add_row(Row{2, {"1", "2"}, CellStatus::saturated});
    CHECK_THROWS_AS(d.add_row(Row{3, {"1"}, CellStatus::ok}), std::invalid_argument);

    const auto path = scratch("roundtrip.csv").string();
    d.write_file(path);
    const auto back = Dataset::read_file(path);
    CHECK(back.columns().size() == 2);
    CHECK(back.columns()[1].unit == "1/omega");
    CHECK(back.rows().size() == 3);
    CHECK(back.rows()[1].status == CellStatus::failed);
    CHECK(back.metadata()["experiment"] == "demo");
    CHECK(back.numeric("y")[0] == 1e-300);
    CHECK(back.numeric("y").size() == 1);
    CHECK(back.numeric("y", false).size() == 3);
    CHECK(back.count(CellStatus::saturated) == 1);
    CHECK_THROWS_AS((void)back.column_index("z"), std::out_of_range);
    CHECK(parse_status("saturated") == CellStatus::saturated);

    std::ofstream(scratch("broken.csv")) << "no metadata\n";
    CHECK_THROWS_AS((void)Dataset::read_file(scratch("broken.csv").string()), std::runtime_error);
}

TEST_CASE("log-log slope fit") {
    std::vector<double> x, y;
    for (double eta : {100.0, 300.0, 1000.0, 3000.0, 10000.0}) {
        x.push_back(eta);
        y.push_back(-0.7 * 100.0 / eta);
    }
    const auto f = fit_loglog_slope(x, y);
    CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(f.stderr_slope < 1e-10);
    CHECK(f.intercept == doctest::Approx(std::log(70.0)).epsilon(1e-12));
    CHECK(f.points == 5);

    y[2] = 0.0;
    CHECK_THROWS_AS((void)fit_loglog_slope(x, y), NonPositiveData);
    x.pop_back();
    y.pop_back();
    CHECK_THROWS_AS((void)fit_loglog_slope(x, y), InvalidParams);
}

TEST_CASE("parallel_for visits every index once") {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) {
        CHECK(h.load() == 1);
    }
}

TEST_CASE("registry and reference text") {
    const auto text = reference_text();
    CHECK(registry().size() == 8);
    for (const auto& e : registry()) {
        CHECK(text.find("## " + e.id) != std::string::npos);
        CHECK(!e.engines.empty());
        const auto c = default_config(e.id);
        CHECK(c.experiment() == e.id);
    }
}

TEST_CASE("runs are deterministic and independent of the thread count") {
    const auto a = run(small_qfi_vs_g(), quiet(1));
    const auto b = run(small_qfi_vs_g(), quiet(3));
    CHECK(a.cells == 48);
    CHECK(a.failed_cells == 0);
    CHECK(without_wall_time(a.dataset) == without_wall_time(b.dataset));
    CHECK(a.dataset.metadata()["experiment"] == "qfi-vs-g");
    CHECK(a.dataset.metadata()["version"] == kVersion);
    CHECK(a.dataset.metadata().contains("analysis"));
}

TEST_CASE("resume reuses finished cells") {
    const auto path = scratch("resume.csv").string();
    const auto first = run(small_qfi_vs_g(), quiet());
    first.dataset.write_file(path);

    RunOptions opts = quiet();
    opts.resume_path = path;
    const auto again = run(small_qfi_vs_g(), opts);
    CHECK(again.reused_cells == first.cells);
    CHECK(without_wall_time(again.dataset) == without_wall_time(first.dataset));

    auto changed = small_qfi_vs_g();
    changed.set("t", "60");
    const auto fresh = run(changed, opts);
    CHECK(fresh.reused_cells == 0);
}

TEST_CASE("failing cells are recorded, not fatal") {
    auto c = default_config("qfi-evolution");
    c.set("engine", "closed");
    c.set("g", "0.097, 0.2");  // 0.2 lies beyond g_c ~ 0.1 at this lambda
    c.set("t", "0:10:5");
    const auto r = run(c, quiet());
    CHECK(r.cells == 2);
    CHECK(r.failed_cells == 1);
    const auto& meta = r.dataset.metadata();
    CHECK(meta["failed_cells"] == 1);
    REQUIRE(meta["failures"].size() == 1);
    CHECK(meta["failures"][0]["cell"] == 1);
    CHECK(r.dataset.count(CellStatus::failed) == 1);
    CHECK(std::isnan(r.dataset.numeric("F_closed", false).back()));
}

TEST_CASE("invalid configurations are rejected up front") {
    auto c = default_config("frequency-scaling");
    c.set("engine", "closed");
    CHECK_THROWS_AS((void)run(c, quiet()), ConfigError);

    auto d = default_config("qfi-vs-g");
    d.set("omega", "-1");
    CHECK_THROWS_AS((void)run(d, quiet()), ConfigError);

    auto e = default_config("ratio-scaling");
    e.set("g", "0.9");
    CHECK_THROWS_AS((void)run(e, quiet()), ConfigError);
}

TEST_CASE("default runs reproduce the expected structure") {
    const auto evo = run(default_config("qfi-evolution"), quiet());
    CHECK(evo.dataset.metadata()["analysis"]["ordered_by_g"] == true);

    const auto vs_g = run(default_config("qfi-vs-g"), quiet());
    const auto& peaks = vs_g.dataset.metadata()["analysis"]["peaks"];
    CHECK(peaks.size() == 5);
    for (const auto& pk : peaks) {
        CHECK(pk["offset_cells"].get<double>() <= 1.0);
    }

    const auto map = run(default_config("qfi-map"), quiet());
    CHECK(map.dataset.metadata()["analysis"]["ridge_within_one_cell"] == true);

    const auto ratio = run(default_config("ratio-scaling"), quiet());
    for (const auto& entry : ratio.dataset.metadata()["analysis"]["ratio_vs_n"]) {
        CHECK(std::abs(entry["slope"].get<double>()) <= 0.02);
    }
}

TEST_CASE("shipped config files hold the defaults") {
    for (const auto& e : registry()) {
        auto c = ExperimentConfig(e.id, e.keys);
        c.apply_file((fs::path(CQM_SOURCE_DIR) / "configs" / (e.id + ".cfg")).string());
        CHECK(c.values() == default_config(e.id).values());
    }
}
