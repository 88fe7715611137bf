#include <doctest.h>

#include <cmath>
#include <sstream>

#include "transq/errors.hpp"
#include "transq/experiments.hpp"

using namespace transq;
using nlohmann::json;

namespace {

std::string config_error_path(const json& j, Experiment e) {
    try {
        config_from_json(j, e);
    } catch (const ConfigError& err) {
        return err.path();
    }
    return "";
}

}  // namespace

TEST_CASE("defaults per experiment") {
    const auto t2 = default_config(Experiment::table2);
    CHECK(t2.model.arrival.kind() == "exponential");
    CHECK(t2.q_values == std::vector<double>{1.0, 2.0});
    CHECK(t2.ell == 1);
    const auto t3 = default_config(Experiment::table3);
    CHECK(t3.model.arrival.kind() == "hyperexponential");
    const auto t4 = default_config(Experiment::table4);
    CHECK(t4.model.arrival.kind() == "half_normal");
    CHECK(t4.ell == 2);
    const auto paths = default_config(Experiment::paths);
    CHECK(paths.q_values == std::vector<double>{0.0});
}

TEST_CASE("config parsing") {
    const auto c = config_from_json(json{{"seed", 7}, {"replications", 100}, {"q", 1.5}, {"n_values", {10, 20}}},
                                    Experiment::table2);
    CHECK(c.seed == 7);
    CHECK(c.replications == 100);
    CHECK(c.q_values == std::vector<double>{1.5});
    CHECK(c.n_values == std::vector<std::size_t>{10, 20});

    const auto back = config_from_json(to_json(c), Experiment::table2);
    CHECK(to_json(back) == to_json(c));
    CHECK(config_hash(back) == config_hash(c));
}

TEST_CASE("config errors name the field") {
    CHECK(config_error_path(json{{"replications", 1}}, Experiment::table2) == "replications");
    CHECK(config_error_path(json{{"beta", "x"}}, Experiment::table2) == "beta");
    CHECK(config_error_path(json{{"bogus", 1}}, Experiment::table2) == "bogus");
    CHECK(config_error_path(json{{"n_values", json::array()}}, Experiment::table2) == "n_values");
    CHECK(config_error_path(json{{"model", {{"arrival", {{"kind", "cauchy"}}}}}}, Experiment::table2)
              .rfind("model.arrival", 0) == 0);
    // Contact order of the arrival law must match ell.
    CHECK_FALSE(config_error_path(json{{"ell", 2}}, Experiment::table2).empty());
    CHECK(config_error_path(json{{"dt", 0}}, Experiment::density) == "dt");
}

TEST_CASE("hash ignores threads and output directory") {
    auto a = default_config(Experiment::table2);
    auto b = a;
    b.threads = 4;
    b.outputs = "/elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.seed += 1;
    CHECK(config_hash(a) != config_hash(b));
    const auto h = header_line(a);
    CHECK(h.rfind(std::string("# transq ") + kToolVersion + " config_hash=", 0) == 0);
    CHECK(h.size() == std::string("# transq ").size() + std::string(kToolVersion).size() + 13 + 16);
}

TEST_CASE("small table run") {
    auto cfg = default_config(Experiment::table2);
    cfg.replications = 200;
    cfg.n_values = {100};
    cfg.q_values = {1.0};
    const auto r = run_table(cfg, Experiment::table2);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].n == std::optional<std::size_t>(100));
    CHECK(r.rows[0].initial_queue == 5);
    CHECK(r.rows[1].n == std::nullopt);
    CHECK(r.rows[1].value == doctest::Approx(2.0040526787260506).epsilon(1e-6));
    CHECK(r.rows[0].rel_error.has_value());
    std::ostringstream os;
    write_csv(os, r);
    CHECK(os.str().rfind("q,n,initial_queue,value,std_error,ci95_low,ci95_high,replications,censored,rel_error\n", 0) ==
          0);

    // Same seed, same numbers.
    const auto again = run_table(cfg, Experiment::table2);
    CHECK(again.rows[0].value == r.rows[0].value);
}

TEST_CASE("table with contact order two has no exact row") {
    auto cfg = default_config(Experiment::table4);
    cfg.replications = 50;
    cfg.n_values = {100};
    cfg.q_values = {1.0};
    const auto r = run_table(cfg, Experiment::table4);
    REQUIRE(r.rows.size() == 1);
    CHECK_FALSE(r.rows[0].rel_error.has_value());
}

TEST_CASE("small density run") {
    auto cfg = default_config(Experiment::density);
    cfg.replications = 500;
    cfg.n_values = {1000};
    const auto d = run_density(cfg);
    CHECK(d.grid.size() == cfg.grid_points);
    CHECK(d.kde.size() == d.grid.size());
    CHECK(d.analytic_mass == doctest::Approx(1.0).epsilon(1e-3));
    double trap = 0.0;
    for (std::size_t i = 1; i < d.grid.size(); ++i)
        trap += 0.5 * (d.analytic[i] + d.analytic[i - 1]) * (d.grid[i] - d.grid[i - 1]);
    CHECK(trap == doctest::Approx(1.0).epsilon(1e-3));
    for (double v : d.kde) CHECK(v >= 0.0);

    cfg.n_values = {1000, 10000};
    CHECK_THROWS_AS(run_density(cfg), ConfigError);
}

TEST_CASE("small paths run") {
    auto cfg = default_config(Experiment::paths);
    cfg.replications = 100;
    cfg.n_values = {1000};
    cfg.dt = 1e-3;
    const auto p = run_paths(cfg);
    REQUIRE(p.points.size() == cfg.times.size());
    for (const auto& pt : p.points) {
        CHECK(pt.queue_mean >= 0.0);
        CHECK(pt.diffusion_mean >= 0.0);
        CHECK(pt.gap() == doctest::Approx(std::abs(pt.queue_mean - pt.diffusion_mean)));
        CHECK(pt.joint_se() == doctest::Approx(std::sqrt((pt.queue_var + pt.diffusion_var) / pt.replications)));
    }
}
