#include "stokes_ev/report.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace sev;
using nlohmann::json;

TEST_CASE("run config parsing") {
    const json ok = {{"R", 4.0}, {"a", 0.1}, {"eta", 2.0}, {"quad_order", 13}, {"seed", 99}};
    const RunConfig c = parse_run_config(ok);
    CHECK(c.R == 4.0);
    CHECK(c.a == 0.1);
    CHECK(c.eta == 2.0);
    CHECK(c.quad_order == 13);
    CHECK(c.seed == 99u);
    CHECK(to_json(c) == ok);

    for (const char* key : {"R", "a", "eta", "quad_order", "seed"}) {
        json j = ok;
        j.erase(key);
        CHECK_THROWS_AS(parse_run_config(j), ConfigError);
    }
    const auto with = [&](const char* key, json v) {
        json j = ok;
        j[key] = v;
        return j;
    };
    CHECK_THROWS_AS(parse_run_config(with("R", "four")), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("R", -1.0)), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("a", 0.0)), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("a", 0.5)), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("eta", 0.0)), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("quad_order", 2)), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("quad_order", 61)), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("quad_order", 7.5)), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with("seed", -3)), ConfigError);
    CHECK_THROWS_AS(parse_run_config(json::array()), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("17-digit formatting round-trips") {
    CHECK(fmt17(0.1) == "0.10000000000000001");
    CHECK(fmt17(1.0) == "1");
    for (double v : {M_PI, -1e-300, 6.02214076e23, 1.0 / 3.0}) CHECK(std::stod(fmt17(v)) == v);
}

TEST_CASE("gap exponent fit") {
    std::vector<SweepRow> rows;
    for (double phi : {1e-5, 3e-5, 1e-4, 4e-4}) {
        SweepRow r;
        r.phi = phi;
        r.gap = 0.7 * std::pow(phi, 5.0 / 3.0);
        rows.push_back(r);
    }
    CHECK(fit_gap_exponent(rows) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    rows[1].gap = -rows[1].gap;  // the sign of the gap does not matter
    CHECK(fit_gap_exponent(rows) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    // Off a pure power law every row moves the slope, so a dropped row would show.
    rows[2].gap *= 3.0;
    const double mixed = fit_gap_exponent(rows);
    for (auto& r : rows) r.gap = std::abs(r.gap);
    CHECK(fit_gap_exponent(rows) == doctest::Approx(mixed).epsilon(1e-14));
    rows[0].gap = 0.0;
    CHECK(fit_gap_exponent(rows) != doctest::Approx(mixed).epsilon(1e-6));
    rows.resize(1);
    CHECK_THROWS_AS(fit_gap_exponent(rows), DomainError);
}

TEST_CASE("CSV writers") {
    std::ostringstream os;
    SweepRow r;
    r.a = 0.1;
    r.R = 4.0;
    r.N = 7;
    r.method = "dilute";
    write_sweep_csv(os, {r});
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(header == "a,R,N,method,phi,phi_lattice,eta_hat,einstein,gap,rel_gap");
    CHECK(row.rfind("0.10000000000000001,4,7,dilute,", 0) == 0);

    std::ostringstream ls;
    const auto s = regularized_sum(Vec3(0.1, 0.2, 0.3), 2, 5.0);
    write_lattice_csv(ls, {s});
    std::istringstream li(ls.str());
    std::getline(li, header);
    CHECK(header == "x1,x2,x3,power,rho,value,bound,margin");
    std::getline(li, row);
    CHECK(std::count(row.begin(), row.end(), ',') == 7);

    std::ostringstream cs;
    write_csv_row(cs, {"a", "b", "c"});
    CHECK(cs.str() == "a,b,c\n");
}

TEST_CASE("JSON views") {
    const auto L = ledger(0.3, 1.0, 3.0);
    const json j = to_json(L);
    CHECK(j.at("C2").get<double>() == L.C2);
    CHECK(j.at("beta").get<double>() == L.beta);
    const json m = to_json(Mat3::Identity().eval());
    CHECK(m.size() == 3);
    CHECK(m[1][1].get<double>() == 1.0);
    CHECK(to_json(Vec3(1, 2, 3)) == json::array({1.0, 2.0, 3.0}));
}
