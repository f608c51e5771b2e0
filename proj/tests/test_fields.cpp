#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "latspec/errors.hpp"
#include "latspec/fields.hpp"
#include "latspec/rng.hpp"

using namespace latspec;

namespace {

FieldModel white_noise(double sigma = 1.0) {
    FieldModel m;
    m.kind = FieldModel::Kind::WhiteNoise;
    m.innovation.sigma = sigma;
    return m;
}

FieldModel linear_ma(std::vector<Coeff2> coeffs, double sigma = 1.0) {
    FieldModel m;
    m.kind = FieldModel::Kind::LinearMA;
    m.innovation.sigma = sigma;
    m.ma_coeffs = std::move(coeffs);
    return m;
}

// geometric window a_s = rho^{max(|s1|,|s2|)} for max norm <= reach
FieldModel geometric_ma(double rho, int reach) {
    std::vector<Coeff2> cs;
    for (int s2 = -reach; s2 <= reach; ++s2)
        for (int s1 = -reach; s1 <= reach; ++s1)
            cs.push_back({{s1, s2}, std::pow(rho, std::max(std::abs(s1), std::abs(s2)))});
    return linear_ma(std::move(cs));
}

}  // namespace

TEST_CASE("simulation is deterministic and seed-sensitive") {
    LatticeSpec spec(4, 4);
    const FieldGrid a = simulate(white_noise(), spec, 42);
    const FieldGrid b = simulate(white_noise(), spec, 42);
    const FieldGrid c = simulate(white_noise(), spec, 43);
    CHECK(a.values.size() == 16);
    CHECK(a.values == b.values);  // bit-identical
    CHECK(a.values != c.values);
}

TEST_CASE("identity filter reproduces the innovation draw plus the mean") {
    LatticeSpec spec(5, 6);
    FieldModel id = linear_ma({{{0, 0}, 1.0}});
    id.mean = 2.5;
    const FieldGrid v = simulate(id, spec, 7);
    for (int t2 = 1; t2 <= 6; ++t2)
        for (int t1 = 1; t1 <= 5; ++t1)
            CHECK(v.at(t1, t2) == id.innovation.sample(7, 0, t1, t2) + 2.5);
}

TEST_CASE("innovation distributions: moments and validation") {
    InnovationSpec uni;
    uni.dist = InnovationSpec::Dist::Uniform;
    uni.halfwidth = 2.0;
    CHECK(uni.variance() == doctest::Approx(4.0 / 3.0));

    InnovationSpec stu;
    stu.dist = InnovationSpec::Dist::StudentT;
    stu.nu = 5.0;
    CHECK_THROWS_AS(stu.validate(), std::invalid_argument);  // nu <= 8 rejected
    stu.allow_low_nu = true;
    CHECK_NOTHROW(stu.validate());
    stu.nu = 9.0;
    stu.allow_low_nu = false;
    CHECK_NOTHROW(stu.validate());

    // sample moments: mean near 0, variance near closed form
    for (const InnovationSpec& s : {InnovationSpec{}, uni, stu}) {
        double mean = 0.0, var = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) mean += s.sample(5, 0, i, 0);
        mean /= n;
        for (int i = 0; i < n; ++i) {
            const double d = s.sample(5, 0, i, 0) - mean;
            var += d * d;
        }
        var /= n;
        CHECK(std::abs(mean) < 4.0 * std::sqrt(s.variance() / n));
        CHECK(var == doctest::Approx(s.variance()).epsilon(0.1));
    }
}

TEST_CASE("model validation rejects the documented contract violations") {
    FieldModel empty = linear_ma({});
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

    FieldModel dup = linear_ma({{{0, 0}, 1.0}, {{0, 0}, 0.5}});
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

    FieldModel vol;
    vol.kind = FieldModel::Kind::Volterra2;
    vol.volterra_coeffs = {{{0, 0}, {0, 0}, 0.5}};
    CHECK_THROWS_AS(vol.validate(), std::invalid_argument);  // diagonal
    vol.volterra_coeffs = {{{0, 0}, {1, 0}, 0.5}};
    CHECK_NOTHROW(vol.validate());

    FieldModel ar;
    ar.kind = FieldModel::Kind::NonlinearAR;
    ar.ar_weights = {{{1, 0}, 0.7}, {{0, 1}, 0.4}};
    CHECK_THROWS_AS(simulate(ar, LatticeSpec(4, 4), 1), std::invalid_argument);  // sum >= 1
    ar.ar_weights = {{{0, 0}, 0.4}};
    CHECK_THROWS_AS(ar.validate(), std::invalid_argument);  // 0 in neighborhood
}

TEST_CASE("nonlinear AR along rows matches the AR(1) closed-form variance") {
    FieldModel ar;
    ar.kind = FieldModel::Kind::NonlinearAR;
    ar.ar_weights = {{{1, 0}, 0.4}};
    LatticeSpec spec(6, 6);
    double acc = 0.0, acc2 = 0.0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        const FieldGrid v = simulate(ar, spec, split_seed(123, rep));
        const double x = v.at(3, 3);
        acc += x;
        acc2 += x * x;
    }
    const double var = acc2 / reps - (acc / reps) * (acc / reps);
    CHECK(var == doctest::Approx(1.0 / (1.0 - 0.16)).epsilon(0.10));
}

TEST_CASE("tanh AR update stays deterministic") {
    FieldModel ar;
    ar.kind = FieldModel::Kind::NonlinearAR;
    ar.ar_update = FieldModel::ArUpdate::Tanh;
    ar.ar_weights = {{{1, 0}, 0.3}, {{0, 1}, 0.3}};
    LatticeSpec spec(5, 5);
    const FieldGrid a = simulate(ar, spec, 9);
    const FieldGrid b = simulate(ar, spec, 9);
    CHECK(a.values == b.values);
}

TEST_CASE("replace_origin coupling localizes to the stencil hit") {
    LatticeSpec spec(5, 5);
    {
        // shifted identity: the only site whose stencil touches eps_0 is (1,1)
        FieldModel m = linear_ma({{{1, 1}, 1.0}});
        auto [v, vc] = coupled_simulate(m, spec, 3, CouplingMode::ReplaceOrigin);
        for (int t2 = 1; t2 <= 5; ++t2)
            for (int t1 = 1; t1 <= 5; ++t1) {
                if (t1 == 1 && t2 == 1)
                    CHECK(v.at(1, 1) != vc.at(1, 1));
                else
                    CHECK(v.at(t1, t2) == vc.at(t1, t2));
            }
    }
    {
        // plain identity: eps_0 sits outside the observed window entirely
        FieldModel m = linear_ma({{{0, 0}, 1.0}});
        auto [v, vc] = coupled_simulate(m, spec, 3, CouplingMode::ReplaceOrigin);
        CHECK(v.values == vc.values);
    }
}

TEST_CASE("replace_origin L2 distance decays like |a_j|") {
    // a_s = 0.5^{||s||} on ||s|| <= 4: ||V(j)-V~(j)||_2 = |a_j| sqrt(2) sigma
    FieldModel m = geometric_ma(0.5, 4);
    LatticeSpec spec(6, 6);
    const int reps = 500;
    for (int r = 1; r <= 4; ++r) {
        double acc = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
            auto [v, vc] =
                coupled_simulate(m, spec, split_seed(777, rep), CouplingMode::ReplaceOrigin);
            const double d = v.at(r, r) - vc.at(r, r);  // ||(r,r)|| = r
            acc += d * d;
        }
        const double l2 = std::sqrt(acc / reps);
        const double expect = std::pow(0.5, r) * std::sqrt(2.0);
        CHECK(l2 > expect / 2.0);
        CHECK(l2 < expect * 2.0);
    }
}

TEST_CASE("replace_far keeps near innovations: white noise fixed points") {
    LatticeSpec spec(5, 5);
    auto [v, vc] = coupled_simulate(white_noise(), spec, 11, CouplingMode::ReplaceFar);
    // site (3,3): ||j||=3, its own innovation has s=0 with ||s||=0 < 3 -> kept
    CHECK(v.at(3, 3) == vc.at(3, 3));
    CHECK(v.at(2, 3) == vc.at(2, 3));
    CHECK(v.at(1, 1) == vc.at(1, 1));
}

TEST_CASE("gmc decay: identity filter is exactly coupled, white noise at radius 0") {
    LatticeSpec spec(8, 8);
    {
        FieldModel m = linear_ma({{{0, 0}, 1.0}});
        const auto means = gmc_decay_estimate(m, spec, {1, 2, 3}, 50, 2.0, 1);
        for (double v : means) CHECK(v == 0.0);
    }
    {
        const auto means = gmc_decay_estimate(white_noise(), spec, {0}, 500, 2.0, 1);
        // Var(eps - eps~) = 2 sigma^2; chi-square concentration over 500 reps
        CHECK(means[0] == doctest::Approx(2.0).epsilon(0.25));
    }
    CHECK_THROWS_AS(gmc_decay_estimate(white_noise(), spec, {1}, 10, -1.0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(gmc_decay_estimate(white_noise(), spec, {999}, 10, 2.0, 1),
                    std::invalid_argument);
}

TEST_CASE("gmc decay for the geometric window matches the exact second moment") {
    // E|V(j) - V^dag(j)|^2 = 2 sigma^2 sum_{||s|| >= ||j||} a_s^2
    FieldModel m = geometric_ma(0.5, 4);
    LatticeSpec spec(8, 8);
    const std::vector<int> radii{1, 2, 3, 4};
    const auto means = gmc_decay_estimate(m, spec, radii, 500, 2.0, 5);
    for (std::size_t k = 0; k < radii.size(); ++k) {
        double expect = 0.0;
        for (const auto& c : m.ma_coeffs)
            if (std::max(std::abs(c.s[0]), std::abs(c.s[1])) >= radii[k]) expect += c.a * c.a;
        expect *= 2.0;
        CHECK(means[k] == doctest::Approx(expect).epsilon(0.30));
    }
    for (std::size_t k = 1; k < means.size(); ++k) CHECK(means[k] <= means[k - 1] * 1.05);
    // fitted log slope comfortably below log(0.5) + 0.3
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        sx += radii[k];
        sy += std::log(means[k]);
        sxx += radii[k] * radii[k];
        sxy += radii[k] * std::log(means[k]);
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    CHECK(slope <= std::log(0.5) + 0.3);
}

TEST_CASE("volterra simulation runs and has mean ~= model mean") {
    FieldModel m;
    m.kind = FieldModel::Kind::Volterra2;
    m.mean = 1.0;
    m.volterra_coeffs = {{{0, 0}, {1, 0}, 0.5}, {{0, 1}, {1, 1}, 0.25}};
    LatticeSpec spec(16, 16);
    double acc = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const FieldGrid v = simulate(m, spec, split_seed(2, rep));
        for (double x : v.values) acc += x;
    }
    acc /= 50.0 * 256.0;
    CHECK(acc == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("theoretical spectrum closed forms") {
    const double inv = 1.0 / (4 * std::numbers::pi * std::numbers::pi);
    CHECK(theoretical_spectrum(white_noise(), 0.3, 2.2) == doctest::Approx(inv).epsilon(1e-12));

    FieldModel ma11 = linear_ma({{{0, 0}, 1.0}, {{1, 0}, 1.0}});
    CHECK(theoretical_spectrum(ma11, std::numbers::pi, 0.0) ==
          doctest::Approx(0.0).epsilon(1e-12));

    FieldModel ma = linear_ma({{{0, 0}, 1.0}, {{1, 0}, 0.5}});
    CHECK(theoretical_spectrum(ma, 0.0, 0.0) == doctest::Approx(2.25 * inv).epsilon(1e-12));

    FieldModel vol;
    vol.kind = FieldModel::Kind::Volterra2;
    vol.volterra_coeffs = {{{0, 0}, {1, 0}, 0.5}};
    CHECK_THROWS_AS(theoretical_spectrum(vol, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("theoretical autocovariance closed forms and identities") {
    CHECK(theoretical_autocovariance(white_noise(2.0), 0, 0) == doctest::Approx(4.0));
    CHECK(theoretical_autocovariance(white_noise(2.0), 1, 0) == 0.0);

    FieldModel ma = linear_ma({{{0, 0}, 1.0}, {{1, 0}, 0.5}});
    CHECK(theoretical_autocovariance(ma, 1, 0) == doctest::Approx(0.5));
    CHECK(theoretical_autocovariance(ma, -1, 0) == doctest::Approx(0.5));
    CHECK(theoretical_autocovariance(ma, 0, 0) == doctest::Approx(1.25));

    // sum_h gamma(h) = sigma^2 (sum_s a_s)^2
    FieldModel g = geometric_ma(0.4, 2);
    double lhs = 0.0;
    for (int h2 = -5; h2 <= 5; ++h2)
        for (int h1 = -5; h1 <= 5; ++h1) lhs += theoretical_autocovariance(g, h1, h2);
    double suma = 0.0;
    for (const auto& c : g.ma_coeffs) suma += c.a;
    CHECK(lhs == doctest::Approx(suma * suma).epsilon(1e-12));
}

TEST_CASE("spectrum equals the finite autocovariance Fourier sum at random frequencies") {
    FieldModel g = geometric_ma(0.4, 2);
    const double inv = 1.0 / (4 * std::numbers::pi * std::numbers::pi);
    for (int k = 0; k < 50; ++k) {
        const double l1 = u01(counter_hash(77, 0, k, 0, 0)) * 2 * std::numbers::pi;
        const double l2 = u01(counter_hash(77, 0, k, 1, 0)) * 2 * std::numbers::pi;
        std::complex<double> acc = 0.0;
        for (int h2 = -5; h2 <= 5; ++h2)
            for (int h1 = -5; h1 <= 5; ++h1)
                acc += theoretical_autocovariance(g, h1, h2) *
                       std::exp(std::complex<double>(0.0, -(l1 * h1 + l2 * h2)));
        CHECK(std::abs(acc.imag()) * inv < 1e-12);
        CHECK(acc.real() * inv == doctest::Approx(theoretical_spectrum(g, l1, l2)).epsilon(1e-12));
    }
}

TEST_CASE("linear MA empirical autocovariance tracks theory within 3 SE") {
    FieldModel ma = linear_ma({{{0, 0}, 1.0}, {{1, 0}, 0.5}, {{0, 1}, -0.3}});
    LatticeSpec spec(8, 8);
    const int reps = 500;
    for (auto [h1, h2] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
        double acc = 0.0, acc2 = 0.0;
        for (int rep = 0; rep < reps; ++rep) {
            const FieldGrid v = simulate(ma, spec, split_seed(31, rep));
            // one site pair per replication keeps the draws independent
            const double prod = v.at(3, 3) * v.at(3 + h1, 3 + h2);
            acc += prod;
            acc2 += prod * prod;
        }
        const double mean = acc / reps;
        const double se = std::sqrt((acc2 / reps - mean * mean) / reps);
        CHECK(std::abs(mean - theoretical_autocovariance(ma, h1, h2)) < 3.0 * se + 1e-12);
    }
}

TEST_CASE("model JSON round trip and error reporting") {
    const char* text = R"({
        "variant": "LinearMA",
        "mean": 0.5,
        "innovation": {"distribution": "Gaussian", "sigma": 2.0, "seed": 9},
        "coefficients": [{"s": [0,0], "a": 1.0}, {"s": [1,0], "a": 0.5}]
    })";
    const FieldModel m = model_from_json(nlohmann::json::parse(text));
    CHECK(m.kind == FieldModel::Kind::LinearMA);
    CHECK(m.mean == 0.5);
    CHECK(m.innovation.sigma == 2.0);
    CHECK(m.innovation.seed == 9);
    REQUIRE(m.ma_coeffs.size() == 2);
    CHECK(m.ma_coeffs[1].a == 0.5);

    CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"variant":"Nope",
        "innovation":{"distribution":"Gaussian"}})")),
                    ConfigError);
    CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"variant":"LinearMA",
        "innovation":{"distribution":"Gaussian"}})")),
                    ConfigError);
}

TEST_CASE("field CSV round trip") {
    LatticeSpec spec(3, 4);
    const FieldGrid f = simulate(white_noise(), spec, 123);
    std::stringstream ss;
    write_field_csv(f, ss);
    const FieldGrid g = read_field_csv(ss);
    CHECK(g.spec == spec);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        CHECK(f.values[i] == doctest::Approx(g.values[i]).epsilon(1e-12));

    std::stringstream bad("t1,t2,value\n1,1,0.5\n");
    CHECK_THROWS_AS(read_field_csv(bad, spec), ConfigError);
}
